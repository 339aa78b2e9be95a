#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "calcforge/expr.hpp"

namespace calcforge {

/// Syntax or vocabulary error with the byte offset where it was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string reason);
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

/// Which leaves the parser accepts besides integers and x.
struct ParseOptions {
  bool allow_param = true;     // c
  bool allow_ode = false;      // y, y'
  bool allow_wild = false;     // ?name
  std::size_t max_nesting = 256;
};

/// Parse infix text:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?
///   base   := INT | 'x' | 'c' | FUNC '(' expr ')' | '(' expr ')' | '-' base
Expr parse(std::string_view text, const ParseOptions& opts = {});

/// Infix rendering; parse(print_infix(e)) == e for every tree.
std::string print_infix(const Expr& e);

/// Operator-first (Polish) token sequence, one token per node.
std::vector<std::string> to_prefix_tokens(const Expr& e);
std::string to_prefix_string(const Expr& e);

/// Inverse of to_prefix_tokens. Throws ParseError (offset = token index).
Expr from_prefix_tokens(const std::vector<std::string>& tokens);
Expr from_prefix_string(std::string_view text);

}  // namespace calcforge
