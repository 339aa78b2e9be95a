#include "calcforge/parse.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

namespace calcforge {

ParseError::ParseError(std::size_t offset, std::string reason)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

namespace {

bool function_from_name(std::string_view name, Op& op) {
  static constexpr Op kFuncs[] = {Op::Sin,  Op::Cos,  Op::Tan, Op::Asin,
                                  Op::Acos, Op::Atan, Op::Exp, Op::Log,
                                  Op::Sqrt};
  for (Op f : kFuncs) {
    if (op_name(f) == name) {
      op = f;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts)
      : text_(text), opts_(opts) {}

  Expr run() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string reason) const {
    throw ParseError(pos_, std::move(reason));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size())
        fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.nesting_ > p.opts_.max_nesting) p.fail("nesting too deep");
    }
    ~DepthGuard() { --p.nesting_; }
    Parser& p;
  };

  Expr parse_expr() {
    DepthGuard guard(*this);
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Op::Add, std::move(lhs), parse_term());
      else if (accept('-'))
        lhs = binary(Op::Sub, std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = binary(Op::Mul, std::move(lhs), parse_factor());
      else if (accept('/'))
        lhs = binary(Op::Div, std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  Expr parse_factor() {
    DepthGuard guard(*this);
    Expr base = parse_base();
    if (accept('^')) return binary(Op::Pow, std::move(base), parse_factor());
    return base;
  }

  Expr parse_base() {
    DepthGuard guard(*this);
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (ch == '-') {
      ++pos_;
      return neg(parse_base());
    }
    if (ch == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) return parse_int();
    if (ch == '?') {
      const std::size_t start = pos_++;
      std::string name = read_ident();
      if (name.empty()) fail("pattern variable needs a name");
      if (!opts_.allow_wild) {
        pos_ = start;
        fail("pattern variables are not allowed here");
      }
      return wild(std::move(name));
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::size_t start = pos_;
      std::string name = read_ident();
      if (name == "x") return var_x();
      if (name == "c") {
        if (!opts_.allow_param) {
          pos_ = start;
          fail("parameter c is not allowed here");
        }
        return param_c();
      }
      if (name == "y" && opts_.allow_ode) {
        if (pos_ < text_.size() && text_[pos_] == '\'') {
          ++pos_;
          return var_dy();
        }
        return var_y();
      }
      Op f{};
      if (function_from_name(name, f)) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '(')
          fail("expected '(' after function name '" + name + "'");
        ++pos_;
        Expr arg = parse_expr();
        expect(')');
        return unary(f, std::move(arg));
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected '") + ch + "'");
  }

  std::string read_ident() {
    std::string out;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      out.push_back(text_[pos_++]);
    return out;
  }

  Expr parse_int() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::int64_t v = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) {
      pos_ = start;
      fail("integer literal out of range");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || std::isalpha(static_cast<unsigned char>(text_[pos_]))))
      fail("malformed number");
    return integer(v);
  }

  std::string_view text_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;
};

// Binding strength of the printed form of e.
enum Prec { kSum = 1, kProduct = 2, kPower = 3, kSigned = 4, kAtom = 5 };

int prec_of(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return kSum;
    case Op::Mul:
    case Op::Div: return kProduct;
    case Op::Pow: return kPower;
    case Op::Neg: return kSigned;
    case Op::Int: return e.value() < 0 ? kSigned : kAtom;
    default: return kAtom;
  }
}

void print(const Expr& e, std::ostringstream& out);

void print_wrapped(const Expr& e, bool wrap, std::ostringstream& out) {
  if (wrap) out << '(';
  print(e, out);
  if (wrap) out << ')';
}

void print(const Expr& e, std::ostringstream& out) {
  switch (e.op()) {
    case Op::Int: out << e.value(); return;
    case Op::Var: out << 'x'; return;
    case Op::Param: out << 'c'; return;
    case Op::Y: out << 'y'; return;
    case Op::DY: out << "y'"; return;
    case Op::Wild: out << '?' << e.name(); return;
    case Op::Add:
    case Op::Sub:
      // Left operand may be any sum or a leading signed term; the right
      // operand is wrapped unless it binds tighter than a sum.
      print_wrapped(e.lhs(), false, out);
      out << (e.op() == Op::Add ? " + " : " - ");
      print_wrapped(e.rhs(), prec_of(e.rhs()) <= kSum || prec_of(e.rhs()) == kSigned, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_wrapped(e.lhs(), prec_of(e.lhs()) < kProduct, out);
      out << (e.op() == Op::Mul ? "*" : "/");
      print_wrapped(e.rhs(), prec_of(e.rhs()) <= kProduct || prec_of(e.rhs()) == kSigned, out);
      return;
    case Op::Pow:
      print_wrapped(e.lhs(), prec_of(e.lhs()) != kAtom, out);
      out << '^';
      print_wrapped(e.rhs(), prec_of(e.rhs()) < kPower || prec_of(e.rhs()) == kSigned, out);
      return;
    case Op::Neg:
      out << '-';
      print_wrapped(e.child(), prec_of(e.child()) != kAtom, out);
      return;
    default:
      out << op_name(e.op()) << '(';
      print(e.child(), out);
      out << ')';
      return;
  }
}

void tokens(const Expr& e, std::vector<std::string>& out) {
  switch (e.op()) {
    case Op::Int: out.push_back(std::to_string(e.value())); return;
    case Op::Wild: out.push_back("?" + e.name()); return;
    default: out.emplace_back(op_name(e.op())); break;
  }
  for (int i = 0; i < arity(e.op()); ++i) tokens(e.operand(i), out);
}

Op op_from_token(const std::string& tok, bool& ok) {
  static constexpr Op kAll[] = {
      Op::Var,  Op::Param, Op::Y,    Op::DY,   Op::Add,  Op::Sub, Op::Mul,
      Op::Div,  Op::Pow,   Op::Neg,  Op::Sin,  Op::Cos,  Op::Tan, Op::Asin,
      Op::Acos, Op::Atan,  Op::Exp,  Op::Log,  Op::Sqrt};
  for (Op op : kAll) {
    if (op_name(op) == tok) {
      ok = true;
      return op;
    }
  }
  ok = false;
  return Op::Int;
}

// Deeper token sequences would exhaust the stack in the recursive passes.
constexpr std::size_t kMaxPrefixDepth = 1024;

Expr build_prefix(const std::vector<std::string>& toks, std::size_t& pos,
                  std::size_t depth) {
  if (depth > kMaxPrefixDepth) throw ParseError(pos, "prefix nesting too deep");
  if (pos >= toks.size()) throw ParseError(pos, "truncated prefix sequence");
  const std::string& tok = toks[pos];
  const std::size_t here = pos++;
  if (!tok.empty() && tok[0] == '?') {
    if (tok.size() == 1) throw ParseError(here, "pattern variable needs a name");
    return wild(tok.substr(1));
  }
  if (!tok.empty() &&
      (std::isdigit(static_cast<unsigned char>(tok[0])) ||
       (tok[0] == '-' && tok.size() > 1))) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(here, "bad integer token '" + tok + "'");
    return integer(v);
  }
  bool ok = false;
  Op op = op_from_token(tok, ok);
  if (!ok) throw ParseError(here, "unknown token '" + tok + "'");
  switch (arity(op)) {
    case 0:
      switch (op) {
        case Op::Var: return var_x();
        case Op::Param: return param_c();
        case Op::Y: return var_y();
        default: return var_dy();
      }
    case 1:
      return unary(op, build_prefix(toks, pos, depth + 1));
    default: {
      Expr l = build_prefix(toks, pos, depth + 1);
      Expr r = build_prefix(toks, pos, depth + 1);
      return binary(op, std::move(l), std::move(r));
    }
  }
}

}  // namespace

Expr parse(std::string_view text, const ParseOptions& opts) {
  return Parser(text, opts).run();
}

std::string print_infix(const Expr& e) {
  std::ostringstream out;
  print(e, out);
  return out.str();
}

std::vector<std::string> to_prefix_tokens(const Expr& e) {
  std::vector<std::string> out;
  out.reserve(e.size());
  tokens(e, out);
  return out;
}

std::string to_prefix_string(const Expr& e) {
  std::string out;
  for (const auto& t : to_prefix_tokens(e)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Expr from_prefix_tokens(const std::vector<std::string>& toks) {
  std::size_t pos = 0;
  Expr e = build_prefix(toks, pos, 0);
  if (pos != toks.size()) throw ParseError(pos, "trailing prefix tokens");
  return e;
}

Expr from_prefix_string(std::string_view text) {
  std::vector<std::string> toks;
  std::istringstream in{std::string(text)};
  for (std::string t; in >> t;) toks.push_back(t);
  return from_prefix_tokens(toks);
}

}  // namespace calcforge
