#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "calcforge/expr.hpp"

namespace calcforge {

enum class Source { FWD, BWD, IBP, UGLY, PERTURB, COMBO, ODE1 };

std::string_view source_name(Source s);
std::optional<Source> source_from_name(std::string_view name);

struct CorpusPair {
  std::string id;
  Source source = Source::BWD;
  Expr problem;
  std::optional<Expr> solution;         // absent for PERTURB
  std::optional<Expr> wrong_candidate;  // PERTURB: the pre-mutation solution
  bool raw_order = false;               // problem serialized as built, not canonical
  std::uint64_t seed = 0;               // substream seed the record was drawn from
};

/// Stable 64-bit FNV-1a of the canonical problem's prefix form, as hex.
std::string dedup_key(const CorpusPair& p);
std::string dedup_key(const Expr& problem);

class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const CorpusPair& p);
CorpusPair from_json_line(std::string_view line);

void write_jsonl(std::ostream& out, const std::vector<CorpusPair>& pairs);
std::vector<CorpusPair> read_jsonl(std::istream& in);
std::vector<CorpusPair> read_jsonl_file(const std::string& path);

}  // namespace calcforge
