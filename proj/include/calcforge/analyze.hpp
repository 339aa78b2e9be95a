#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calcforge/corpus.hpp"
#include "calcforge/generate.hpp"

namespace calcforge {

struct LengthStats {
  std::size_t count = 0;
  double mean = 0, std = 0, median = 0;  // std is the population deviation
  double min = 0, max = 0;
  bool present() const { return count > 0; }
};

struct SourceStats {
  std::size_t count = 0;
  LengthStats problem;
  LengthStats solution;
  LengthStats ratio;  // problem_len / solution_len per record with a solution
};

struct CorpusStats {
  SourceStats all;
  std::map<std::string, SourceStats> by_source;
};

/// Lengths are prefix token counts of the stored expressions. Results do
/// not depend on record order.
CorpusStats corpus_stats(const std::vector<CorpusPair>& records);

std::string stats_csv(const CorpusStats& s);
std::string stats_json(const CorpusStats& s);

struct GrowthRow {
  int n = 0;
  double median_len = 0, p25 = 0, p75 = 0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double slope = 0;  // least squares of log median_len on log n
};

/// Unary-heavy operator weights with x leaves: nested compositions.
GenConfig composition_heavy_config(std::uint64_t seed);
/// add and sub only, over leaves f(k*x + m) with f in {sin, cos, exp}.
GenConfig addition_only_config(std::uint64_t seed);

/// For each n, `samples` expressions with exactly n internal nodes; the
/// length is the token count of simplify(differentiate(e)).
GrowthReport derivative_growth(const GenConfig& cfg, const std::vector<int>& sizes,
                               std::size_t samples);

std::string growth_csv(const GrowthReport& r);

}  // namespace calcforge
