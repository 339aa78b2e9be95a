#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "calcforge/corpus.hpp"
#include "calcforge/expr.hpp"
#include "calcforge/rng.hpp"

namespace calcforge {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GenConfig {
  std::uint64_t seed = 0;
  int max_internal_nodes = 15;
  std::map<Op, double> op_weights = default_op_weights();
  int const_min = -5;
  int const_max = 5;
  double var_weight = 0.5;  // leaf is x with this probability, else an integer
  std::size_t jobs = 1;
  std::size_t attempt_factor = 100;  // attempts allowed per requested record
  std::size_t ledger_cap = 4096;     // IBP ledger size before reservoir eviction
  // When set, replaces the x/integer leaf draw (analysis experiments only).
  // Leaves are redrawn, up to a bound, to avoid repeats within one tree.
  std::function<Expr(Rng&)> leaf_sampler;

  static std::map<Op, double> default_op_weights();
  void validate() const;  // throws ConfigError
};

/// key = value lines, '#' comments. Keys: seed, max_internal_nodes,
/// const_min, const_max, var_weight, jobs, attempt_factor, ledger_cap and
/// weight.<op> (op as in prefix tokens, e.g. weight.sin = 2).
GenConfig parse_gen_config(const std::string& text);
GenConfig load_gen_config(const std::string& path);

/// Internal node count drawn uniformly from [1, max_internal_nodes]; the
/// tree grows by turning a uniformly chosen open leaf into an operator
/// drawn by weight. pow takes an integer exponent leaf from {-2,-1,2,3}
/// (clipped to the constant range) and its exponent is not expanded.
/// Integer leaves exclude 0.
Expr sample_expr(const GenConfig& cfg, Rng& rng);
Expr sample_expr_exact(const GenConfig& cfg, int internal_nodes, Rng& rng);
std::size_t internal_nodes(const Expr& e);

struct GenStats {
  std::size_t attempts = 0;
  std::size_t emitted = 0;
  std::map<std::string, std::size_t> discarded;  // reason code -> count

  double yield() const { return attempts ? double(emitted) / double(attempts) : 0.0; }
};

struct GenResult {
  std::vector<CorpusPair> pairs;
  GenStats stats;
};

/// Known (integrand, antiderivative) pairs for IBP, looked up by the
/// dedup key of the integrand.
class Ledger {
 public:
  explicit Ledger(std::size_t cap = 4096, std::uint64_t seed = 0) : cap_(cap), rng_(seed) {}

  void add(const Expr& integrand, const Expr& antiderivative);
  void add_all(const std::vector<CorpusPair>& pairs);
  const Expr* find(const Expr& integrand) const;
  std::size_t size() const { return entries_.size(); }
  const std::pair<Expr, Expr>& at(std::size_t i) const { return entries_[i]; }

 private:
  std::size_t cap_;
  std::size_t seen_ = 0;
  Rng rng_;
  std::vector<std::pair<Expr, Expr>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

GenResult gen_bwd(const GenConfig& cfg, std::size_t count);
GenResult gen_fwd(const GenConfig& cfg, std::size_t count);
/// Draws from `ledger`; emitted pairs, and any helper integral found on
/// the way, are appended to it after each batch.
GenResult gen_ibp(const GenConfig& cfg, Ledger& ledger, std::size_t count);
GenResult gen_ode(const GenConfig& cfg, std::size_t count);

struct AttemptResult {
  std::optional<CorpusPair> pair;
  std::string reason;  // discard reason code when no pair
};

/// One integration-by-parts step: with F' = f and H = integral of f*G,
/// the pair (F*G', F*G - H), tidied and oracle-checked.
AttemptResult ibp_pair(const Expr& F, const Expr& G, const Expr& H, std::uint64_t seed);

/// Deterministic batched driver shared by the pipelines: attempt i gets
/// substream_seed(cfg.seed, i, salt), attempts run on cfg.jobs threads, and
/// results are deduplicated and numbered "<prefix>-NNNNNN" in attempt order
/// until `count` records or cfg.attempt_factor * count attempts.
GenResult generate_records(const GenConfig& cfg, std::size_t count, std::uint64_t salt,
                           const std::string& prefix,
                           const std::function<AttemptResult(std::uint64_t seed)>& fn);

/// Replaces one uniformly chosen leaf of the raw tree with c.
Expr insert_parameter(const Expr& e, Rng& rng);

/// Runs fn(0..n-1) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace calcforge
