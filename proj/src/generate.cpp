#include "calcforge/generate.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/oracle.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"

namespace calcforge {

namespace {

constexpr Op kOperators[] = {Op::Add, Op::Sub, Op::Mul,  Op::Div,  Op::Pow,  Op::Neg,
                             Op::Sin, Op::Cos, Op::Tan,  Op::Asin, Op::Acos, Op::Atan,
                             Op::Exp, Op::Log, Op::Sqrt};

// Salts keep the per-pipeline substreams disjoint for one user seed.
constexpr std::uint64_t kSaltBwd = 0xb3d;
constexpr std::uint64_t kSaltFwd = 0xf3d;
constexpr std::uint64_t kSaltIbp = 0x1b9;
constexpr std::uint64_t kSaltOde = 0x0de;

// Records are produced in fixed-size batches regardless of thread count,
// so the output depends only on the seed.
constexpr std::size_t kBatch = 64;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::int64_t> pow_exponents(const GenConfig& cfg) {
  std::vector<std::int64_t> out;
  for (std::int64_t k : {-2, -1, 2, 3})
    if (k >= cfg.const_min && k <= cfg.const_max) out.push_back(k);
  return out;
}

struct Slot {
  Op op = Op::Int;
  std::int64_t value = 0;
  int kids[2] = {-1, -1};
};

Expr build(const std::vector<Slot>& slots, int i) {
  const Slot& s = slots[i];
  if (s.op == Op::Int) return integer(s.value);
  if (s.op == Op::Var) return var_x();
  if (is_unary(s.op)) return unary(s.op, build(slots, s.kids[0]));
  return binary(s.op, build(slots, s.kids[0]), build(slots, s.kids[1]));
}

Expr grow(const GenConfig& cfg, int n, Rng& rng) {
  std::vector<Op> ops;
  std::vector<double> weights;
  const auto exps = pow_exponents(cfg);
  for (Op op : kOperators) {
    auto it = cfg.op_weights.find(op);
    double w = it == cfg.op_weights.end() ? 0.0 : it->second;
    if (op == Op::Pow && exps.empty()) w = 0.0;
    ops.push_back(op);
    weights.push_back(w);
  }
  std::vector<Slot> slots(1);
  std::vector<int> open = {0};
  std::vector<std::pair<int, Expr>> atoms;
  for (int step = 0; step < n; ++step) {
    const std::size_t pick = rng.index(open.size());
    const int at = open[pick];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    const Op op = ops[rng.weighted(weights)];
    slots[at].op = op;
    for (int k = 0; k < arity(op); ++k) {
      slots[at].kids[k] = static_cast<int>(slots.size());
      slots.emplace_back();
      if (op == Op::Pow && k == 1)
        slots.back().value = exps[rng.index(exps.size())];
      else
        open.push_back(slots[at].kids[k]);
    }
  }
  std::vector<std::int64_t> ints;
  for (std::int64_t v = cfg.const_min; v <= cfg.const_max; ++v)
    if (v != 0) ints.push_back(v);
  std::sort(open.begin(), open.end());
  for (int at : open) {
    if (cfg.leaf_sampler) {
      Expr leaf = cfg.leaf_sampler(rng);
      for (int t = 0; t < 16; ++t) {
        const bool repeat = std::any_of(atoms.begin(), atoms.end(),
                                        [&](const auto& a) { return a.second == leaf; });
        if (!repeat) break;
        leaf = cfg.leaf_sampler(rng);
      }
      atoms.emplace_back(at, leaf);
      slots[at].op = Op::Var;  // placeholder, replaced below
      slots[at].value = static_cast<std::int64_t>(atoms.size());
      continue;
    }
    if (ints.empty() || rng.bernoulli(cfg.var_weight))
      slots[at].op = Op::Var;
    else
      slots[at].value = ints[rng.index(ints.size())];
  }
  if (atoms.empty()) return build(slots, 0);
  // Leaves come from the custom sampler: build with distinct markers.
  std::function<Expr(int)> rec = [&](int i) -> Expr {
    const Slot& s = slots[i];
    if (s.op == Op::Var) return atoms[static_cast<std::size_t>(s.value - 1)].second;
    if (s.op == Op::Int) return integer(s.value);
    if (is_unary(s.op)) return unary(s.op, rec(s.kids[0]));
    return binary(s.op, rec(s.kids[0]), rec(s.kids[1]));
  };
  return rec(0);
}

struct Attempt {
  std::optional<CorpusPair> pair;
  std::string reason;                           // set when discarded
  std::vector<std::pair<Expr, Expr>> ledger;   // extra known integrals
};

using AttemptFn = std::function<Attempt(std::size_t index, std::uint64_t seed)>;

// Attempts run in parallel per batch; the writer walks results in index
// order, so dedup and the stopping point are independent of `jobs`.
GenResult run_pipeline(const GenConfig& cfg, std::size_t count, std::uint64_t salt,
                       const char* prefix, const AttemptFn& attempt,
                       const std::function<void(const Attempt&)>& after = {}) {
  GenResult out;
  std::unordered_set<std::string> keys;
  const std::size_t budget = std::max<std::size_t>(1, cfg.attempt_factor * count);
  std::size_t next = 0;
  while (out.pairs.size() < count && next < budget) {
    const std::size_t n = std::min(kBatch, budget - next);
    std::vector<Attempt> results(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
      const std::uint64_t s = substream_seed(cfg.seed, next + i, salt);
      try {
        results[i] = attempt(next + i, s);
      } catch (const ArithmeticOverflow&) {
        results[i].reason = "overflow";
      }
      if (results[i].pair) results[i].pair->seed = s;
    });
    for (std::size_t i = 0; i < n && out.pairs.size() < count; ++i) {
      ++out.stats.attempts;
      Attempt& a = results[i];
      if (!a.pair) {
        ++out.stats.discarded[a.reason.empty() ? "unknown" : a.reason];
        continue;
      }
      if (!keys.insert(dedup_key(*a.pair)).second) {
        ++out.stats.discarded["duplicate"];
        continue;
      }
      char id[32];
      std::snprintf(id, sizeof id, "%s-%06zu", prefix, out.pairs.size());
      a.pair->id = id;
      if (after) after(a);
      out.pairs.push_back(std::move(*a.pair));
      ++out.stats.emitted;
    }
    next += n;
  }
  return out;
}

Attempt discard(const char* reason) {
  Attempt a;
  a.reason = reason;
  return a;
}

constexpr std::size_t kMaxProblemTokens = 4000;

// Smaller of the simplified form and the simplified expansion.
Expr tidy(const Expr& e) {
  Expr a = simplify(e);
  Expr b = simplify(expand(canonicalize(e)));
  return b.size() < a.size() ? b : a;
}

// The stored solution must differentiate back to the problem.
bool pair_checks(const Expr& problem, const Expr& solution, std::uint64_t seed,
                 std::string& reason) {
  const EquivalenceVerdict v = numeric_equiv(differentiate(solution), problem, seed);
  if (v.equivalent()) return true;
  reason = v.not_equivalent() ? "oracle_mismatch" : "empty_domain";
  return false;
}

}  // namespace

std::map<Op, double> GenConfig::default_op_weights() {
  return {{Op::Add, 3}, {Op::Sub, 2}, {Op::Mul, 3},  {Op::Div, 1},  {Op::Pow, 1},
          {Op::Neg, 0}, {Op::Sin, 1}, {Op::Cos, 1},  {Op::Tan, 0.5}, {Op::Asin, 0.25},
          {Op::Acos, 0.25}, {Op::Atan, 0.5}, {Op::Exp, 1}, {Op::Log, 1}, {Op::Sqrt, 0.5}};
}

void GenConfig::validate() const {
  if (max_internal_nodes < 1) throw ConfigError("max_internal_nodes must be at least 1");
  if (const_min < -5 || const_max > 5 || const_min > const_max)
    throw ConfigError("constant range must lie within [-5, 5]");
  double total = 0;
  for (const auto& [op, w] : op_weights) {
    if (w < 0) throw ConfigError("operator weights must be nonnegative");
    if (is_leaf(op)) throw ConfigError("operator weight given for a leaf");
    total += w;
  }
  if (total <= 0) throw ConfigError("at least one operator must have positive weight");
  if (var_weight < 0 || var_weight > 1) throw ConfigError("var_weight must lie in [0, 1]");
  if (!leaf_sampler && var_weight == 0 && const_min == 0 && const_max == 0)
    throw ConfigError("no leaf kind enabled");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

GenConfig parse_gen_config(const std::string& text) {
  GenConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "max_internal_nodes") cfg.max_internal_nodes = std::stoi(val);
      else if (key == "const_min") cfg.const_min = std::stoi(val);
      else if (key == "const_max") cfg.const_max = std::stoi(val);
      else if (key == "var_weight") cfg.var_weight = std::stod(val);
      else if (key == "jobs") cfg.jobs = std::stoul(val);
      else if (key == "attempt_factor") cfg.attempt_factor = std::stoul(val);
      else if (key == "ledger_cap") cfg.ledger_cap = std::stoul(val);
      else if (key.rfind("weight.", 0) == 0) {
        const std::string name = key.substr(7);
        auto it = std::find_if(std::begin(kOperators), std::end(kOperators),
                               [&](Op op) { return op_name(op) == name; });
        if (it == std::end(kOperators)) throw ConfigError("unknown operator '" + name + "'");
        cfg.op_weights[*it] = std::stod(val);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(n) + ": " + e.what());
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(n) + ": bad value for '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

GenConfig load_gen_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_gen_config(ss.str());
}

Expr sample_expr(const GenConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(rng.uniform_int(1, cfg.max_internal_nodes));
  return grow(cfg, n, rng);
}

Expr sample_expr_exact(const GenConfig& cfg, int internal, Rng& rng) {
  return grow(cfg, std::max(0, internal), rng);
}

std::size_t internal_nodes(const Expr& e) {
  if (is_leaf(e.op())) return 0;
  if (e.op() == Op::Pow && e.rhs().is_int()) return 1 + internal_nodes(e.lhs());
  std::size_t n = 1;
  for (int i = 0; i < arity(e.op()); ++i) n += internal_nodes(e.operand(i));
  return n;
}

void Ledger::add(const Expr& integrand, const Expr& antiderivative) {
  const std::string key = dedup_key(integrand);
  if (index_.count(key)) return;
  ++seen_;
  if (entries_.size() < cap_) {
    index_[key] = entries_.size();
    entries_.emplace_back(integrand, antiderivative);
    return;
  }
  const std::size_t j = rng_.index(seen_);
  if (j >= cap_) return;
  index_.erase(dedup_key(entries_[j].first));
  entries_[j] = {integrand, antiderivative};
  index_[key] = j;
}

void Ledger::add_all(const std::vector<CorpusPair>& pairs) {
  for (const CorpusPair& p : pairs)
    if (p.solution && p.source != Source::ODE1) add(p.problem, *p.solution);
}

const Expr* Ledger::find(const Expr& integrand) const {
  auto it = index_.find(dedup_key(integrand));
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

GenResult gen_bwd(const GenConfig& cfg, std::size_t count) {
  cfg.validate();
  return run_pipeline(cfg, count, kSaltBwd, "bwd", [&](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    const Expr F = simplify(canonicalize(sample_expr(cfg, rng)));
    if (!F.has_var()) return discard("constant");
    const Expr dF = differentiate(F);
    if (dF.size() > kMaxProblemTokens) return discard("too_large");
    const Expr problem = simplify(dF);
    if (!problem.has_var() && problem.is_int(0)) return discard("constant");
    Attempt a;
    if (!pair_checks(problem, F, seed, a.reason)) return a;
    a.pair = CorpusPair{"", Source::BWD, problem, F, std::nullopt, false, seed};
    return a;
  });
}

GenResult gen_fwd(const GenConfig& cfg, std::size_t count) {
  cfg.validate();
  return run_pipeline(cfg, count, kSaltFwd, "fwd", [&](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    const Expr f = simplify(canonicalize(sample_expr(cfg, rng)));
    if (!f.has_var()) return discard("constant");
    IntegrateOptions io;
    io.seed = seed;
    auto F = integrate_heuristic(f, io);
    if (!F) return discard("no_answer");
    Attempt a;
    if (!pair_checks(f, *F, seed ^ 1, a.reason)) return a;
    a.pair = CorpusPair{"", Source::FWD, f, *F, std::nullopt, false, seed};
    return a;
  });
}

AttemptResult ibp_pair(const Expr& F, const Expr& G, const Expr& H, std::uint64_t seed) {
  AttemptResult r;
  const Expr problem = tidy(canonical_mul(F, differentiate(G)));
  const Expr solution = tidy(canonical_sub(canonical_mul(F, G), H));
  if (!problem.has_var() || !solution.has_var()) {
    r.reason = "constant";
  } else if (problem.size() > kMaxProblemTokens) {
    r.reason = "too_large";
  } else if (pair_checks(problem, solution, seed, r.reason)) {
    r.pair = CorpusPair{"", Source::IBP, problem, solution, std::nullopt, false, seed};
  }
  return r;
}

GenResult gen_ibp(const GenConfig& cfg, Ledger& ledger, std::size_t count) {
  cfg.validate();
  if (ledger.size() == 0) return {};
  GenConfig small = cfg;
  small.max_internal_nodes = std::min(cfg.max_internal_nodes, 2);
  auto attempt = [&](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    const auto& [f, F] = ledger.at(rng.index(ledger.size()));
    Expr G;
    if (rng.bernoulli(0.5)) {
      G = ledger.at(rng.index(ledger.size())).second;
      if (G.size() > 12) G = var_x();
    } else {
      G = simplify(canonicalize(sample_expr(small, rng)));
    }
    if (!G.has_var()) return discard("constant");
    const Expr fG = simplify(canonical_mul(f, G));
    Attempt a;
    std::optional<Expr> H;
    if (const Expr* known = ledger.find(fG)) {
      H = *known;
    } else {
      IntegrateOptions io;
      io.seed = seed;
      H = integrate_heuristic(fG, io);
      if (!H) return discard("no_match");
      a.ledger.emplace_back(fG, *H);
    }
    AttemptResult r = ibp_pair(F, G, *H, seed);
    a.pair = std::move(r.pair);
    a.reason = std::move(r.reason);
    return a;
  };
  // The writer runs between batches, so each batch sees a frozen ledger
  // and the appended entries feed later batches deterministically.
  return run_pipeline(cfg, count, kSaltIbp, "ibp", attempt, [&](const Attempt& a) {
    for (const auto& [integrand, anti] : a.ledger) ledger.add(integrand, anti);
    ledger.add(a.pair->problem, *a.pair->solution);
  });
}

GenResult generate_records(const GenConfig& cfg, std::size_t count, std::uint64_t salt,
                           const std::string& prefix,
                           const std::function<AttemptResult(std::uint64_t seed)>& fn) {
  cfg.validate();
  return run_pipeline(cfg, count, salt, prefix.c_str(), [&](std::size_t, std::uint64_t seed) {
    AttemptResult r = fn(seed);
    Attempt a;
    a.pair = std::move(r.pair);
    a.reason = std::move(r.reason);
    return a;
  });
}

Expr insert_parameter(const Expr& e, Rng& rng) {
  std::vector<std::size_t> leaves;
  const std::vector<Expr> subs = subterms(e);
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (is_leaf(subs[i].op())) leaves.push_back(i);
  if (leaves.empty()) return e;
  return replace_at(e, leaves[rng.index(leaves.size())], param_c());
}

GenResult gen_ode(const GenConfig& cfg, std::size_t count) {
  cfg.validate();
  return run_pipeline(cfg, count, kSaltOde, "ode1", [&](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    const Expr base = sample_expr(cfg, rng);
    // Prefer a parameter position whose path inverts without branch issues.
    Expr raw = insert_parameter(base, rng);
    for (int k = 0; k < 8 && !has_injective_path(raw); ++k) raw = insert_parameter(base, rng);
    if (!raw.has_var() || !raw.has_param()) return discard("constant");
    OdeResult r = make_first_order_ode(raw, seed);
    if (!r.ok()) return discard(std::string(invert_failure_name(r.failure)).c_str());
    Expr sol = canonicalize(raw);
    if (count_leaf(sol, Op::Param) != 1) sol = raw;
    Attempt a;
    a.pair = CorpusPair{"", Source::ODE1, r.problem->equation, sol, std::nullopt, false, seed};
    return a;
  });
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace calcforge
