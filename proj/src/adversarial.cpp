#include "calcforge/adversarial.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "calcforge/calculus.hpp"
#include "calcforge/canonical.hpp"
#include "calcforge/oracle.hpp"

namespace calcforge {

namespace {

constexpr std::uint64_t kSaltUglify = 0x061f;
constexpr std::uint64_t kSaltUgly = 0x0691;
constexpr std::uint64_t kSaltPerturb = 0x9e27;
constexpr std::uint64_t kSaltCombo = 0xc0b0;
constexpr int kRecipeRedraws = 16;
constexpr int kStepTries = 32;

// Substitutes bound pattern variables without canonicalizing, so the
// rewritten shape survives.
Expr plug(const Expr& e, const Subst& s) {
  if (e.op() == Op::Wild) {
    auto it = s.find(e.name());
    return it == s.end() ? e : it->second;
  }
  if (!e.has_wild()) return e;
  if (is_unary(e.op())) return unary(e.op(), plug(e.child(), s));
  return binary(e.op(), plug(e.lhs(), s), plug(e.rhs(), s));
}

// Small nonconstant expression for a right-only rule variable.
Expr fresh_term(Rng& rng) {
  static const GenConfig cfg = [] {
    GenConfig c;
    c.max_internal_nodes = 2;
    c.var_weight = 0.9;
    c.const_min = 1;
    c.const_max = 3;
    c.op_weights = {{Op::Sin, 1}, {Op::Cos, 1}, {Op::Exp, 2}, {Op::Mul, 1}, {Op::Add, 1}};
    return c;
  }();
  for (int k = 0; k < 8; ++k) {
    Expr u = sample_expr(cfg, rng);
    if (u.has_var()) return u;
  }
  return var_x();
}

std::vector<const RewriteRule*> enabled_rules(const RuleSet& rules,
                                              const std::vector<std::string>& names) {
  std::vector<const RewriteRule*> out;
  for (const RewriteRule& r : rules.uglify_rules())
    if (names.empty() || std::find(names.begin(), names.end(), r.name) != names.end())
      out.push_back(&r);
  for (const std::string& n : names) {
    auto it = std::find_if(out.begin(), out.end(), [&](const RewriteRule* r) { return r->name == n; });
    if (it == out.end()) throw UglifyError("unknown uglify identity '" + n + "'");
  }
  if (out.empty()) throw UglifyError("no uglify identities enabled");
  return out;
}

// One growing rewrite at a random matching subterm, or nullopt.
std::optional<Expr> uglify_step(const Expr& cur, const std::vector<const RewriteRule*>& rules,
                                Rng& rng) {
  const std::vector<Expr> subs = subterms(cur);
  for (int t = 0; t < kStepTries; ++t) {
    const RewriteRule& rule = *rules[rng.index(rules.size())];
    const bool bare = rule.pattern.op() == Op::Wild;
    std::vector<std::pair<std::size_t, Subst>> sites;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (bare && !subs[i].has_var()) continue;
      auto ms = match(rule.pattern, canonicalize(subs[i]), 1);
      if (!ms.empty()) sites.emplace_back(i, std::move(ms.front()));
    }
    if (sites.empty()) continue;
    auto [at, s] = sites[rng.index(sites.size())];
    for (const std::string& v : rule.fresh_variables()) s[v] = fresh_term(rng);
    Expr next = replace_at(cur, at, plug(rule.replacement, s));
    if (next.size() > cur.size()) return next;
  }
  return std::nullopt;
}

struct Site {
  std::size_t index;
  int kind;  // 0 constant, 1 sin/cos, 2 exponent, 3 add/mul
};

std::vector<Site> mutation_sites(const Expr& e) {
  std::vector<Site> out;
  const std::vector<Expr> subs = subterms(e);
  std::vector<bool> exponent(subs.size(), false);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const Expr& s = subs[i];
    if (s.op() == Op::Pow && s.rhs().is_int()) {
      exponent[i + 1 + s.lhs().size()] = true;
      out.push_back({i, 2});
    }
    if (s.op() == Op::Int && !exponent[i]) out.push_back({i, 0});
    if (s.op() == Op::Sin || s.op() == Op::Cos) out.push_back({i, 1});
    if (s.op() == Op::Add || s.op() == Op::Mul) out.push_back({i, 3});
  }
  return out;
}

Expr mutate(const Expr& e, const Site& site, Rng& rng) {
  const Expr s = subterms(e)[site.index];
  switch (site.kind) {
    case 0: {
      std::vector<std::int64_t> vals;
      for (std::int64_t v = -5; v <= 5; ++v)
        if (v != 0 && v != s.value()) vals.push_back(v);
      return replace_at(e, site.index, integer(vals[rng.index(vals.size())]));
    }
    case 1:
      return replace_at(e, site.index, unary(s.op() == Op::Sin ? Op::Cos : Op::Sin, s.child()));
    case 2: {
      std::int64_t k = s.rhs().value() + (rng.bernoulli(0.5) ? 1 : -1);
      if (k == 0) k = s.rhs().value() > 0 ? s.rhs().value() + 1 : s.rhs().value() - 1;
      return replace_at(e, site.index, pow(s.lhs(), integer(k)));
    }
    default:
      return replace_at(e, site.index,
                        binary(s.op() == Op::Add ? Op::Mul : Op::Add, s.lhs(), s.rhs()));
  }
}

// Mul chains: maximal mul subtrees, identified by root preorder index.
void chains(const Expr& e, std::size_t index, bool parent_mul,
            std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (e.op() == Op::Mul && !parent_mul) {
    std::size_t n = 0;
    std::vector<Expr> stack = {e};
    while (!stack.empty()) {
      Expr t = stack.back();
      stack.pop_back();
      if (t.op() == Op::Mul) {
        stack.push_back(t.lhs());
        stack.push_back(t.rhs());
      } else {
        ++n;
      }
    }
    out.emplace_back(index, n);
  }
  std::size_t offset = index + 1;
  for (int i = 0; i < arity(e.op()); ++i) {
    chains(e.operand(i), offset, e.op() == Op::Mul, out);
    offset += e.operand(i).size();
  }
}

void factors_of(const Expr& e, std::vector<Expr>& out) {
  if (e.op() != Op::Mul) {
    out.push_back(e);
    return;
  }
  factors_of(e.lhs(), out);
  factors_of(e.rhs(), out);
}

Expr refill(const Expr& e, const std::vector<Expr>& factors, std::size_t& next) {
  if (e.op() != Op::Mul) return factors[next++];
  Expr l = refill(e.lhs(), factors, next);
  Expr r = refill(e.rhs(), factors, next);
  return binary(Op::Mul, l, r);
}

bool pair_holds(const Expr& problem, const Expr& solution, std::uint64_t seed) {
  return numeric_equiv(differentiate(solution), problem, seed).equivalent();
}

AttemptResult skip(const char* reason) {
  AttemptResult r;
  r.reason = reason;
  return r;
}

}  // namespace

Expr uglify(const Expr& e, const UglifyRecipe& recipe) {
  return uglify(e, recipe, *active_rules());
}

Expr uglify(const Expr& e, const UglifyRecipe& recipe, const RuleSet& rules) {
  if (recipe.steps < 1) throw UglifyError("uglify needs at least one step");
  const auto enabled = enabled_rules(rules, recipe.identities);
  bool applied_any = false;
  for (int attempt = 0; attempt < kRecipeRedraws; ++attempt) {
    Rng rng(substream_seed(recipe.seed, static_cast<std::uint64_t>(attempt), kSaltUglify));
    Expr cur = e;
    bool complete = true;
    for (int step = 0; step < recipe.steps; ++step) {
      auto next = uglify_step(cur, enabled, rng);
      if (!next) {
        complete = false;
        break;
      }
      applied_any = true;
      cur = *next;
    }
    if (!complete) continue;
    if (numeric_equiv(cur, e, substream_seed(recipe.seed, attempt, 1)).equivalent()) return cur;
  }
  throw UglifyError(applied_any ? "no uglified form passed the equivalence check"
                                : "no enabled identity applies to the expression");
}

GenResult gen_trick_pairs(const GenConfig& cfg, std::size_t count, int steps, int base_nodes) {
  GenConfig small = cfg;
  small.max_internal_nodes = std::max(1, base_nodes);
  return generate_records(cfg, count, kSaltUgly, "ugly", [&](std::uint64_t seed) {
    Rng rng(seed);
    const Expr F = simplify(canonicalize(sample_expr(small, rng)));
    if (!F.has_var()) return skip("constant");
    const Expr base = simplify(differentiate(F));
    UglifyRecipe recipe;
    recipe.steps = steps;
    recipe.seed = seed;
    Expr ugly;
    try {
      ugly = uglify(base, recipe);
    } catch (const UglifyError&) {
      return skip("no_identity");
    }
    if (!pair_holds(ugly, F, seed ^ 2)) return skip("empty_domain");
    AttemptResult r;
    r.pair = CorpusPair{"", Source::UGLY, ugly, F, std::nullopt, false, seed};
    return r;
  });
}

std::optional<CorpusPair> perturb(const CorpusPair& p, Rng& rng) {
  const std::vector<Site> sites = mutation_sites(p.problem);
  if (sites.empty()) return std::nullopt;
  const Expr original = canonicalize(p.problem);
  for (int t = 0; t < 32; ++t) {
    const Expr m = mutate(p.problem, sites[rng.index(sites.size())], rng);
    if (canonicalize(m) == original) continue;
    if (!numeric_equiv(m, p.problem, rng.next()).not_equivalent()) continue;
    CorpusPair out;
    out.id = p.id + "-p";
    out.source = Source::PERTURB;
    out.problem = m;
    out.wrong_candidate = p.solution;
    out.seed = p.seed;
    return out;
  }
  return std::nullopt;
}

GenResult gen_perturb(const GenConfig& cfg, const std::vector<CorpusPair>& bwd,
                      std::size_t count) {
  if (bwd.empty()) return {};
  return generate_records(cfg, count, kSaltPerturb, "perturb", [&](std::uint64_t seed) {
    Rng rng(seed);
    auto r = perturb(bwd[rng.index(bwd.size())], rng);
    if (!r) return skip("no_mutation");
    AttemptResult a;
    a.pair = std::move(r);
    return a;
  });
}

std::vector<Expr> reorder_products(const Expr& e, Rng& rng, std::size_t cap) {
  std::vector<std::pair<std::size_t, std::size_t>> found;
  chains(e, 0, false, found);
  if (found.empty()) throw std::invalid_argument("expression has no product chain");
  auto best = found.front();
  for (const auto& c : found)
    if (c.second > best.second) best = c;
  const Expr chain = subterms(e)[best.first];
  std::vector<Expr> factors;
  factors_of(chain, factors);
  const std::size_t k = factors.size();

  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  double total = 1;
  for (std::size_t i = 2; i <= k; ++i) total *= static_cast<double>(i);
  if (total - 1 <= static_cast<double>(cap)) {
    while (std::next_permutation(idx.begin(), idx.end())) perms.push_back(idx);
  } else {
    std::set<std::vector<std::size_t>> seen = {idx};
    for (std::size_t tries = 0; perms.size() < cap && tries < 100 * cap; ++tries) {
      std::vector<std::size_t> p = idx;
      rng.shuffle(p);
      if (seen.insert(p).second) perms.push_back(p);
    }
  }
  std::vector<Expr> out;
  for (const auto& p : perms) {
    std::vector<Expr> order;
    for (std::size_t i : p) order.push_back(factors[i]);
    std::size_t next = 0;
    out.push_back(replace_at(e, best.first, refill(chain, order, next)));
  }
  return out;
}

std::optional<CorpusPair> combine_pairs(const CorpusPair& fwd, const CorpusPair& bwd,
                                        std::uint64_t seed) {
  if (!fwd.solution || !bwd.solution) return std::nullopt;
  CorpusPair out;
  out.id = fwd.id + "+" + bwd.id;
  out.source = Source::COMBO;
  out.problem = canonicalize(fwd.problem + bwd.problem);
  out.solution = canonicalize(*fwd.solution + *bwd.solution);
  out.seed = seed;
  if (!out.problem.has_var() || !pair_holds(out.problem, *out.solution, seed)) return std::nullopt;
  return out;
}

GenResult gen_combo(const GenConfig& cfg, const std::vector<CorpusPair>& fwd,
                    const std::vector<CorpusPair>& bwd, std::size_t count) {
  if (fwd.empty() || bwd.empty()) return {};
  return generate_records(cfg, count, kSaltCombo, "combo", [&](std::uint64_t seed) {
    Rng rng(seed);
    const CorpusPair& a = fwd[rng.index(fwd.size())];
    const CorpusPair& b = bwd[rng.index(bwd.size())];
    auto r = combine_pairs(a, b, seed);
    if (!r) return skip("empty_domain");
    AttemptResult out;
    out.pair = std::move(r);
    return out;
  });
}

}  // namespace calcforge
