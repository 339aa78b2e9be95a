#include "calcforge/rewrite.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "calcforge/canonical.hpp"
#include "calcforge/parse.hpp"

namespace calcforge {

namespace {

#include "default_rules.inc"

bool is_sum_root(const Expr& e) { return e.op() == Op::Add || e.op() == Op::Sub; }

bool is_product_root(const Expr& e) {
  switch (e.op()) {
    case Op::Mul:
    case Op::Neg:
      return true;
    case Op::Div:
      return !as_number(e).has_value();
    case Op::Pow:
      return e.rhs().is_int() && !as_number(e.lhs()).has_value();
    default:
      return false;
  }
}

const Expr& one() {
  static const Expr e = integer(1);
  return e;
}

void collect_wilds(const Expr& e, std::set<std::string>& out) {
  if (!e.has_wild()) return;
  if (e.op() == Op::Wild) {
    out.insert(e.name());
    return;
  }
  for (int i = 0; i < arity(e.op()); ++i) collect_wilds(e.operand(i), out);
}

bool all_bound(const Expr& e, const Subst& s) {
  std::set<std::string> names;
  collect_wilds(e, names);
  for (const auto& n : names)
    if (!s.count(n)) return false;
  return true;
}

Expr substitute_wilds(const Expr& e, const Subst& s) {
  if (!e.has_wild()) return e;
  if (e.op() == Op::Wild) {
    auto it = s.find(e.name());
    return it == s.end() ? e : it->second;
  }
  if (is_unary(e.op())) return unary(e.op(), substitute_wilds(e.child(), s));
  return binary(e.op(), substitute_wilds(e.lhs(), s), substitute_wilds(e.rhs(), s));
}

struct TermRec {
  Rational coef;
  Expr mono;  // 1 for the constant term
};

std::vector<TermRec> terms_of(const Expr& t) {
  const SumForm sf = sum_form(t);
  std::vector<TermRec> out;
  out.reserve(sf.terms.size() + 1);
  for (const Term& term : sf.terms) out.push_back({term.coef, term.mono});
  if (!sf.constant.is_zero()) out.push_back({sf.constant, one()});
  return out;
}

using Cont = std::function<bool(const Subst&)>;
using RootCont = std::function<bool(const Subst&, const Expr&)>;

bool bind_var(const std::string& name, const Expr& v, const Subst& s, const Cont& k) {
  auto it = s.find(name);
  if (it != s.end()) return it->second == v && k(s);
  Subst s2 = s;
  s2.emplace(name, v);
  return k(s2);
}

bool match_exact(const Expr& p, const Expr& t, const Subst& s, const Cont& k);

// Accept a complete binding only if it reproduces the target exactly.
bool finish_exact(const Expr& p, const Expr& t, const Subst& s, const Cont& k) {
  if (!all_bound(p, s)) return false;
  return instantiate(p, s) == t && k(s);
}

bool product_exact(const Expr& p, const Expr& t, const Subst& s, const Cont& k) {
  const ProductForm pp = product_form(p);
  const ProductForm pt = product_form(t);
  std::vector<Factor> regular;
  std::vector<std::string> absorbers;
  for (const Factor& f : pp.factors) {
    if (f.base.op() == Op::Wild && f.exp == 1)
      absorbers.push_back(f.base.name());
    else
      regular.push_back(f);
  }
  std::vector<char> used(pt.factors.size(), 0);
  std::function<bool(std::size_t, const Subst&)> assign =
      [&](std::size_t i, const Subst& cur) -> bool {
    if (i == regular.size()) {
      std::vector<std::string> unbound;
      for (const auto& a : absorbers)
        if (!cur.count(a)) unbound.push_back(a);
      if (unbound.empty()) return finish_exact(p, t, cur, k);
      if (unbound.size() > 1) return false;
      std::vector<Factor> left;
      for (std::size_t j = 0; j < pt.factors.size(); ++j)
        if (!used[j]) left.push_back(pt.factors[j]);
      Subst s2 = cur;
      s2[unbound[0]] = canonical_product(pt.coef / pp.coef, left);
      return finish_exact(p, t, s2, k);
    }
    const Factor& f = regular[i];
    for (std::size_t j = 0; j < pt.factors.size(); ++j) {
      if (used[j]) continue;
      const Factor& g = pt.factors[j];
      Cont next = [&](const Subst& s1) { return assign(i + 1, s1); };
      used[j] = 1;
      bool done = false;
      if (f.base.op() == Op::Wild) {
        if (g.exp % f.exp == 0 && g.exp / f.exp > 0)
          done = bind_var(f.base.name(), canonical_pow(g.base, g.exp / f.exp), cur, next);
      } else if (g.exp == f.exp) {
        done = match_exact(f.base, g.base, cur, next);
      }
      used[j] = 0;
      if (done) return true;
    }
    return false;
  };
  return assign(0, s);
}

bool sum_exact(const Expr& p, const Expr& t, const Subst& s, const Cont& k) {
  const std::vector<TermRec> pterms = terms_of(p);
  const std::vector<TermRec> tterms = terms_of(t);
  std::vector<TermRec> regular, wilds;
  for (const TermRec& r : pterms)
    (r.mono.op() == Op::Wild ? wilds : regular).push_back(r);
  std::vector<char> used(tterms.size(), 0);

  auto leftovers = [&]() {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < tterms.size(); ++j)
      if (!used[j]) idx.push_back(j);
    return idx;
  };

  std::function<bool(std::size_t, const Subst&)> assign =
      [&](std::size_t i, const Subst& cur) -> bool {
    if (i == regular.size()) {
      std::vector<TermRec> unbound, bound;
      for (const TermRec& w : wilds)
        (cur.count(w.mono.name()) ? bound : unbound).push_back(w);
      if (unbound.empty()) return finish_exact(p, t, cur, k);
      const auto left = leftovers();
      if (unbound.size() == 1) {
        std::vector<Term> rest;
        for (std::size_t j : left) rest.push_back({tterms[j].coef, tterms[j].mono});
        for (const TermRec& b : bound) rest.push_back({-b.coef, cur.at(b.mono.name())});
        Expr val = canonical_scale(Rational(1) / unbound[0].coef, canonical_sum(rest, 0));
        if (val.is_int(0)) return false;
        Subst s2 = cur;
        s2[unbound[0].mono.name()] = val;
        return finish_exact(p, t, s2, k);
      }
      if (!bound.empty() || left.size() > 8 || left.size() < unbound.size()) return false;
      // Distribute the leftover terms over the unbound variables.
      const std::size_t nu = unbound.size();
      std::vector<std::size_t> pick(left.size(), 0);
      while (true) {
        std::vector<std::vector<Term>> groups(nu);
        for (std::size_t q = 0; q < left.size(); ++q)
          groups[pick[q]].push_back(
              {tterms[left[q]].coef / unbound[pick[q]].coef, tterms[left[q]].mono});
        bool all_nonempty = true;
        for (const auto& g : groups) all_nonempty = all_nonempty && !g.empty();
        if (all_nonempty) {
          Subst s2 = cur;
          for (std::size_t u = 0; u < nu; ++u)
            s2[unbound[u].mono.name()] = canonical_sum(groups[u], 0);
          if (finish_exact(p, t, s2, k)) return true;
        }
        std::size_t q = 0;
        while (q < pick.size() && ++pick[q] == nu) pick[q++] = 0;
        if (q == pick.size()) break;
      }
      return false;
    }
    const TermRec& r = regular[i];
    for (std::size_t j = 0; j < tterms.size(); ++j) {
      if (used[j] || tterms[j].coef != r.coef) continue;
      used[j] = 1;
      bool done = false;
      Cont next = [&](const Subst& s1) { return assign(i + 1, s1); };
      if (r.mono.is_int(1))
        done = tterms[j].mono.is_int(1) && next(cur);
      else if (!tterms[j].mono.is_int(1))
        done = match_exact(r.mono, tterms[j].mono, cur, next);
      used[j] = 0;
      if (done) return true;
    }
    return false;
  };
  return assign(0, s);
}

bool match_exact(const Expr& p, const Expr& t, const Subst& s, const Cont& k) {
  if (p.op() == Op::Wild) return bind_var(p.name(), t, s, k);
  if (!p.has_wild()) return p == t && k(s);
  if (is_sum_root(p)) return sum_exact(p, t, s, k);
  if (is_product_root(p)) return product_exact(p, t, s, k);
  if (p.op() != t.op()) return false;
  if (is_unary(p.op())) return match_exact(p.child(), t.child(), s, k);
  return match_exact(p.lhs(), t.lhs(), s, [&](const Subst& s1) {
    return match_exact(p.rhs(), t.rhs(), s1, k);
  });
}

// Match a coefficient-free product pattern against part of a target
// monomial; the unmatched part (including leftover exponents) is passed on
// as the cofactor.
bool product_root(const Expr& pm, const Expr& tm, const Subst& s, const RootCont& k) {
  const ProductForm pp = product_form(pm);
  const ProductForm pt = product_form(tm);
  std::vector<Factor> regular;
  std::vector<std::string> absorbers;
  for (const Factor& f : pp.factors) {
    if (f.base.op() == Op::Wild && f.exp == 1)
      absorbers.push_back(f.base.name());
    else
      regular.push_back(f);
  }
  std::vector<std::int64_t> rem(pt.factors.size());
  for (std::size_t j = 0; j < rem.size(); ++j) rem[j] = pt.factors[j].exp;

  std::function<bool(std::size_t, const Subst&)> assign =
      [&](std::size_t i, const Subst& cur) -> bool {
    if (i == regular.size()) {
      std::vector<Factor> left;
      for (std::size_t j = 0; j < rem.size(); ++j)
        if (rem[j] != 0) left.push_back({pt.factors[j].base, rem[j]});
      std::vector<std::string> unbound;
      for (const auto& a : absorbers)
        if (!cur.count(a)) unbound.push_back(a);
      if (unbound.size() > 1) return false;
      Expr cof = canonical_product(1, left);
      if (unbound.empty()) {
        // Bound absorbers must divide the cofactor.
        Expr absorbed = one();
        for (const auto& a : absorbers) absorbed = canonical_mul(absorbed, cur.at(a));
        return k(cur, canonical_div(cof, absorbed));
      }
      Subst s2 = cur;
      s2[unbound[0]] = cof;
      return k(s2, one());
    }
    const Factor& f = regular[i];
    for (std::size_t j = 0; j < rem.size(); ++j) {
      const std::int64_t r = rem[j];
      if (r == 0) continue;
      const Factor& g = pt.factors[j];
      Cont next = [&](const Subst& s1) { return assign(i + 1, s1); };
      bool done = false;
      if (f.base.op() == Op::Wild) {
        if (r != g.exp || r % f.exp != 0 || r / f.exp <= 0) continue;
        rem[j] = 0;
        done = bind_var(f.base.name(), canonical_pow(g.base, r / f.exp), cur, next);
      } else {
        if ((r > 0) != (f.exp > 0) || std::abs(r) < std::abs(f.exp)) continue;
        rem[j] = r - f.exp;
        done = match_exact(f.base, g.base, cur, next);
      }
      rem[j] = r;
      if (done) return true;
    }
    return false;
  };
  return assign(0, s);
}

using SumRootCont = std::function<bool(const Subst&, const Rational&, const Expr&)>;

// Find the pattern's terms among the target's terms under a common scale and
// a common cofactor: target ⊇ scale * cofactor * pattern.
bool sum_root(const Expr& p, const Expr& t, const SumRootCont& k) {
  const std::vector<TermRec> pterms = terms_of(p);
  const std::vector<TermRec> tterms = terms_of(t);
  std::vector<TermRec> regular;
  std::vector<std::string> wild_terms;
  for (const TermRec& r : pterms) {
    if (r.mono.op() == Op::Wild)
      wild_terms.push_back(r.mono.name());
    else
      regular.push_back(r);
  }
  std::size_t anchor = regular.size();
  for (std::size_t i = 0; i < regular.size(); ++i) {
    if (regular[i].mono.is_int(1)) continue;
    if (anchor == regular.size() || regular[i].mono.size() > regular[anchor].mono.size())
      anchor = i;
  }
  if (anchor == regular.size()) return false;
  std::vector<char> used(tterms.size(), 0);

  std::function<bool(std::size_t, const Subst&, const Rational&, const Expr&)> rest =
      [&](std::size_t i, const Subst& cur, const Rational& lam, const Expr& cof) -> bool {
    if (i == anchor) return rest(i + 1, cur, lam, cof);
    if (i >= regular.size()) {
      for (const auto& w : wild_terms)
        if (!cur.count(w)) return false;
      return k(cur, lam, cof);
    }
    const TermRec& r = regular[i];
    for (std::size_t j = 0; j < tterms.size(); ++j) {
      if (used[j] || tterms[j].coef != lam * r.coef) continue;
      used[j] = 1;
      bool done = false;
      if (r.mono.is_int(1)) {
        done = tterms[j].mono == cof && rest(i + 1, cur, lam, cof);
      } else if (!tterms[j].mono.is_int(1)) {
        done = product_root(r.mono, tterms[j].mono, cur,
                            [&](const Subst& s2, const Expr& c2) {
                              return c2 == cof && rest(i + 1, s2, lam, cof);
                            });
      }
      used[j] = 0;
      if (done) return true;
    }
    return false;
  };

  const TermRec& a = regular[anchor];
  for (std::size_t j = 0; j < tterms.size(); ++j) {
    if (tterms[j].mono.is_int(1)) continue;
    const Rational lam = tterms[j].coef / a.coef;
    used[j] = 1;
    const bool done = product_root(a.mono, tterms[j].mono, Subst{},
                                   [&](const Subst& s1, const Expr& cof) {
                                     return rest(0, s1, lam, cof);
                                   });
    used[j] = 0;
    if (done) return true;
  }
  return false;
}

// lam * cof * x, distributed over the terms of x so that it can cancel
// against the terms of a canonical sum.
Expr distribute(const Rational& lam, const Expr& cof, const Expr& x) {
  std::vector<Term> out;
  for (const TermRec& r : terms_of(x))
    out.push_back({lam * r.coef, canonical_mul(cof, r.mono)});
  return canonical_sum(out, 0);
}

struct CompiledRule {
  const RewriteRule* rule;
  Expr pattern;  // canonical
  bool root_mode;
};

bool guard_ok(const RewriteRule& r, const Subst& s) {
  for (const auto& v : r.nonneg) {
    auto it = s.find(v);
    if (it == s.end() || !provably_nonneg(it->second)) return false;
  }
  return true;
}

std::optional<Expr> apply_rule(const CompiledRule& cr, const Expr& t) {
  const std::size_t limit = t.size();
  std::optional<Expr> found;
  try {
    if (cr.root_mode) {
      sum_root(cr.pattern, t, [&](const Subst& s, const Rational& lam, const Expr& cof) {
        if (!guard_ok(*cr.rule, s)) return false;
        const Expr ps = instantiate(cr.pattern, s);
        const Expr rs = instantiate(cr.rule->replacement, s);
        const Expr rest = canonical_sub(t, distribute(lam, cof, ps));
        // The replacement may be kept as one factored term or spread over
        // the cofactor; keep whichever is smaller.
        Expr out = canonical_add(rest, canonical_scale(lam, canonical_mul(cof, rs)));
        const Expr spread = canonical_add(rest, distribute(lam, cof, rs));
        if (spread.size() < out.size()) out = spread;
        if (out.size() >= limit) return false;
        found = out;
        return true;
      });
    } else {
      match_exact(cr.pattern, t, Subst{}, [&](const Subst& s) {
        if (!guard_ok(*cr.rule, s)) return false;
        Expr out = instantiate(cr.rule->replacement, s);
        if (out.size() >= limit) return false;
        found = out;
        return true;
      });
    }
  } catch (const ArithmeticOverflow&) {
    return std::nullopt;
  }
  return found;
}

class Simplifier {
 public:
  explicit Simplifier(const std::vector<CompiledRule>& rules) : rules_(rules) {}

  Expr pass(const Expr& c) {
    if (is_leaf(c.op()) || as_number(c)) return c;
    if (auto it = memo_.find(c.id()); it != memo_.end()) return it->second;
    Expr out = at_node(rebuild(c));
    memo_.emplace(c.id(), out);
    keep_.push_back(c);
    return out;
  }

 private:
  Expr rebuild(const Expr& c) {
    try {
      if (is_sum_root(c)) {
        const SumForm sf = sum_form(c);
        std::vector<Term> ts;
        ts.reserve(sf.terms.size());
        for (const Term& t : sf.terms) ts.push_back({t.coef, pass(t.mono)});
        return canonical_sum(ts, sf.constant);
      }
      if (is_product_root(c)) {
        const ProductForm pf = product_form(c);
        std::vector<Factor> fs;
        fs.reserve(pf.factors.size());
        for (const Factor& f : pf.factors) fs.push_back({pass(f.base), f.exp});
        return canonical_product(pf.coef, fs);
      }
      if (is_unary(c.op())) return canonicalize(unary(c.op(), pass(c.child())));
      return canonicalize(binary(c.op(), pass(c.lhs()), pass(c.rhs())));
    } catch (const ArithmeticOverflow&) {
      return c;
    }
  }

  Expr at_node(Expr t) {
    for (int round = 0; round < 64; ++round) {
      bool fired = false;
      for (const CompiledRule& r : rules_) {
        if (auto out = apply_rule(r, t)) {
          t = *out;
          fired = true;
          break;
        }
      }
      if (!fired) break;
    }
    return t;
  }

  const std::vector<CompiledRule>& rules_;
  std::unordered_map<const void*, Expr> memo_;
  std::vector<Expr> keep_;
};

std::vector<CompiledRule> compile(const std::vector<RewriteRule>& rules) {
  std::vector<CompiledRule> out;
  out.reserve(rules.size());
  for (const RewriteRule& r : rules) {
    Expr p = canonicalize(r.pattern);
    const bool root = is_sum_root(p) || is_product_root(p);
    out.push_back({&r, p, root});
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::mutex g_rules_mutex;
std::shared_ptr<const RuleSet> g_rules;

}  // namespace

std::vector<std::string> RewriteRule::fresh_variables() const {
  std::set<std::string> in_pattern, in_repl;
  collect_wilds(pattern, in_pattern);
  collect_wilds(replacement, in_repl);
  std::vector<std::string> out;
  for (const auto& n : in_repl)
    if (!in_pattern.count(n)) out.push_back(n);
  return out;
}

void RuleSet::add(RewriteRule rule) {
  (rule.direction == RuleDirection::Simplify ? simplify_ : uglify_)
      .push_back(std::move(rule));
}

RuleSet RuleSet::parse(const std::string& text) {
  static const std::regex name_re(R"(^([A-Za-z_][A-Za-z0-9_\-]*)\s*:\s*(.*)$)");
  static const std::regex guard_re(R"(^(.*)\sif\s+nonneg\(\s*\?([A-Za-z_][A-Za-z0-9_]*)\s*\)\s*$)");
  RuleSet out;
  RuleDirection dir = RuleDirection::Simplify;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  ParseOptions popts;
  popts.allow_wild = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[simplify]") {
      dir = RuleDirection::Simplify;
      continue;
    }
    if (line == "[uglify]") {
      dir = RuleDirection::Uglify;
      continue;
    }
    auto fail = [&](const std::string& why) {
      throw RuleError("rules line " + std::to_string(lineno) + ": " + why);
    };
    RewriteRule rule;
    rule.direction = dir;
    std::smatch m;
    if (std::regex_match(line, m, name_re)) {
      rule.name = m[1];
      line = trim(m[2]);
    } else {
      rule.name = "rule" + std::to_string(lineno);
    }
    while (std::regex_match(line, m, guard_re)) {
      rule.nonneg.push_back(m[2]);
      line = trim(m[1]);
    }
    const auto arrow = line.find("=>");
    if (arrow == std::string::npos) fail("expected 'pattern => replacement'");
    try {
      rule.pattern = calcforge::parse(trim(line.substr(0, arrow)), popts);
      rule.replacement = calcforge::parse(trim(line.substr(arrow + 2)), popts);
    } catch (const ParseError& e) {
      fail(e.what());
    }
    out.add(std::move(rule));
  }
  return out;
}

RuleSet RuleSet::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuleError("cannot open rules file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  RuleSet rs = parse(buf.str());
  validate_rules(rs);
  return rs;
}

const std::string& builtin_rules_text() {
  static const std::string text = kDefaultRules;
  return text;
}

const RuleSet& RuleSet::builtin() {
  static const RuleSet rs = [] {
    RuleSet r = parse(builtin_rules_text());
    validate_rules(r);
    return r;
  }();
  return rs;
}

std::shared_ptr<const RuleSet> active_rules() {
  std::lock_guard<std::mutex> lock(g_rules_mutex);
  if (!g_rules) {
    if (const char* path = std::getenv("CALCFORGE_RULES"); path && *path)
      g_rules = std::make_shared<const RuleSet>(RuleSet::load_file(path));
    else
      g_rules = std::shared_ptr<const RuleSet>(&RuleSet::builtin(), [](const RuleSet*) {});
  }
  return g_rules;
}

void set_active_rules(std::shared_ptr<const RuleSet> rules) {
  std::lock_guard<std::mutex> lock(g_rules_mutex);
  g_rules = std::move(rules);
}

EquivalenceVerdict check_rule(const RewriteRule& rule, std::uint64_t seed) {
  std::set<std::string> names;
  collect_wilds(rule.pattern, names);
  collect_wilds(rule.replacement, names);
  const std::set<std::string> guarded(rule.nonneg.begin(), rule.nonneg.end());
  PointSampler sampler = [names, guarded](Rng& rng) {
    SamplePoint p;
    p.x = rng.uniform(-3.0, 3.0);
    for (const auto& n : names)
      p.wild[n] = guarded.count(n) ? rng.uniform(0.0, 3.0) : rng.uniform(-3.0, 3.0);
    return p;
  };
  return compare_sampled(rule.pattern, rule.replacement, seed, sampler);
}

void validate_rules(const RuleSet& rules, std::uint64_t seed) {
  auto check_all = [&](const std::vector<RewriteRule>& rs) {
    for (const RewriteRule& r : rs) {
      const EquivalenceVerdict v = check_rule(r, seed);
      if (!v.equivalent())
        throw RuleError("rule '" + r.name + "' failed its numeric check (" +
                        std::string(outcome_name(v.outcome)) + ")");
    }
  };
  check_all(rules.simplify_rules());
  check_all(rules.uglify_rules());
}

std::vector<Subst> match(const Expr& pattern, const Expr& target, std::size_t limit) {
  std::vector<Subst> out;
  const Expr p = canonicalize(pattern);
  const Expr t = canonicalize(target);
  try {
    match_exact(p, t, Subst{}, [&](const Subst& s) {
      out.push_back(s);
      return out.size() >= limit;
    });
  } catch (const ArithmeticOverflow&) {
  }
  return out;
}

Expr instantiate(const Expr& e, const Subst& s) {
  return canonicalize(substitute_wilds(e, s));
}

bool provably_nonneg(const Expr& e) {
  if (auto q = as_number(e)) return q->sign() >= 0;
  switch (e.op()) {
    case Op::Exp:
    case Op::Sqrt:
    case Op::Acos:
      return true;
    case Op::Pow:
      if (e.rhs().is_int() && e.rhs().value() % 2 == 0) return true;
      return provably_nonneg(e.lhs());
    case Op::Mul:
    case Op::Div:
    case Op::Add:
      return provably_nonneg(e.lhs()) && provably_nonneg(e.rhs());
    default:
      return false;
  }
}

Expr simplify(const Expr& e, const RuleSet& rules, const SimplifyOptions& opts) {
  const std::vector<CompiledRule> compiled = compile(rules.simplify_rules());
  Expr cur = canonicalize(e);
  Expr best = cur.size() <= e.size() ? cur : e;
  for (std::size_t pass = 0; pass < opts.max_passes; ++pass) {
    Simplifier s(compiled);
    Expr next = s.pass(cur);
    if (next == cur) break;
    cur = next;
    if (cur.size() <= best.size()) best = cur;
  }
  return best;
}

Expr simplify(const Expr& e) { return simplify(e, *active_rules()); }

EquivalenceVerdict is_zero(const Expr& e, std::uint64_t seed, const RuleSet& rules,
                           const OracleOptions& opts) {
  const Expr s = simplify(e, rules);
  if (s.is_int(0)) {
    EquivalenceVerdict v;
    v.outcome = Outcome::Equivalent;
    v.symbolic = true;
    return v;
  }
  auto [pos, negs] = split_signed_terms(s);
  return numeric_equiv(pos, negs, seed, opts);
}

EquivalenceVerdict is_zero(const Expr& e, std::uint64_t seed, const OracleOptions& opts) {
  return is_zero(e, seed, *active_rules(), opts);
}

}  // namespace calcforge
