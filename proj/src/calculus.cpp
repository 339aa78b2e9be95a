#include "calcforge/calculus.hpp"

#include <algorithm>
#include <unordered_map>

#include "calcforge/canonical.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rewrite.hpp"

namespace calcforge {

namespace {

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

std::uint8_t mask_for(Op leaf) {
  switch (leaf) {
    case Op::Var: return kHasVar;
    case Op::Param: return kHasParam;
    case Op::Y: return kHasY;
    case Op::DY: return kHasDY;
    default: return 0;
  }
}

Expr C(const Expr& raw) { return canonicalize(raw); }

Expr mul3(const Expr& a, const Expr& b, const Expr& c) {
  return canonical_mul(canonical_mul(a, b), c);
}

// ---------------------------------------------------------------------------
// Differentiation over canonical structure, with canonical arithmetic.

class Differentiator {
 public:
  explicit Differentiator(Op wrt) : wrt_(wrt), mask_(mask_for(wrt)) {}

  Expr d(const Expr& c) {
    if (!(c.leaves() & mask_)) return integer(0);
    if (is_leaf(c.op())) return integer(c.op() == wrt_ ? 1 : 0);
    if (auto it = memo_.find(c.id()); it != memo_.end()) return it->second;
    Expr out = compute(c);
    memo_.emplace(c.id(), out);
    keep_.push_back(c);
    return out;
  }

 private:
  Expr compute(const Expr& c) {
    if (is_sum_root(c)) {
      const SumForm sf = sum_form(c);
      std::vector<Term> out;
      for (const Term& t : sf.terms) out.push_back({t.coef, d(t.mono)});
      return canonical_sum(out, 0);
    }
    if (is_product_root(c)) {
      const ProductForm pf = product_form(c);
      std::vector<Term> out;
      for (std::size_t i = 0; i < pf.factors.size(); ++i) {
        const Factor& fi = pf.factors[i];
        if (!(fi.base.leaves() & mask_)) continue;
        std::vector<Factor> rest = pf.factors;
        rest[i].exp -= 1;
        Expr term = canonical_product(pf.coef * Rational(fi.exp), rest);
        out.push_back({1, canonical_mul(term, d(fi.base))});
      }
      return canonical_sum(out, 0);
    }
    if (c.op() == Op::Pow) {
      const Expr& b = c.lhs();
      const Expr& q = c.rhs();
      const bool db = b.leaves() & mask_;
      const bool dq = q.leaves() & mask_;
      if (!dq) {
        Expr lowered = C(binary(Op::Pow, b, canonical_sub(q, integer(1))));
        return mul3(q, lowered, d(b));
      }
      if (!db) return mul3(c, C(log(b)), d(q));
      Expr inner = canonical_add(canonical_mul(d(q), C(log(b))),
                                 canonical_div(canonical_mul(q, d(b)), b));
      return canonical_mul(c, inner);
    }
    const Expr& u = c.child();
    const Expr du = d(u);
    switch (c.op()) {
      case Op::Neg: return canonical_scale(-1, du);
      case Op::Sin: return canonical_mul(du, C(cos(u)));
      case Op::Cos: return canonical_scale(-1, canonical_mul(du, C(sin(u))));
      case Op::Tan: return canonical_mul(du, canonical_pow(C(cos(u)), -2));
      case Op::Asin:
        return canonical_mul(du, canonical_pow(C(sqrt(integer(1) - pow(u, 2))), -1));
      case Op::Acos:
        return canonical_scale(
            -1, canonical_mul(du, canonical_pow(C(sqrt(integer(1) - pow(u, 2))), -1)));
      case Op::Atan:
        return canonical_mul(du, canonical_pow(C(pow(u, 2) + integer(1)), -1));
      case Op::Exp: return canonical_mul(du, c);
      case Op::Log: return canonical_div(du, u);
      case Op::Sqrt: return canonical_div(du, canonical_scale(2, c));
      default: return integer(0);
    }
  }

  Op wrt_;
  std::uint8_t mask_;
  std::unordered_map<const void*, Expr> memo_;
  std::vector<Expr> keep_;
};

// ---------------------------------------------------------------------------
// Heuristic integration.

struct Linear {
  Rational a;
  Rational b;
};

// u = a*x + b with a != 0.
std::optional<Linear> linear(const Expr& u) {
  if (u.op() == Op::Var) return Linear{1, 0};
  const SumForm sf = sum_form(u);
  if (sf.terms.size() != 1 || sf.terms[0].mono.op() != Op::Var) return std::nullopt;
  return Linear{sf.terms[0].coef, sf.constant};
}

struct TableEntry {
  Expr pattern;  // in ?u
  Expr anti;     // antiderivative with respect to ?u
};

const std::vector<TableEntry>& primitive_table() {
  static const std::vector<TableEntry> table = [] {
    const char* rows[][2] = {
        {"sin(?u)", "-cos(?u)"},
        {"cos(?u)", "sin(?u)"},
        {"tan(?u)", "-log(cos(?u))"},
        {"exp(?u)", "exp(?u)"},
        {"log(?u)", "?u*log(?u) - ?u"},
        {"sqrt(?u)", "2/3*?u*sqrt(?u)"},
        {"1/sqrt(?u)", "2*sqrt(?u)"},
        {"asin(?u)", "?u*asin(?u) + sqrt(1 - ?u^2)"},
        {"acos(?u)", "?u*acos(?u) - sqrt(1 - ?u^2)"},
        {"atan(?u)", "?u*atan(?u) - log(?u^2 + 1)/2"},
        {"1/cos(?u)^2", "tan(?u)"},
        {"1/sin(?u)^2", "-cos(?u)/sin(?u)"},
        {"sin(?u)^2", "?u/2 - sin(2*?u)/4"},
        {"cos(?u)^2", "?u/2 + sin(2*?u)/4"},
        {"tan(?u)^2", "tan(?u) - ?u"},
        {"sin(?u)/cos(?u)^2", "1/cos(?u)"},
        {"cos(?u)/sin(?u)^2", "-1/sin(?u)"},
        {"1/sqrt(1 - ?u^2)", "asin(?u)"},
        {"1/(?u^2 + 1)", "atan(?u)"},
        {"?u^2/(?u^2 + 1)", "?u - atan(?u)"},
        {"sin(?u)*cos(?u)", "sin(?u)^2/2"},
    };
    ParseOptions po;
    po.allow_wild = true;
    std::vector<TableEntry> out;
    for (const auto& row : rows)
      out.push_back({canonicalize(parse(row[0], po)), parse(row[1], po)});
    return out;
  }();
  return table;
}

const Expr& u_wild() {
  static const Expr e = wild("u");
  return e;
}

// Replace occurrences of u in e by t, including powers u^k hidden in
// canonical merging (b^(jk) for u = b^j, exp(k*a) for u = exp(a)).
Expr replace_subterm(const Expr& e, const Expr& u, const Expr& t) {
  if (e == u) return t;
  if (!e.has_var()) return e;
  if (e.op() == Op::Pow && e.rhs().is_int()) {
    if (u.op() == Op::Pow && u.rhs().is_int() && u.lhs() == e.lhs() &&
        e.rhs().value() % u.rhs().value() == 0)
      return pow(t, integer(e.rhs().value() / u.rhs().value()));
    if (e.lhs() == u) return pow(t, e.rhs());
  }
  if (e.op() == Op::Exp && u.op() == Op::Exp) {
    if (auto k = as_number(canonical_div(e.child(), u.child())); k && k->is_integer())
      return pow(t, integer(k->num()));
  }
  if (is_leaf(e.op())) return e;
  if (is_unary(e.op())) return unary(e.op(), replace_subterm(e.child(), u, t));
  return binary(e.op(), replace_subterm(e.lhs(), u, t), replace_subterm(e.rhs(), u, t));
}

bool is_log_type(const Expr& e) {
  switch (e.op()) {
    case Op::Log:
    case Op::Atan:
    case Op::Asin:
    case Op::Acos:
      return linear(e.child()).has_value();
    default:
      return false;
  }
}

class Integrator {
 public:
  explicit Integrator(const IntegrateOptions& opts) : opts_(opts) {}

  std::optional<Expr> integrate(const Expr& c, int depth) {
    if (++work_ > kWorkBudget || depth > opts_.max_depth) return std::nullopt;
    if (is_sum_root(c)) {
      std::vector<Term> out;
      const SumForm sf = sum_form(c);
      for (const Term& t : sf.terms) {
        auto r = monomial(t.mono, depth);
        if (!r) return std::nullopt;
        out.push_back({t.coef, *r});
      }
      if (!sf.constant.is_zero()) out.push_back({sf.constant, var_x()});
      return canonical_sum(out, 0);
    }
    const ProductForm pf = product_form(c);
    auto r = monomial(emit_product(1, pf.factors), depth);
    if (!r) return std::nullopt;
    return canonical_scale(pf.coef, *r);
  }

 private:
  static constexpr int kWorkBudget = 4000;

  std::optional<Expr> monomial(const Expr& m, int depth) {
    if (!m.has_var()) return canonical_mul(m, var_x());
    if (auto r = table(m)) return r;
    if (auto r = power(m)) return r;
    if (auto r = substitution(m, depth)) return r;
    if (auto r = by_parts(m, depth)) return r;
    const Expr ex = expand(m, 64);
    if (ex != m && is_sum_root(ex)) return integrate(ex, depth + 1);
    return std::nullopt;
  }

  std::optional<Expr> table(const Expr& m) {
    for (const TableEntry& row : primitive_table()) {
      for (const Subst& s : match(row.pattern, m, 4)) {
        auto lin = linear(s.at("u"));
        if (!lin) continue;
        return canonical_scale(Rational(1) / lin->a, instantiate(row.anti, s));
      }
    }
    return std::nullopt;
  }

  std::optional<Expr> power(const Expr& m) {
    Expr base;
    Rational q;
    if (m.op() == Op::Pow && !m.rhs().is_int()) {
      auto e = as_number(m.rhs());
      if (!e) return std::nullopt;
      base = m.lhs();
      q = *e;
    } else {
      const ProductForm pf = product_form(m);
      if (pf.factors.size() != 1 || !pf.coef.is_one()) return std::nullopt;
      base = pf.factors[0].base;
      q = Rational(pf.factors[0].exp);
    }
    auto lin = linear(base);
    if (!lin) return std::nullopt;
    if (q == Rational(-1)) return canonical_scale(Rational(1) / lin->a, C(log(base)));
    const Rational q1 = q + Rational(1);
    Expr raised = q1.is_integer() ? canonical_pow(base, q1.num())
                                  : C(binary(Op::Pow, base, number(q1)));
    return canonical_scale(Rational(1) / (lin->a * q1), raised);
  }

  std::optional<Expr> substitution(const Expr& m, int depth) {
    std::vector<Expr> candidates;
    for (const Expr& s : subterms(m)) {
      if (s == m || !s.has_var() || linear(s)) continue;
      bool seen = false;
      for (const Expr& c : candidates) seen = seen || c == s;
      if (!seen) candidates.push_back(s);
      if (candidates.size() >= 12) break;
    }
    for (const Expr& u : candidates) {
      const Expr du = differentiate(u);
      if (du.is_int(0)) continue;
      const Expr ratio = canonical_div(m, du);
      const Expr g = C(replace_subterm(ratio, u, u_wild()));
      if (g.has_var()) continue;
      const Expr gx = instantiate(g, Subst{{"u", var_x()}});
      if (gx == m) continue;
      auto G = integrate(gx, depth + 1);
      if (!G) continue;
      return C(substitute(*G, Op::Var, u));
    }
    return std::nullopt;
  }

  std::optional<Expr> by_parts(const Expr& m, int depth) {
    const ProductForm pf = product_form(m);
    std::int64_t n = 0;
    std::vector<Factor> rest;
    for (const Factor& f : pf.factors) {
      if (f.base.op() == Op::Var && f.exp >= 1)
        n = f.exp;
      else
        rest.push_back(f);
    }
    const Expr other = canonical_product(pf.coef, rest);
    // x^n * L with L of log type: differentiate L, integrate x^n.
    if (is_log_type(other)) {
      const Expr xn1 = canonical_scale(Rational(1, n + 1), canonical_pow(var_x(), n + 1));
      auto tail = integrate(expand(canonical_mul(xn1, differentiate(other))), depth + 1);
      if (!tail) return std::nullopt;
      return canonical_sub(canonical_mul(other, xn1), *tail);
    }
    if (n == 0) return std::nullopt;
    // x^n * B: integrate B, differentiate x^n.
    auto FB = integrate(other, depth + 1);
    if (!FB) return std::nullopt;
    const Expr xn = canonical_pow(var_x(), n);
    const Expr dxn = canonical_scale(Rational(n), canonical_pow(var_x(), n - 1));
    auto tail = integrate(expand(canonical_mul(dxn, *FB)), depth + 1);
    if (!tail) return std::nullopt;
    return canonical_sub(expand(canonical_mul(xn, *FB)), *tail);
  }

  const IntegrateOptions& opts_;
  int work_ = 0;
};

// ---------------------------------------------------------------------------
// Parameter isolation and ODE construction.

// Divide out the power of each non-constant base common to every term
// (a missing base, or the constant term, counts as exponent 0), a shared
// exp factor, and the content. The sign makes the first y' term positive.
// Bases carrying y or y' are only cleared from denominators.
Expr clear_common_factor(const Expr& eq) {
  Expr cur = expand(eq);
  const SumForm sf = sum_form(cur);
  if (sf.terms.empty()) return cur;
  std::vector<ProductForm> forms;
  for (const Term& t : sf.terms) forms.push_back(product_form(t.mono));
  std::vector<Factor> scale;
  std::vector<Expr> bases;
  for (const ProductForm& pf : forms)
    for (const Factor& f : pf.factors)
      if (f.base.op() != Op::Exp && std::find(bases.begin(), bases.end(), f.base) == bases.end())
        bases.push_back(f.base);
  for (const Expr& b : bases) {
    std::int64_t lo = sf.constant.is_zero() ? INT64_MAX : 0;
    for (const ProductForm& pf : forms) {
      std::int64_t k = 0;
      for (const Factor& f : pf.factors)
        if (f.base == b) k = f.exp;
      lo = std::min(lo, k);
    }
    // Positive common powers are only divided out when free of y and y'.
    if (lo < 0 || (lo > 0 && lo != INT64_MAX && !(b.leaves() & (kHasY | kHasDY))))
      scale.push_back({b, -lo});
  }
  Expr factor = canonical_product(1, scale);
  if (sf.constant.is_zero()) {
    std::optional<Expr> exp_arg;
    bool all_exp = true;
    for (const ProductForm& pf : forms) {
      bool has = false;
      for (const Factor& f : pf.factors) {
        if (f.base.op() != Op::Exp) continue;
        has = true;
        if (!exp_arg) exp_arg = f.base.child();
      }
      all_exp = all_exp && has;
    }
    if (all_exp && exp_arg) factor = canonical_mul(factor, C(exp(neg(*exp_arg))));
  }
  cur = expand(canonical_mul(factor, cur));
  const SumForm sf2 = sum_form(cur);
  Rational g = sf2.constant;
  std::optional<int> lead;
  for (const Term& t : sf2.terms) {
    g = rational_gcd(g, t.coef);
    if (!lead && (t.mono.leaves() & kHasDY)) lead = t.coef.sign();
  }
  if (g.is_zero()) return cur;
  if (lead.value_or(1) < 0) g = -g;
  return canonical_scale(Rational(1) / g, cur);
}

}  // namespace

Expr differentiate(const Expr& e, Op wrt) {
  try {
    Differentiator d(wrt);
    return d.d(canonicalize(e));
  } catch (const ArithmeticOverflow&) {
    // Fall back to an unsimplified derivative of the raw tree.
    Differentiator d(wrt);
    return d.d(e);
  }
}

std::optional<Expr> integrate_heuristic(const Expr& e, const IntegrateOptions& opts) {
  try {
    const Expr start = opts.simplify_input ? simplify(e) : canonicalize(e);
    Integrator in(opts);
    auto F = in.integrate(start, 0);
    if (!F) return std::nullopt;
    Expr out = simplify(*F);
    if (opts.verify) {
      const EquivalenceVerdict v = numeric_equiv(differentiate(out), e, opts.seed);
      if (!v.equivalent()) return std::nullopt;
    }
    return out;
  } catch (const ArithmeticOverflow&) {
    return std::nullopt;
  }
}

std::string_view invert_failure_name(InvertFailure f) {
  switch (f) {
    case InvertFailure::None: return "None";
    case InvertFailure::ParamCount: return "ParamCount";
    case InvertFailure::NoInverse: return "NoInverse";
    case InvertFailure::BranchMismatch: return "BranchMismatch";
    case InvertFailure::EmptyDomain: return "EmptyDomain";
  }
  return "?";
}

bool has_injective_path(const Expr& f) {
  if (count_leaf(f, Op::Param) != 1) return false;
  Expr cur = f;
  while (cur.op() != Op::Param) {
    switch (cur.op()) {
      case Op::Sin:
      case Op::Cos:
      case Op::Tan:
        return false;
      case Op::Pow:
        if (cur.lhs().has_param() && !(cur.rhs().is_int() && cur.rhs().value() % 2 != 0))
          return false;
        break;
      default:
        break;
    }
    if (is_unary(cur.op()))
      cur = cur.child();
    else
      cur = cur.lhs().has_param() ? cur.lhs() : cur.rhs();
  }
  return true;
}

Inversion solve_for_parameter(const Expr& f, std::uint64_t seed) {
  Inversion out;
  if (count_leaf(f, Op::Param) != 1 || (f.leaves() & (kHasY | kHasDY | kHasWild))) {
    out.failure = InvertFailure::ParamCount;
    return out;
  }
  Expr r = var_y();
  Expr cur = f;
  while (cur.op() != Op::Param) {
    if (is_binary(cur.op())) {
      const bool left = cur.lhs().has_param();
      const Expr& other = left ? cur.rhs() : cur.lhs();
      switch (cur.op()) {
        case Op::Add: r = r - other; break;
        case Op::Sub: r = left ? r + other : other - r; break;
        case Op::Mul: r = r / other; break;
        case Op::Div: r = left ? r * other : other / r; break;
        case Op::Pow:
          if (left)
            r = other.is_int(2) ? sqrt(r) : pow(r, integer(1) / other);
          else
            r = log(r) / log(other);
          break;
        default:
          out.failure = InvertFailure::NoInverse;
          return out;
      }
      cur = left ? cur.lhs() : cur.rhs();
      continue;
    }
    switch (cur.op()) {
      case Op::Neg: r = neg(r); break;
      case Op::Sin: r = asin(r); break;
      case Op::Cos: r = acos(r); break;
      case Op::Tan: r = atan(r); break;
      case Op::Asin: r = sin(r); break;
      case Op::Acos: r = cos(r); break;
      case Op::Atan: r = tan(r); break;
      case Op::Exp: r = log(r); break;
      case Op::Log: r = exp(r); break;
      case Op::Sqrt: r = pow(r, 2); break;
      default:
        out.failure = InvertFailure::NoInverse;
        return out;
    }
    cur = cur.child();
  }
  const Expr F = simplify(r);
  const Expr back = substitute(F, Op::Y, f);
  const EquivalenceVerdict v = numeric_equiv(back, param_c(), seed);
  if (v.equivalent()) {
    out.F = F;
  } else {
    out.failure = v.not_equivalent() ? InvertFailure::BranchMismatch : InvertFailure::EmptyDomain;
  }
  return out;
}

Expr ode_residual(const Expr& equation, const Expr& sol) {
  const Expr dsol = differentiate(sol);
  return canonicalize(substitute(substitute(equation, Op::DY, dsol), Op::Y, sol));
}

EquivalenceVerdict ode_residual_check(const Expr& equation, const Expr& sol,
                                      std::uint64_t seed, std::size_t c_values,
                                      std::size_t x_points) {
  const Expr residual = ode_residual(equation, sol);
  EquivalenceVerdict total;
  const Expr s = simplify(residual);
  if (s.is_int(0)) {
    total.outcome = Outcome::Equivalent;
    total.symbolic = true;
    return total;
  }
  auto [pos, negs] = split_signed_terms(s);
  OracleOptions opts;
  opts.quorum = x_points;
  opts.min_valid = std::min<std::size_t>(opts.min_valid, x_points);
  Rng rng(substream_seed(seed, 0, 0x0de));
  std::size_t rows = 0;
  const bool uses_c = sol.has_param() || equation.has_param();
  // Draw parameter values until enough rows reach their quorum; values
  // with an empty domain are replaced, up to a bounded number of draws.
  for (std::size_t attempt = 0; rows < c_values && attempt < 8 * c_values; ++attempt) {
    const double c = rng.uniform(-opts.c_half_width, opts.c_half_width);
    const double w = opts.x_half_width;
    PointSampler sampler = [c, w, uses_c](Rng& r) {
      SamplePoint p;
      p.x = r.bernoulli(0.5) ? r.uniform(-w, w) : r.cauchy();
      if (uses_c) p.c = c;
      return p;
    };
    const EquivalenceVerdict v = compare_sampled(pos, negs, seed + attempt, sampler, opts);
    total.points_tested += v.points_tested;
    total.draws += v.draws;
    if (v.not_equivalent()) {
      total.outcome = Outcome::NotEquivalent;
      total.witness = v.witness;
      return total;
    }
    if (v.equivalent()) ++rows;
  }
  if (rows >= c_values) {
    total.outcome = Outcome::Equivalent;
  } else {
    total.reason = "only " + std::to_string(rows) + " parameter values reached quorum";
  }
  return total;
}

OdeResult make_first_order_ode(const Expr& f, std::uint64_t seed) {
  OdeResult out;
  const Inversion inv = solve_for_parameter(f, seed);
  if (!inv.ok()) {
    out.failure = inv.failure;
    return out;
  }
  const Expr& F = *inv.F;
  try {
    const Expr fx = differentiate(F, Op::Var);
    const Expr fy = differentiate(F, Op::Y);
    const Expr raw = canonical_add(fx, canonical_mul(fy, var_dy()));
    Expr eq = simplify(clear_common_factor(raw));
    if (const Expr plain = simplify(raw); plain.size() < eq.size()) eq = plain;
    if (!(eq.leaves() & kHasDY)) {
      out.failure = InvertFailure::NoInverse;
      return out;
    }
    const EquivalenceVerdict v = ode_residual_check(eq, f, seed);
    if (!v.equivalent()) {
      out.failure = v.not_equivalent() ? InvertFailure::BranchMismatch
                                       : InvertFailure::EmptyDomain;
      return out;
    }
    out.problem = OdeProblem{eq, f, F};
  } catch (const ArithmeticOverflow&) {
    out.failure = InvertFailure::NoInverse;
  }
  return out;
}

}  // namespace calcforge
