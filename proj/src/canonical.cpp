#include "calcforge/canonical.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

namespace calcforge {

namespace {

bool is_sum_root(const Expr& e) {
  return e.op() == Op::Add || e.op() == Op::Sub;
}

// A pow with integer exponent over a numeric base survives canonicalization
// only when the power cannot be folded (0^-k, or overflow). It is an atom.
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

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow();
  return r;
}

Expr chain(Op op, const std::vector<Expr>& parts) {
  Expr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = binary(op, acc, parts[i]);
  return acc;
}

class SumBuilder {
 public:
  void add(const Expr& c, const Rational& scale) {
    if (scale.is_zero()) return;
    if (auto q = as_number(c)) {
      constant_ += scale * *q;
      return;
    }
    if (is_sum_root(c)) {
      SumForm sf = sum_form(c);
      constant_ += scale * sf.constant;
      for (const Term& t : sf.terms) add_term(t.mono, scale * t.coef);
      return;
    }
    ProductForm pf = product_form(c);
    if (pf.factors.empty()) {
      constant_ += scale * pf.coef;
      return;
    }
    add_term(emit_product(1, pf.factors), scale * pf.coef);
  }

  Expr build() const {
    std::vector<Term> live;
    for (const auto& [mono, coef] : terms_)
      if (!coef.is_zero()) live.push_back({coef, mono});
    return emit(live, constant_);
  }

  static Expr emit(const std::vector<Term>& terms, const Rational& constant) {
    if (terms.empty()) return number(constant);
    Expr acc;
    bool first = true;
    for (const Term& t : terms) {
      const ProductForm pf = product_form(t.mono);
      if (first) {
        acc = emit_product(t.coef, pf.factors);
        first = false;
      } else if (t.coef.sign() < 0) {
        acc = binary(Op::Sub, acc, emit_product(-t.coef, pf.factors));
      } else {
        acc = binary(Op::Add, acc, emit_product(t.coef, pf.factors));
      }
    }
    if (constant.sign() < 0) return binary(Op::Sub, acc, number(-constant));
    if (constant.sign() > 0) return binary(Op::Add, acc, number(constant));
    return acc;
  }

 private:
  void add_term(const Expr& mono, const Rational& coef) {
    auto [it, inserted] = terms_.try_emplace(mono, coef);
    if (!inserted) it->second += coef;
  }

  Rational constant_;
  std::map<Expr, Rational, ExprLess> terms_;
};

const Expr& zero_power_atom() {
  static const Expr e = binary(Op::Pow, integer(0), integer(-1));
  return e;
}

// Split a canonical sum into content * primitive part.
std::pair<Rational, Expr> primitive(const Expr& sum) {
  SumForm sf = sum_form(sum);
  Rational g = sf.constant;
  for (const Term& t : sf.terms) g = rational_gcd(g, t.coef);
  if (!sf.terms.empty() && sf.terms.front().coef.sign() < 0) g = -g;
  if (g.is_one()) return {g, sum};
  SumBuilder b;
  b.add(sum, Rational(1) / g);
  return {g, b.build()};
}

class ProductBuilder {
 public:
  void mul(const Expr& c, std::int64_t k) {
    if (k == 0) return;
    if (auto q = as_number(c)) {
      if (q->is_zero()) {
        if (k > 0)
          zero_ = true;
        else
          mul_factor(zero_power_atom(), -k);
        return;
      }
      coef_ *= q->pow(k);
      return;
    }
    if (is_sum_root(c)) {
      auto [g, prim] = primitive(c);
      coef_ *= g.pow(k);
      mul_factor(prim, k);
      return;
    }
    if (is_product_root(c)) {
      ProductForm pf = product_form(c);
      coef_ *= pf.coef.pow(k);
      for (const Factor& f : pf.factors) mul_factor(f.base, checked_mul(f.exp, k));
      return;
    }
    mul_factor(c, k);
  }

  Expr build() const {
    if (zero_ || coef_.is_zero()) return integer(0);
    std::map<Expr, std::int64_t, ExprLess> merged;
    for (const auto& [b, e] : factors_)
      if (e != 0) merged.emplace(b, e);
    if (has_exp_) {
      Expr arg = exp_arg_.build();
      if (!arg.is_int(0)) merged.emplace(unary(Op::Exp, arg), 1);
    }
    if (merged.empty()) return number(coef_);
    if (merged.size() == 1 && merged.begin()->second == 1) {
      const Expr& base = merged.begin()->first;
      if (is_sum_root(base)) {
        SumBuilder s;
        s.add(base, coef_);
        return s.build();
      }
      if (coef_.is_one()) return base;
    }
    std::vector<Factor> fs;
    fs.reserve(merged.size());
    for (const auto& [b, e] : merged) fs.push_back({b, e});
    return emit_product(coef_, fs);
  }

 private:
  void mul_factor(const Expr& base, std::int64_t k) {
    if (base.op() == Op::Exp) {
      exp_arg_.add(base.child(), k);
      has_exp_ = true;
      return;
    }
    auto [it, inserted] = factors_.try_emplace(base, k);
    if (!inserted) it->second = checked_add(it->second, k);
  }

  Rational coef_ = 1;
  bool zero_ = false;
  std::map<Expr, std::int64_t, ExprLess> factors_;
  SumBuilder exp_arg_;
  bool has_exp_ = false;
};

std::optional<std::int64_t> exact_sqrt(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  if (r * r == v) return r;
  return std::nullopt;
}

Expr negate(const Expr& c) { return canonical_scale(-1, c); }

Expr canon_unary(Op f, const Expr& a) {
  if (auto q = as_number(a)) {
    switch (f) {
      case Op::Sin:
      case Op::Tan:
      case Op::Asin:
      case Op::Atan:
        if (q->is_zero()) return integer(0);
        break;
      case Op::Cos:
        if (q->is_zero()) return integer(1);
        break;
      case Op::Acos:
        if (q->is_one()) return integer(0);
        break;
      case Op::Exp:
        if (q->is_zero()) return integer(1);
        break;
      case Op::Log:
        if (q->is_one()) return integer(0);
        break;
      case Op::Sqrt:
        if (q->sign() >= 0) {
          auto n = exact_sqrt(q->num());
          auto d = exact_sqrt(q->den());
          if (n && d) return number(Rational(*n, *d));
        }
        break;
      default:
        break;
    }
  }
  // Parity: odd functions pull the sign out, cos drops it.
  if (has_negative_lead(a)) {
    switch (f) {
      case Op::Sin:
      case Op::Tan:
      case Op::Asin:
      case Op::Atan:
        return negate(unary(f, negate(a)));
      case Op::Cos:
        return unary(f, negate(a));
      default:
        break;
    }
  }
  return unary(f, a);
}

Expr canon_pow(const Expr& b, const Expr& x) {
  if (x.is_int()) return canonical_pow(b, x.value());
  if (b.is_int(1)) return integer(1);
  if (b.op() == Op::Exp) return canon_unary(Op::Exp, canonical_mul(b.child(), x));
  if (b.is_int(0)) {
    if (auto q = as_number(x); q && q->sign() > 0) return integer(0);
  }
  return binary(Op::Pow, b, x);
}

class Canonicalizer {
 public:
  Expr run(const Expr& e) {
    if (is_leaf(e.op())) return e;
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr out = compute(e);
    memo_.emplace(e.id(), out);
    keep_.push_back(e);
    return out;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::Add:
      case Op::Sub: {
        SumBuilder s;
        s.add(run(e.lhs()), 1);
        s.add(run(e.rhs()), e.op() == Op::Add ? 1 : -1);
        return s.build();
      }
      case Op::Neg: {
        SumBuilder s;
        s.add(run(e.child()), -1);
        return s.build();
      }
      case Op::Mul:
      case Op::Div: {
        ProductBuilder p;
        p.mul(run(e.lhs()), 1);
        p.mul(run(e.rhs()), e.op() == Op::Mul ? 1 : -1);
        return p.build();
      }
      case Op::Pow:
        return canon_pow(run(e.lhs()), run(e.rhs()));
      default:
        return canon_unary(e.op(), run(e.child()));
    }
  }

  std::unordered_map<const void*, Expr> memo_;
  std::vector<Expr> keep_;  // pins memo keys
};

}  // namespace

std::optional<Rational> as_number(const Expr& e) {
  if (e.is_int()) return Rational(e.value());
  if (e.op() == Op::Div && e.lhs().is_int() && e.rhs().is_int() &&
      e.rhs().value() != 0)
    return Rational(e.lhs().value(), e.rhs().value());
  return std::nullopt;
}

Expr number(const Rational& q) {
  if (q.is_integer()) return integer(q.num());
  return binary(Op::Div, integer(q.num()), integer(q.den()));
}

SumForm sum_form(const Expr& c) {
  SumForm sf;
  // Walk the left spine of the add/sub chain.
  Expr cur = c;
  std::vector<std::pair<Expr, int>> rights;
  while (is_sum_root(cur)) {
    rights.emplace_back(cur.rhs(), cur.op() == Op::Add ? 1 : -1);
    cur = cur.lhs();
  }
  rights.emplace_back(cur, 1);
  std::map<Expr, Rational, ExprLess> terms;
  for (const auto& [t, s] : rights) {
    ProductForm pf = product_form(t);
    if (pf.factors.empty()) {
      sf.constant += Rational(s) * pf.coef;
      continue;
    }
    Expr mono = emit_product(1, pf.factors);
    auto [it, inserted] = terms.try_emplace(mono, Rational(s) * pf.coef);
    if (!inserted) it->second += Rational(s) * pf.coef;
  }
  for (const auto& [mono, coef] : terms)
    if (!coef.is_zero()) sf.terms.push_back({coef, mono});
  return sf;
}

ProductForm product_form(const Expr& c) {
  ProductForm pf;
  std::map<Expr, std::int64_t, ExprLess> fs;
  auto walk = [&](auto&& self, const Expr& e, std::int64_t sign) -> void {
    if (auto q = as_number(e)) {
      pf.coef *= q->pow(sign);
      return;
    }
    switch (e.op()) {
      case Op::Neg:
        pf.coef *= -1;
        self(self, e.child(), sign);
        return;
      case Op::Mul:
        self(self, e.lhs(), sign);
        self(self, e.rhs(), sign);
        return;
      case Op::Div:
        self(self, e.lhs(), sign);
        self(self, e.rhs(), -sign);
        return;
      case Op::Pow:
        if (e.rhs().is_int() && !as_number(e.lhs())) {
          fs[e.lhs()] += sign * e.rhs().value();
          return;
        }
        break;
      default:
        break;
    }
    fs[e] += sign;
  };
  walk(walk, c, 1);
  for (const auto& [b, e] : fs)
    if (e != 0) pf.factors.push_back({b, e});
  return pf;
}

Expr emit_product(const Rational& coef, const std::vector<Factor>& factors) {
  if (factors.empty()) return number(coef);
  if (coef.num() == -1) return unary(Op::Neg, emit_product(-coef, factors));
  std::vector<Expr> num;
  std::vector<Expr> den;
  if (coef.num() != 1) num.push_back(integer(coef.num()));
  if (coef.den() != 1) den.push_back(integer(coef.den()));
  for (const Factor& f : factors) {
    if (f.exp > 0)
      num.push_back(f.exp == 1 ? f.base : binary(Op::Pow, f.base, integer(f.exp)));
    else
      den.push_back(f.exp == -1 ? f.base
                                : binary(Op::Pow, f.base, integer(-f.exp)));
  }
  Expr n = num.empty() ? integer(1) : chain(Op::Mul, num);
  if (den.empty()) return n;
  return binary(Op::Div, n, chain(Op::Mul, den));
}

Expr canonicalize(const Expr& e) {
  try {
    Canonicalizer c;
    return c.run(e);
  } catch (const ArithmeticOverflow&) {
    return e;
  }
}

Expr canonical_add(const Expr& a, const Expr& b) {
  SumBuilder s;
  s.add(a, 1);
  s.add(b, 1);
  return s.build();
}

Expr canonical_sub(const Expr& a, const Expr& b) {
  SumBuilder s;
  s.add(a, 1);
  s.add(b, -1);
  return s.build();
}

Expr canonical_mul(const Expr& a, const Expr& b) {
  ProductBuilder p;
  p.mul(a, 1);
  p.mul(b, 1);
  return p.build();
}

Expr canonical_div(const Expr& a, const Expr& b) {
  ProductBuilder p;
  p.mul(a, 1);
  p.mul(b, -1);
  return p.build();
}

Expr canonical_scale(const Rational& q, const Expr& a) {
  SumBuilder s;
  s.add(a, q);
  return s.build();
}

Expr canonical_pow(const Expr& a, std::int64_t k) {
  ProductBuilder p;
  p.mul(a, k);
  return p.build();
}

Expr canonical_sum(const std::vector<Term>& terms, const Rational& constant) {
  SumBuilder s;
  for (const Term& t : terms) s.add(t.mono, t.coef);
  s.add(number(constant), 1);
  return s.build();
}

Expr canonical_product(const Rational& coef, const std::vector<Factor>& factors) {
  ProductBuilder p;
  p.mul(number(coef), 1);
  for (const Factor& f : factors) p.mul(f.base, f.exp);
  return p.build();
}

namespace {

// Terms of a canonical expression, the constant carried as mono 1.
std::vector<Term> all_terms(const Expr& c) {
  const SumForm sf = sum_form(c);
  std::vector<Term> out = sf.terms;
  if (!sf.constant.is_zero()) out.push_back({sf.constant, integer(1)});
  return out;
}

}  // namespace

Expr expand(const Expr& c, std::size_t max_terms) {
  try {
    std::vector<Term> out;
    for (const Term& t : all_terms(c)) {
      const ProductForm pf = product_form(t.mono);
      std::vector<Factor> plain;
      std::vector<Term> partial{{t.coef, integer(1)}};
      for (const Factor& f : pf.factors) {
        if (!is_sum_root(f.base) || f.exp < 1) {
          plain.push_back(f);
          continue;
        }
        const std::vector<Term> sum_terms = all_terms(f.base);
        for (std::int64_t k = 0; k < f.exp; ++k) {
          if (partial.size() * sum_terms.size() > max_terms) return c;
          std::vector<Term> next;
          next.reserve(partial.size() * sum_terms.size());
          for (const Term& a : partial)
            for (const Term& b : sum_terms)
              next.push_back({a.coef * b.coef, canonical_mul(a.mono, b.mono)});
          partial = all_terms(canonical_sum(next, 0));
        }
      }
      const Expr rest = canonical_product(1, plain);
      for (const Term& a : partial) out.push_back({a.coef, canonical_mul(a.mono, rest)});
      if (out.size() > 4 * max_terms) return c;
    }
    return canonical_sum(out, 0);
  } catch (const ArithmeticOverflow&) {
    return c;
  }
}

bool has_negative_lead(const Expr& c) {
  if (auto q = as_number(c)) return q->sign() < 0;
  if (is_sum_root(c)) {
    SumForm sf = sum_form(c);
    if (sf.terms.empty()) return sf.constant.sign() < 0;
    return sf.terms.front().coef.sign() < 0;
  }
  if (is_product_root(c)) return product_form(c).coef.sign() < 0;
  return false;
}

}  // namespace calcforge
