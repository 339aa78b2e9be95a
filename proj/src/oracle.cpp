#include "calcforge/oracle.hpp"

#include <cmath>

#include "calcforge/canonical.hpp"
#include "calcforge/eval.hpp"

namespace calcforge {

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Equivalent: return "Equivalent";
    case Outcome::NotEquivalent: return "NotEquivalent";
    case Outcome::Undetermined: return "Undetermined";
  }
  return "?";
}

PointSampler default_sampler(const OracleOptions& opts, bool with_param) {
  const double w = opts.x_half_width;
  const double cw = opts.c_half_width;
  return [w, cw, with_param](Rng& rng) {
    SamplePoint p;
    p.x = rng.bernoulli(0.5) ? rng.uniform(-w, w) : rng.cauchy();
    if (with_param) p.c = rng.uniform(-cw, cw);
    return p;
  };
}

EquivalenceVerdict compare_sampled(const Expr& a, const Expr& b, std::uint64_t seed,
                                   const PointSampler& sampler,
                                   const OracleOptions& opts) {
  EquivalenceVerdict v;
  Rng rng(substream_seed(seed, 0, 0x5eed0eac1eULL));
  std::size_t ill_conditioned = 0;
  while (v.draws < opts.max_draws && v.points_tested < opts.quorum) {
    ++v.draws;
    const SamplePoint sp = sampler(rng);
    Point p;
    p.x = sp.x;
    p.c = sp.c;
    p.wild = &sp.wild;
    auto va = eval_bounded(a, p);
    if (!va) continue;
    auto vb = eval_bounded(b, p);
    if (!vb) continue;
    const double tol =
        opts.tolerance * (1.0 + std::fabs(va->value) + std::fabs(vb->value));
    if (va->error + vb->error > 0.5 * tol) {
      ++ill_conditioned;
      continue;
    }
    ++v.points_tested;
    if (std::fabs(va->value - vb->value) > tol) {
      v.outcome = Outcome::NotEquivalent;
      v.witness = Witness{sp.x, sp.c, va->value, vb->value};
      return v;
    }
  }
  if (v.points_tested >= opts.quorum) {
    v.outcome = Outcome::Equivalent;
  } else if (v.points_tested < opts.min_valid) {
    v.reason = ill_conditioned > 0 ? "too few well-conditioned sample points"
                                   : "empty real domain: too few valid sample points";
  } else {
    v.reason = "below quorum: " + std::to_string(v.points_tested) + " valid points";
  }
  return v;
}

EquivalenceVerdict numeric_equiv(const Expr& a, const Expr& b, std::uint64_t seed,
                                 const OracleOptions& opts) {
  const bool with_param = a.has_param() || b.has_param();
  return compare_sampled(a, b, seed, default_sampler(opts, with_param), opts);
}

std::pair<Expr, Expr> split_signed_terms(const Expr& e) {
  const Expr c = canonicalize(e);
  if (c.op() != Op::Add && c.op() != Op::Sub) {
    if (has_negative_lead(c)) return {integer(0), canonical_scale(-1, c)};
    return {c, integer(0)};
  }
  const SumForm sf = sum_form(c);
  std::vector<Term> pos, negs;
  for (const Term& t : sf.terms) {
    if (t.coef.sign() > 0)
      pos.push_back(t);
    else
      negs.push_back({-t.coef, t.mono});
  }
  Rational pc = sf.constant.sign() > 0 ? sf.constant : Rational(0);
  Rational nc = sf.constant.sign() < 0 ? -sf.constant : Rational(0);
  return {canonical_sum(pos, pc), canonical_sum(negs, nc)};
}

}  // namespace calcforge
