#pragma once

// Test-only helpers: an unrestricted random tree generator (independent of
// the corpus sampler) and small assertion utilities.

#include <ostream>
#include <string>

#include "calcforge/canonical.hpp"
#include "calcforge/expr.hpp"
#include "calcforge/parse.hpp"
#include "calcforge/rng.hpp"

namespace calcforge {
inline void PrintTo(const Expr& e, std::ostream* os) { *os << print_infix(e); }
}  // namespace calcforge

namespace calcforge::testing {

/// Arbitrary tree over every operator, with leaves x, optional c, and
/// integers in [-5, 5]. `budget` bounds the internal node count.
inline Expr random_tree(Rng& rng, int budget, bool with_param = false) {
  if (budget <= 0 || rng.bernoulli(0.15)) {
    const int pick = static_cast<int>(rng.uniform_int(0, 9));
    if (pick < 5) return var_x();
    if (with_param && pick == 5) return param_c();
    return integer(rng.uniform_int(-5, 5));
  }
  static constexpr Op kOps[] = {Op::Add,  Op::Sub,  Op::Mul,  Op::Div,
                                Op::Pow,  Op::Neg,  Op::Sin,  Op::Cos,
                                Op::Tan,  Op::Asin, Op::Acos, Op::Atan,
                                Op::Exp,  Op::Log,  Op::Sqrt};
  const Op op = kOps[rng.index(std::size(kOps))];
  if (is_unary(op)) return unary(op, random_tree(rng, budget - 1, with_param));
  if (op == Op::Pow)
    return pow(random_tree(rng, budget - 1, with_param),
               integer(rng.uniform_int(-3, 4)));
  const int left = static_cast<int>(rng.uniform_int(0, budget - 1));
  return binary(op, random_tree(rng, left, with_param),
                random_tree(rng, budget - 1 - left, with_param));
}

inline Expr P(const std::string& text) { return parse(text); }
inline Expr C(const std::string& text) { return canonicalize(parse(text)); }

// sin^2(e^e^x) + cos^2(e^e^x): identically 1.
inline const char* kDisguisedOne = "sin(exp(exp(x)))^2 + cos(exp(exp(x)))^2";

// sin(e^x + A) - cos(A) sin(e^x) - cos(e^x) sin(A) with A written three
// different ways; identically 0 where defined (x >= -1 for the cube root).
inline const char* kDisguisedZero =
    "sin(exp(x) + (exp(2*x) - 1)/(2*cos(sin(x))^2 - 1))"
    " - cos((exp(x) + 1)*(exp(x) - 1)/cos(2*sin(x)))*sin(exp(x))"
    " - cos(exp((x^3 + 3*x^2 + 3*x + 1)^(1/3) - 1))"
    "*sin((exp(2*x) - 1)/(1 - 2*sin(sin(x))^2))";

}  // namespace calcforge::testing
