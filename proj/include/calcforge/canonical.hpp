#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "calcforge/expr.hpp"
#include "calcforge/rational.hpp"

namespace calcforge {

/// Canonical form: add/sub/neg chains become a sorted sum of distinct
/// monomials with rational coefficients (constant term last); mul/div/integer
/// powers become a rational coefficient times a sorted product of distinct
/// bases with nonzero integer exponents; exp factors merge into one exp;
/// numeric subtrees fold exactly. Sums used as factors are made primitive
/// (coprime integer coefficients, leading term positive).
///
/// Idempotent, deterministic, and value-preserving at every point where the
/// input evaluates. If exact coefficient arithmetic overflows int64 the input
/// is returned unchanged.
Expr canonicalize(const Expr& e);

/// Numeric literal in canonical spelling: Int, or div(Int, Int).
std::optional<Rational> as_number(const Expr& e);
Expr number(const Rational& q);

struct Term {
  Rational coef;
  Expr mono;  // canonical, coefficient-free, never a bare number
};

struct SumForm {
  std::vector<Term> terms;  // sorted by mono
  Rational constant;
};

struct Factor {
  Expr base;
  std::int64_t exp = 1;
};

struct ProductForm {
  Rational coef = 1;
  std::vector<Factor> factors;  // sorted by base
};

/// Decompositions of an already-canonical expression.
SumForm sum_form(const Expr& canonical);
ProductForm product_form(const Expr& canonical);

/// Canonical spelling of coef * prod(base^exp). Bases must be canonical and
/// distinct; does not re-merge.
Expr emit_product(const Rational& coef, const std::vector<Factor>& factors);

// Arithmetic on canonical operands with canonical results.
Expr canonical_add(const Expr& a, const Expr& b);
Expr canonical_sub(const Expr& a, const Expr& b);
Expr canonical_mul(const Expr& a, const Expr& b);
Expr canonical_div(const Expr& a, const Expr& b);
Expr canonical_scale(const Rational& q, const Expr& a);
Expr canonical_pow(const Expr& a, std::int64_t k);
Expr canonical_sum(const std::vector<Term>& terms, const Rational& constant);
Expr canonical_product(const Rational& coef, const std::vector<Factor>& factors);

/// Distribute products over sum factors raised to positive integer powers,
/// at the top level only (function arguments are left alone). Returns the
/// input unchanged if the expansion would exceed `max_terms` terms.
Expr expand(const Expr& canonical, std::size_t max_terms = 256);

/// True when the leading coefficient of a canonical expression is negative.
bool has_negative_lead(const Expr& canonical);

}  // namespace calcforge
