#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "calcforge/expr.hpp"
#include "calcforge/oracle.hpp"

namespace calcforge {

/// d e / d wrt, canonicalized. `wrt` is a leaf kind: Var (x) by default, or
/// Y / Param when differentiating with respect to those. Other leaves are
/// constants. In canonical order chain-rule factors sort innermost first:
/// d sin(sin(x)) = cos(x)*cos(sin(x)).
Expr differentiate(const Expr& e, Op wrt = Op::Var);

struct IntegrateOptions {
  int max_depth = 4;           // nesting of substitution / by-parts steps
  bool simplify_input = true;  // simplify the integrand first
  bool verify = true;          // oracle-check d(result) against the input
  std::uint64_t seed = 0x1e57;
};

/// Heuristic antiderivative (constant of integration omitted): linearity,
/// a primitive table over linear arguments, the power rule, substitution
/// when the integrand is g(u)*u' up to a constant, and repeated integration
/// by parts for x^n times exp/sin/cos/log-type factors. nullopt means the
/// heuristic gave up, not that no elementary antiderivative exists.
std::optional<Expr> integrate_heuristic(const Expr& e, const IntegrateOptions& opts = {});

enum class InvertFailure {
  None,
  ParamCount,      // f must contain exactly one c
  NoInverse,       // an operation on the path has no implemented inverse
  BranchMismatch,  // principal-branch inverse disagrees on sampled points
  EmptyDomain,     // too few valid sample points to check the inverse
};

std::string_view invert_failure_name(InvertFailure f);

struct Inversion {
  std::optional<Expr> F;  // over x and y, with F(x, f(x, c)) = c
  InvertFailure failure = InvertFailure::None;
  bool ok() const { return F.has_value(); }
};

/// True when every operation on the root-to-c path is injective in its
/// c-carrying argument (sin, cos, tan and even powers are not), so path
/// inversion cannot hit a branch mismatch.
bool has_injective_path(const Expr& f);

/// Isolate c in y = f(x, c) by inverting each operation on the root-to-c
/// path (principal branches), then confirm numerically.
Inversion solve_for_parameter(const Expr& f, std::uint64_t seed = 0x50f7);

struct OdeProblem {
  Expr equation;   // over x, y, y'; the equation is "equation = 0"
  Expr solution;   // f(x, c)
  Expr invariant;  // F(x, y), the isolated parameter
};

struct OdeResult {
  std::optional<OdeProblem> problem;
  InvertFailure failure = InvertFailure::None;
  bool ok() const { return problem.has_value(); }
};

/// Build F_x + F_y * y' from the isolated parameter, clear a common nonzero
/// factor when one is visible, and check the substitution residual.
OdeResult make_first_order_ode(const Expr& f, std::uint64_t seed = 0x0de1);

/// Substitute y := sol, y' := d sol / dx into an ODE left-hand side.
Expr ode_residual(const Expr& equation, const Expr& sol);

/// Residual check on a grid of `c_values` parameter draws times `x_points`
/// x draws each. Equivalent only if every row reaches its quorum.
EquivalenceVerdict ode_residual_check(const Expr& equation, const Expr& sol,
                                      std::uint64_t seed, std::size_t c_values = 5,
                                      std::size_t x_points = 10);

}  // namespace calcforge
