#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "calcforge/expr.hpp"
#include "calcforge/rng.hpp"

namespace calcforge {

enum class Outcome { Equivalent, NotEquivalent, Undetermined };

std::string_view outcome_name(Outcome o);

struct Witness {
  double x = 0.0;
  std::optional<double> c;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct EquivalenceVerdict {
  Outcome outcome = Outcome::Undetermined;
  std::optional<Witness> witness;  // NotEquivalent only
  std::string reason;              // Undetermined only
  std::size_t points_tested = 0;   // valid points compared
  std::size_t draws = 0;
  bool symbolic = false;  // Equivalent by rewriting to literal 0, no sampling

  bool equivalent() const { return outcome == Outcome::Equivalent; }
  bool not_equivalent() const { return outcome == Outcome::NotEquivalent; }
  bool undetermined() const { return outcome == Outcome::Undetermined; }
};

struct OracleOptions {
  std::size_t quorum = 20;     // valid points needed for Equivalent
  std::size_t min_valid = 5;   // below this the domain is reported empty
  std::size_t max_draws = 500;
  double tolerance = 1e-6;
  double x_half_width = 10.0;  // uniform component of the x mixture
  double c_half_width = 3.0;
};

/// One sample: values for x, optionally c, and any pattern variables.
struct SamplePoint {
  double x = 0.0;
  std::optional<double> c;
  std::map<std::string, double> wild;
};

using PointSampler = std::function<SamplePoint(Rng&)>;

/// Default distribution: x from an even mixture of uniform[-w, w] and a
/// standard Cauchy; c uniform[-3, 3] when `with_param`.
PointSampler default_sampler(const OracleOptions& opts, bool with_param);

/// Probabilistic equivalence: draws points until `quorum` valid ones agree,
/// any valid one disagrees, or the draw budget runs out. A point is valid
/// when both sides evaluate and their propagated rounding-error bounds are
/// well inside the tolerance (ill-conditioned points are redrawn, as domain
/// errors are).
EquivalenceVerdict numeric_equiv(const Expr& a, const Expr& b, std::uint64_t seed,
                                 const OracleOptions& opts = {});

EquivalenceVerdict compare_sampled(const Expr& a, const Expr& b, std::uint64_t seed,
                                   const PointSampler& sampler,
                                   const OracleOptions& opts = {});

/// Splits e into its positive and negative top-level terms, so a zero test
/// can be run as a two-sided comparison with a magnitude-aware tolerance.
std::pair<Expr, Expr> split_signed_terms(const Expr& e);

}  // namespace calcforge
