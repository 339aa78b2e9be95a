#pragma once

#include <map>
#include <optional>
#include <string>

#include "calcforge/expr.hpp"

namespace calcforge {

/// Leaf values for one evaluation point.
struct Point {
  double x = 0.0;
  std::optional<double> c;
  double y = 0.0;
  double dy = 0.0;
  const std::map<std::string, double>* wild = nullptr;
};

/// Real-domain IEEE double evaluation. Returns nullopt (a domain error) for
/// log of non-positive values, roots of negatives, division by zero, missing
/// leaf values, and any non-finite intermediate.
std::optional<double> eval_at(const Expr& e, const Point& p);
std::optional<double> eval_at(const Expr& e, double x);
std::optional<double> eval_at(const Expr& e, double x, double c);

/// Evaluation that also reports the largest magnitude seen in any
/// intermediate result; useful for bounding rounding error.
struct ScaledValue {
  double value = 0.0;
  double scale = 0.0;
};
std::optional<ScaledValue> eval_scaled(const Expr& e, const Point& p);

/// Evaluation with a first-order running bound on the absolute rounding
/// error of the result (leaves are taken as exact).
struct BoundedValue {
  double value = 0.0;
  double error = 0.0;
};
std::optional<BoundedValue> eval_bounded(const Expr& e, const Point& p);

}  // namespace calcforge
