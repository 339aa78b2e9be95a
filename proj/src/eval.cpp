#include "calcforge/eval.hpp"

#include <algorithm>
#include <cmath>

namespace calcforge {

namespace {

struct Evaluator {
  const Point& p;
  double scale = 0.0;

  bool ok(double v) {
    if (!std::isfinite(v)) return false;
    scale = std::max(scale, std::fabs(v));
    return true;
  }

  std::optional<double> run(const Expr& e) {
    double v = 0.0;
    switch (e.op()) {
      case Op::Int: v = static_cast<double>(e.value()); break;
      case Op::Var: v = p.x; break;
      case Op::Param:
        if (!p.c) return std::nullopt;
        v = *p.c;
        break;
      case Op::Y: v = p.y; break;
      case Op::DY: v = p.dy; break;
      case Op::Wild: {
        if (!p.wild) return std::nullopt;
        auto it = p.wild->find(e.name());
        if (it == p.wild->end()) return std::nullopt;
        v = it->second;
        break;
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow: {
        auto a = run(e.lhs());
        if (!a) return std::nullopt;
        auto b = run(e.rhs());
        if (!b) return std::nullopt;
        switch (e.op()) {
          case Op::Add: v = *a + *b; break;
          case Op::Sub: v = *a - *b; break;
          case Op::Mul: v = *a * *b; break;
          case Op::Div:
            if (*b == 0.0) return std::nullopt;
            v = *a / *b;
            break;
          default:
            if (*a == 0.0 && *b < 0.0) return std::nullopt;
            if (*a < 0.0 && *b != std::trunc(*b)) return std::nullopt;
            v = std::pow(*a, *b);
            break;
        }
        break;
      }
      default: {
        auto a = run(e.child());
        if (!a) return std::nullopt;
        const double u = *a;
        switch (e.op()) {
          case Op::Neg: v = -u; break;
          case Op::Sin: v = std::sin(u); break;
          case Op::Cos: v = std::cos(u); break;
          case Op::Tan: v = std::tan(u); break;
          case Op::Asin:
            if (u < -1.0 || u > 1.0) return std::nullopt;
            v = std::asin(u);
            break;
          case Op::Acos:
            if (u < -1.0 || u > 1.0) return std::nullopt;
            v = std::acos(u);
            break;
          case Op::Atan: v = std::atan(u); break;
          case Op::Exp: v = std::exp(u); break;
          case Op::Log:
            if (u <= 0.0) return std::nullopt;
            v = std::log(u);
            break;
          default:
            if (u < 0.0) return std::nullopt;
            v = std::sqrt(u);
            break;
        }
        break;
      }
    }
    if (!ok(v)) return std::nullopt;
    return v;
  }
};

constexpr double kUlp = 0x1.0p-52;

struct BoundedEvaluator {
  const Point& p;

  std::optional<BoundedValue> leaf(const Expr& e) {
    auto v = Evaluator{p}.run(e);
    if (!v) return std::nullopt;
    return BoundedValue{*v, 0.0};
  }

  std::optional<BoundedValue> run(const Expr& e) {
    if (is_leaf(e.op())) return leaf(e);
    double v = 0.0;
    double err = 0.0;
    if (is_binary(e.op())) {
      auto a = run(e.lhs());
      if (!a) return std::nullopt;
      auto b = run(e.rhs());
      if (!b) return std::nullopt;
      const double x = a->value, y = b->value, ex = a->error, ey = b->error;
      switch (e.op()) {
        case Op::Add: v = x + y; err = ex + ey; break;
        case Op::Sub: v = x - y; err = ex + ey; break;
        case Op::Mul: v = x * y; err = std::fabs(x) * ey + std::fabs(y) * ex + ex * ey; break;
        case Op::Div:
          if (y == 0.0) return std::nullopt;
          v = x / y;
          if (ey >= std::fabs(y)) return BoundedValue{v, HUGE_VAL};
          err = (ex + std::fabs(v) * ey) / (std::fabs(y) - ey);
          break;
        default:
          if (x == 0.0 && y < 0.0) return std::nullopt;
          if (x < 0.0 && y != std::trunc(y)) return std::nullopt;
          v = std::pow(x, y);
          err = std::fabs(y * std::pow(x, y - 1.0)) * ex;
          if (ey > 0.0 && x > 0.0) err += std::fabs(v * std::log(x)) * ey;
          err *= 1.0 + kUlp;
          break;
      }
    } else {
      auto a = run(e.child());
      if (!a) return std::nullopt;
      const double u = a->value, eu = a->error;
      switch (e.op()) {
        case Op::Neg: v = -u; err = eu; break;
        case Op::Sin: v = std::sin(u); err = std::min(2.0, eu); break;
        case Op::Cos: v = std::cos(u); err = std::min(2.0, eu); break;
        case Op::Tan: {
          v = std::tan(u);
          const double c = std::cos(u);
          if (eu >= std::fabs(c)) return BoundedValue{v, HUGE_VAL};
          err = eu / ((std::fabs(c) - eu) * (std::fabs(c) - eu));
          break;
        }
        case Op::Asin:
        case Op::Acos: {
          if (u < -1.0 || u > 1.0) return std::nullopt;
          v = e.op() == Op::Asin ? std::asin(u) : std::acos(u);
          const double slack = 1.0 - std::fabs(u) - eu;
          if (slack <= 0.0) return BoundedValue{v, HUGE_VAL};
          err = eu / std::sqrt(slack * (1.0 + std::fabs(u)));
          break;
        }
        case Op::Atan: v = std::atan(u); err = eu; break;
        case Op::Exp: v = std::exp(u); err = std::fabs(v) * std::expm1(eu); break;
        case Op::Log:
          if (u <= 0.0) return std::nullopt;
          v = std::log(u);
          if (eu >= u) return BoundedValue{v, HUGE_VAL};
          err = -std::log1p(-eu / u);
          break;
        default:
          if (u < 0.0) return std::nullopt;
          v = std::sqrt(u);
          err = eu <= u ? eu / (v + std::sqrt(u - eu)) : std::sqrt(eu);
          break;
      }
    }
    if (!std::isfinite(v)) return std::nullopt;
    // Each operation contributes up to a couple of ulps of its own.
    err += 2.0 * kUlp * std::fabs(v);
    return BoundedValue{v, err};
  }
};

}  // namespace

std::optional<BoundedValue> eval_bounded(const Expr& e, const Point& p) {
  return BoundedEvaluator{p}.run(e);
}

std::optional<double> eval_at(const Expr& e, const Point& p) {
  Evaluator ev{p};
  return ev.run(e);
}

std::optional<double> eval_at(const Expr& e, double x) {
  Point p;
  p.x = x;
  return eval_at(e, p);
}

std::optional<double> eval_at(const Expr& e, double x, double c) {
  Point p;
  p.x = x;
  p.c = c;
  return eval_at(e, p);
}

std::optional<ScaledValue> eval_scaled(const Expr& e, const Point& p) {
  Evaluator ev{p};
  auto v = ev.run(e);
  if (!v) return std::nullopt;
  return ScaledValue{*v, ev.scale};
}

}  // namespace calcforge
