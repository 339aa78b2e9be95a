#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace calcforge {

/// Raised when exact coefficient arithmetic leaves the int64 range.
class ArithmeticOverflow : public std::overflow_error {
 public:
  ArithmeticOverflow() : std::overflow_error("rational overflow") {}
};

/// Exact rational with int64 numerator/denominator, always reduced, den > 0.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT implicit
  Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return reduce(static_cast<__int128>(a.num_) * b.den_ +
                      static_cast<__int128>(b.num_) * a.den_,
                  static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return reduce(static_cast<__int128>(a.num_) * b.num_,
                  static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return reduce(static_cast<__int128>(a.num_) * b.den_,
                  static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    if (num_ == INT64_MIN) throw ArithmeticOverflow();
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  /// Integer power; negative exponents invert (value must be nonzero).
  Rational pow(std::int64_t k) const {
    if (k < 0) return Rational(1) / pow(-k);
    Rational result(1);
    Rational base = *this;
    while (k > 0) {
      if (k & 1) result *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return result;
  }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=>
           static_cast<__int128>(b.num_) * a.den_;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    return reduce(n, d);
  }

  static Rational reduce(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX)
      throw ArithmeticOverflow();
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = n == 0 ? 1 : static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// gcd of numerators over lcm of denominators; always positive.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a.is_zero()) return b.sign() < 0 ? -b : b;
  if (b.is_zero()) return a.sign() < 0 ? -a : a;
  const std::int64_t n = std::gcd(a.num(), b.num());
  const std::int64_t g = std::gcd(a.den(), b.den());
  const __int128 l = static_cast<__int128>(a.den() / g) * b.den();
  if (l > INT64_MAX) throw ArithmeticOverflow();
  return Rational(n, static_cast<std::int64_t>(l));
}

}  // namespace calcforge
