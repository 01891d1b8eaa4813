#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "homdelay/errors.hpp"

namespace homdelay {

/// Rational number p/q with q > 0 and gcd(p, q) = 1. Used for homogeneity
/// degrees and monomial exponents so that odd-denominator powers of negative
/// arguments keep a well defined real sign.
class Rational {
 public:
  constexpr Rational() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}

  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw Error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  /// Parses "p", "p/q" or an integral decimal such as "3" or "3.0".
  static Rational Parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        const double v = std::stod(text);
        if (v != std::floor(v)) {
          throw ConfigError("non-integer exponent '" + text +
                            "' must be written as p/q");
        }
        return Rational(static_cast<std::int64_t>(v));
      }
      return Rational(std::stoll(text.substr(0, slash)),
                      std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse rational '" + text + "'");
    }
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr double value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  constexpr bool is_integer() const { return den_ == 1; }
  constexpr bool has_odd_denominator() const { return den_ % 2 == 1; }
  /// True for integers and for p/q with p and q both odd.
  constexpr bool is_odd() const {
    return (num_ % 2 != 0) && (den_ % 2 != 0);
  }

  std::string ToString() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend bool operator==(Rational a, Rational b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(Rational a, Rational b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

namespace detail {

inline double IntegerPower(double x, std::int64_t n) {
  if (n < 0) return 1.0 / IntegerPower(x, -n);
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

}  // namespace detail

/// Real power x^e for rational e with odd denominator. For x < 0 the result
/// is sign(x)^p |x|^{p/q}, the real branch of the q-th root raised to p.
inline double SignedPow(double x, Rational e) {
  if (e.is_integer()) return detail::IntegerPower(x, e.num());
  const double magnitude = std::pow(std::abs(x), e.value());
  return (x < 0.0 && (e.num() % 2 != 0)) ? -magnitude : magnitude;
}

}  // namespace homdelay
