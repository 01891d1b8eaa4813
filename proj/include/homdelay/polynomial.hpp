#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homdelay/errors.hpp"
#include "homdelay/rational.hpp"

namespace homdelay {

/// coeff · Π_i v_i^{e_i} with rational exponents (odd denominators only).
struct Monomial {
  double coeff = 0.0;
  std::vector<Rational> exponents;

  Rational degree() const {
    Rational total(0);
    for (const auto& e : exponents) total = total + e;
    return total;
  }
};

/// Sum of monomials in a fixed number of real variables, with analytic
/// gradient and Hessian.
class Polynomial {
 public:
  Polynomial() = default;

  Polynomial(std::size_t variables, std::vector<Monomial> terms)
      : variables_(variables), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.exponents.size() != variables_) {
        throw DimensionError("monomial has " +
                             std::to_string(t.exponents.size()) +
                             " exponents, expected " +
                             std::to_string(variables_));
      }
      for (const auto& e : t.exponents) {
        if (e.num() < 0) throw ConfigError("negative exponent " + e.ToString());
        if (!e.has_odd_denominator()) {
          throw ConfigError("exponent " + e.ToString() +
                            " has an even denominator");
        }
      }
    }
  }

  std::size_t variables() const { return variables_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  /// True when every monomial has total degree `degree`.
  bool IsHomogeneous(Rational degree) const {
    for (const auto& t : terms_) {
      if (t.coeff != 0.0 && !(t.degree() == degree)) return false;
    }
    return true;
  }

  template <typename Derived>
  double Value(const Eigen::MatrixBase<Derived>& v) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      double prod = t.coeff;
      for (std::size_t i = 0; i < variables_; ++i) {
        if (t.exponents[i].num() != 0) prod *= SignedPow(v[i], t.exponents[i]);
      }
      sum += prod;
    }
    return sum;
  }

  /// ∂/∂v_j of the polynomial.
  template <typename Derived>
  double Partial(const Eigen::MatrixBase<Derived>& v, std::size_t j) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      const Rational ej = t.exponents[j];
      if (ej.num() == 0) continue;
      double prod = t.coeff * ej.value() *
                    SignedPow(v[j], ej - Rational(1));
      for (std::size_t i = 0; i < variables_; ++i) {
        if (i != j && t.exponents[i].num() != 0) {
          prod *= SignedPow(v[i], t.exponents[i]);
        }
      }
      sum += prod;
    }
    return sum;
  }

  template <typename Derived>
  Eigen::VectorXd Gradient(const Eigen::MatrixBase<Derived>& v) const {
    Eigen::VectorXd g(variables_);
    for (std::size_t j = 0; j < variables_; ++j) g[j] = Partial(v, j);
    return g;
  }

  template <typename Derived>
  Eigen::MatrixXd Hessian(const Eigen::MatrixBase<Derived>& v) const {
    const auto n = static_cast<Eigen::Index>(variables_);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : terms_) {
      for (std::size_t a = 0; a < variables_; ++a) {
        for (std::size_t b = a; b < variables_; ++b) {
          hess(a, b) += SecondPartial(t, v, a, b);
        }
      }
    }
    hess.template triangularView<Eigen::StrictlyLower>() =
        hess.transpose().template triangularView<Eigen::StrictlyLower>();
    return hess;
  }

 private:
  template <typename Derived>
  double SecondPartial(const Monomial& t, const Eigen::MatrixBase<Derived>& v,
                       std::size_t a, std::size_t b) const {
    std::vector<Rational> e = t.exponents;
    double factor = t.coeff;
    for (std::size_t k : {a, b}) {
      if (e[k].num() == 0) return 0.0;
      factor *= e[k].value();
      e[k] = e[k] - Rational(1);
    }
    for (std::size_t i = 0; i < variables_; ++i) {
      if (e[i].num() != 0) factor *= SignedPow(v[i], e[i]);
    }
    return factor;
  }

  std::size_t variables_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace homdelay
