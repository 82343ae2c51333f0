#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zb {

/// Dense polynomial with ascending coefficients: c[0] + c[1] x + ...
/// Used for exact moment checks and for integrating polynomials against
/// piecewise-constant densities.
class Polynomial {
 public:
  Polynomial() : coeffs_(1, 0.0) {}
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, 0.0);
  }

  static Polynomial monomial(int degree, double coeff = 1.0) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = coeff;
    return Polynomial(std::move(c));
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() == 1) return Polynomial();
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
  }

  /// Antiderivative with zero constant term.
  Polynomial antiderivative() const {
    std::vector<double> a(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    return Polynomial(std::move(a));
  }

  /// Exact integral over [lo, hi].
  double integral(double lo, double hi) const {
    const Polynomial a = antiderivative();
    return a(hi) - a(lo);
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

}  // namespace zb
