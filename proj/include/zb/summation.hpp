#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace zb {

/// Neumaier-compensated accumulator. Order-dependent but with error
/// independent of the number of terms, which the 1e-12 identity
/// residuals in this library rely on.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// x^k for small integer k by repeated multiplication.
inline double ipow(double x, int k) {
  double r = 1.0;
  double base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) r *= base;
    base *= base;
  }
  return r;
}

}  // namespace zb
