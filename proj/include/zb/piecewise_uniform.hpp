#pragma once

#include <span>
#include <vector>

#include "zb/polynomial.hpp"

namespace zb {

/// Density that is constant on each interval [b_i, b_{i+1}) of a strictly
/// increasing breakpoint grid. Total mass is 1 within 1e-12. Equivalently a
/// mixture of uniform laws over the intervals.
class PiecewiseUniformDensity {
 public:
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> densities() const { return densities_; }
  std::size_t pieces() const { return densities_.size(); }

  double support_min() const { return breakpoints_.front(); }
  double support_max() const { return breakpoints_.back(); }

  /// Density value with right-open piece convention; 0 outside the support.
  double operator()(double x) const;

  double mass() const;
  double cdf(double x) const;

  /// Exact integral of p against the density via antiderivatives.
  double integrate(const Polynomial& p) const;

  /// Exact n-th moment of the density.
  double moment(int n) const;

 private:
  friend PiecewiseUniformDensity make_piecewise_density(
      std::vector<double> breakpoints, std::vector<double> densities);
  PiecewiseUniformDensity() = default;

  std::vector<double> breakpoints_;  // size m + 1
  std::vector<double> densities_;    // size m
};

/// Validates monotone breakpoints, nonnegative densities (round-off
/// negatives above -1e-12 are clamped to 0), and unit mass within 1e-12.
PiecewiseUniformDensity make_piecewise_density(std::vector<double> breakpoints,
                                               std::vector<double> densities);

/// True when densities are nondecreasing over pieces lying in (-inf, 0] and
/// nonincreasing over pieces lying in [0, inf), up to `tol`.
bool is_unimodal_about_zero(const PiecewiseUniformDensity& d,
                            double tol = 1e-9);

/// Max |a - b| over midpoints of the merged breakpoint grid, with
/// breakpoints closer than `snap` identified and out-of-support density 0.
/// Support mismatch beyond `snap` therefore shows up as a density gap.
double max_density_difference(const PiecewiseUniformDensity& a,
                              const PiecewiseUniformDensity& b,
                              double snap = 1e-9);

}  // namespace zb
