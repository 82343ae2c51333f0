#include "zb/piecewise_uniform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zb/summation.hpp"

namespace zb {

PiecewiseUniformDensity make_piecewise_density(std::vector<double> breakpoints,
                                               std::vector<double> densities) {
  if (breakpoints.size() < 2 || densities.size() + 1 != breakpoints.size())
    throw std::invalid_argument("make_piecewise_density: size mismatch");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument(
          "make_piecewise_density: breakpoints not strictly increasing");
  for (double& v : densities) {
    if (!std::isfinite(v) || v < -1e-12)
      throw std::invalid_argument("make_piecewise_density: negative density");
    if (v < 0.0) v = 0.0;  // round-off clamp
  }
  CompensatedSum mass;
  for (std::size_t i = 0; i < densities.size(); ++i)
    mass.add(densities[i] * (breakpoints[i + 1] - breakpoints[i]));
  if (std::abs(mass.value() - 1.0) > 1e-12)
    throw std::invalid_argument("make_piecewise_density: mass " +
                                std::to_string(mass.value()) +
                                " deviates from 1 beyond 1e-12");
  PiecewiseUniformDensity d;
  d.breakpoints_ = std::move(breakpoints);
  d.densities_ = std::move(densities);
  return d;
}

double PiecewiseUniformDensity::operator()(double x) const {
  if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const std::size_t piece =
      static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return densities_[std::min(piece, densities_.size() - 1)];
}

double PiecewiseUniformDensity::mass() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < densities_.size(); ++i)
    s.add(densities_[i] * (breakpoints_[i + 1] - breakpoints_[i]));
  return s.value();
}

double PiecewiseUniformDensity::cdf(double x) const {
  if (x <= breakpoints_.front()) return 0.0;
  if (x >= breakpoints_.back()) return 1.0;
  CompensatedSum s;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    const double hi = std::min(x, breakpoints_[i + 1]);
    if (hi <= breakpoints_[i]) break;
    s.add(densities_[i] * (hi - breakpoints_[i]));
  }
  return std::min(s.value(), 1.0);
}

double PiecewiseUniformDensity::integrate(const Polynomial& p) const {
  const Polynomial anti = p.antiderivative();
  CompensatedSum s;
  for (std::size_t i = 0; i < densities_.size(); ++i)
    s.add(densities_[i] * (anti(breakpoints_[i + 1]) - anti(breakpoints_[i])));
  return s.value();
}

double PiecewiseUniformDensity::moment(int n) const {
  if (n < 0) throw std::invalid_argument("moment: negative order");
  return integrate(Polynomial::monomial(n));
}

bool is_unimodal_about_zero(const PiecewiseUniformDensity& d, double tol) {
  const auto bp = d.breakpoints();
  const auto den = d.densities();
  for (std::size_t i = 0; i + 1 < den.size(); ++i) {
    // Pieces i and i+1 cover [bp[i], bp[i+2]).
    if (bp[i + 2] <= 0.0 && den[i] > den[i + 1] + tol) return false;
    if (bp[i] >= 0.0 && den[i] + tol < den[i + 1]) return false;
  }
  return true;
}

double max_density_difference(const PiecewiseUniformDensity& a,
                              const PiecewiseUniformDensity& b, double snap) {
  std::vector<double> grid(a.breakpoints().begin(), a.breakpoints().end());
  grid.insert(grid.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  std::vector<double> merged;
  for (double x : grid)
    if (merged.empty() || x - merged.back() > snap) merged.push_back(x);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double mid = 0.5 * (merged[i] + merged[i + 1]);
    worst = std::max(worst, std::abs(a(mid) - b(mid)));
  }
  return worst;
}

}  // namespace zb
