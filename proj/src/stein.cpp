#include "zb/stein.hpp"

#include <cmath>
#include <stdexcept>

#include "zb/quadrature.hpp"
#include "zb/summation.hpp"

namespace zb {

SteinSolution::SteinSolution(TestFunction h, double sigma, double quad_tol)
    : h_(std::move(h)), sigma_(sigma), tol_(quad_tol) {
  if (!(sigma_ > 0.0))
    throw std::invalid_argument("SteinSolution: sigma must be > 0");
  if (!h_.evaluable())
    throw std::invalid_argument("SteinSolution: test function not evaluable");
  phi_h_ = normal_expectation(h_.h);
}

double SteinSolution::centered(double x) const {
  return h_.h(x / sigma_) - phi_h_;
}

double SteinSolution::fprime(double x) const {
  const double s2 = sigma_ * sigma_;
  // Exponential-free tail form of the solution: substituting t = x +/- s
  // keeps every factor bounded by exp(-s^2 / (2 sigma^2)).
  const double smax = 9.0 * sigma_;
  if (x >= 0.0) {
    const auto integrand = [&](double s) {
      return centered(x + s) * std::exp(-s * (2.0 * x + s) / (2.0 * s2));
    };
    return integrate_adaptive(integrand, 0.0, smax, tol_ * s2) / s2;
  }
  const auto integrand = [&](double s) {
    return centered(x - s) * std::exp(-s * (s - 2.0 * x) / (2.0 * s2));
  };
  return -integrate_adaptive(integrand, 0.0, smax, tol_ * s2) / s2;
}

double SteinSolution::fsecond(double x) const {
  const double s2 = sigma_ * sigma_;
  return (x * fprime(x) - centered(x)) / s2;
}

double SteinSolution::equation_residual(double x) const {
  const double delta = 3e-5 * std::max(1.0, sigma_);
  const double fdd = (fprime(x + delta) - fprime(x - delta)) / (2.0 * delta);
  return x * fprime(x) - sigma_ * sigma_ * fdd - centered(x);
}

SteinSolution stein_solution(const TestFunction& h, double sigma) {
  return SteinSolution(h, sigma);
}

double solution_norm_bound(double sigma, int j, double h_norm) {
  if (j < 1 || j > 4)
    throw std::invalid_argument("solution_norm_bound: j must be in 1..4");
  if (!(sigma > 0.0))
    throw std::invalid_argument("solution_norm_bound: sigma must be > 0");
  if (!(h_norm >= 0.0))
    throw std::invalid_argument("solution_norm_bound: negative norm");
  return h_norm / (j * ipow(sigma, j));
}

BoundReport zero_bias_bound(double sigma, const TestFunction& h,
                            double cond_var, double sq_diff) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("zero_bias_bound: sigma must be > 0");
  if (!(cond_var >= 0.0) || !(sq_diff >= 0.0))
    throw std::invalid_argument("zero_bias_bound: negative moment term");
  BoundReport r;
  r.method = "zero-bias";
  r.sigma = sigma;
  r.norm3 = h.norm_or_throw(3);
  r.norm4 = h.norm_or_throw(4);
  r.cond_term = cond_var;
  r.sq_diff = sq_diff;
  r.term1 = r.norm3 * std::sqrt(cond_var) / (3.0 * sigma);
  r.term2 = r.norm4 * sq_diff / (8.0 * sigma * sigma);
  r.bound = r.term1 + r.term2;
  return r;
}

BoundReport iid_fourth_moment_bound(std::int64_t n, double ex4,
                                    const TestFunction& h, double ex3) {
  if (n < 1) throw std::invalid_argument("iid_fourth_moment_bound: n < 1");
  if (!(ex4 >= 0.0))
    throw std::invalid_argument("iid_fourth_moment_bound: negative EX^4");
  if (std::abs(ex3) > 1e-12)
    throw std::invalid_argument(
        "iid_fourth_moment_bound: third moment must vanish");
  BoundReport r;
  r.method = "iid-fourth-moment";
  r.sigma = std::sqrt(static_cast<double>(n));
  r.norm3 = h.norm_or_throw(3);
  r.norm4 = h.norm_or_throw(4);
  r.term1 = r.norm3 / (3.0 * static_cast<double>(n));
  r.term2 = r.norm4 * ex4 / (6.0 * static_cast<double>(n));
  r.bound = r.term1 + r.term2;
  return r;
}

BoundReport clt_iid_bound(std::int64_t n, double abs3, const TestFunction& h) {
  if (n < 1) throw std::invalid_argument("clt_iid_bound: n < 1");
  if (!(abs3 >= 0.0))
    throw std::invalid_argument("clt_iid_bound: negative E|X|^3");
  BoundReport r;
  r.method = "clt";
  r.sigma = std::sqrt(static_cast<double>(n));
  r.norm3 = h.norm_or_throw(3);
  r.term1 = r.norm3 * abs3 / (2.0 * std::sqrt(static_cast<double>(n)));
  r.term2 = 0.0;
  r.bound = r.term1;
  return r;
}

GapEstimate expectation_gap(const DiscreteDistribution& wlaw, double sigma,
                            const TestFunction& h) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("expectation_gap: sigma must be > 0");
  if (!h.evaluable())
    throw std::invalid_argument("expectation_gap: test function not evaluable");
  CompensatedSum s;
  for (std::size_t i = 0; i < wlaw.size(); ++i)
    s.add(wlaw.probs()[i] * h.h(wlaw.atoms()[i] / sigma));
  return {s.value() - normal_expectation(h.h), 0.0, true};
}

GapEstimate expectation_gap_mc(std::span<const double> w, double sigma,
                               const TestFunction& h) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("expectation_gap_mc: sigma must be > 0");
  if (!h.evaluable())
    throw std::invalid_argument(
        "expectation_gap_mc: test function not evaluable");
  if (w.empty())
    throw std::invalid_argument("expectation_gap_mc: no samples");
  CompensatedSum s;
  for (double x : w) s.add(h.h(x / sigma));
  const double mean = s.value() / static_cast<double>(w.size());
  CompensatedSum var;
  for (double x : w) {
    const double c = h.h(x / sigma) - mean;
    var.add(c * c);
  }
  const double n = static_cast<double>(w.size());
  const double se =
      w.size() > 1 ? std::sqrt(var.value() / (n - 1.0) / n) : 0.0;
  return {mean - normal_expectation(h.h), se, false};
}

}  // namespace zb
