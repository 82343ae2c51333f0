#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "zb/discrete_distribution.hpp"
#include "zb/test_function.hpp"

namespace zb {

/// Components of an assembled normal-approximation error bound. Fields not
/// meaningful for a method stay NaN.
struct BoundReport {
  std::string method;  // "zero-bias" | "iid-fourth-moment" | "clt" | "srs"
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double norm3 = std::numeric_limits<double>::quiet_NaN();
  double norm4 = std::numeric_limits<double>::quiet_NaN();
  double cond_term = std::numeric_limits<double>::quiet_NaN();  // E{E(W*-W|W)^2}
  double sq_diff = std::numeric_limits<double>::quiet_NaN();    // E(W*-W)^2
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double c2 = std::numeric_limits<double>::quiet_NaN();
  double term1 = 0.0;
  double term2 = 0.0;
  double bound = 0.0;
};

/// Bounded solution of the normal characterization equation
/// x f'(x) - sigma^2 f''(x) = h(x/sigma) - Eh(Z). Exposes f' (by adaptive
/// quadrature against the mean-zero normal(sigma^2) weight, in the
/// exponential-free form), f'' (algebraic from the equation), and an
/// independent residual check that differentiates f' numerically.
class SteinSolution {
 public:
  SteinSolution(TestFunction h, double sigma, double quad_tol = 1e-10);

  double fprime(double x) const;
  double fsecond(double x) const;
  /// x f'(x) - sigma^2 * central-difference f''(x) - (h(x/sigma) - Phi h).
  double equation_residual(double x) const;
  double phi_h() const { return phi_h_; }

 private:
  double centered(double x) const;  // h(x/sigma) - Phi h

  TestFunction h_;
  double sigma_;
  double tol_;
  double phi_h_;
};

SteinSolution stein_solution(const TestFunction& h, double sigma);

/// ||f^(j)|| <= h_norm / (j sigma^j).
double solution_norm_bound(double sigma, int j, double h_norm);

/// ||h'''|| sqrt(cond_var) / (3 sigma) + ||h''''|| sq_diff / (8 sigma^2)
/// where cond_var = E{E(W*-W|W)^2} and sq_diff = E(W*-W)^2.
BoundReport zero_bias_bound(double sigma, const TestFunction& h,
                            double cond_var, double sq_diff);

/// n^-1 (||h'''||/3 + ||h''''|| EX^4 / 6) for standardized i.i.d. summands
/// with vanishing third moment (|ex3| <= 1e-12 enforced).
BoundReport iid_fourth_moment_bound(std::int64_t n, double ex4,
                                    const TestFunction& h, double ex3 = 0.0);

/// ||h'''|| E|X|^3 / (2 sqrt(n)) for standardized i.i.d. summands.
BoundReport clt_iid_bound(std::int64_t n, double abs3, const TestFunction& h);

struct GapEstimate {
  double gap = 0.0;
  double stderr_ = 0.0;
  bool exact = true;
};

/// E h(W/sigma) - Eh(Z), exact atom sum; error bar 0.
GapEstimate expectation_gap(const DiscreteDistribution& wlaw, double sigma,
                            const TestFunction& h);

/// Monte Carlo version over precomputed W draws, with standard error.
GapEstimate expectation_gap_mc(std::span<const double> w, double sigma,
                               const TestFunction& h);

}  // namespace zb
