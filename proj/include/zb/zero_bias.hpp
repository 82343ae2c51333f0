#pragma once

#include "zb/discrete_distribution.hpp"
#include "zb/pair_distribution.hpp"
#include "zb/piecewise_uniform.hpp"
#include "zb/polynomial.hpp"
#include "zb/rng.hpp"

namespace zb {

/// Zero-bias law of a mean-zero d: density sigma^-2 E[X; X > w], constant
/// between consecutive atoms. Requires |mean| <= 1e-12 and variance > 0.
PiecewiseUniformDensity zero_bias_density(const DiscreteDistribution& d);

/// n-th moment of the zero-bias law via the identity
/// sigma^2 E(X*)^n = EX^{n+2} / (n+1), n >= 1.
double zero_bias_moment(const DiscreteDistribution& d, int n);

/// Square-bias pair law: mass((u,v)) = (u-v)^2 p(u) p(v) / (2 sigma^2).
/// Exchangeable, no diagonal mass. Interpolating the pair with an
/// independent uniform realizes the zero-bias law.
PairDistribution square_bias_pair(const DiscreteDistribution& d);

/// U x' + (1-U) x'' with a fresh pair draw and independent U.
double sample_zero_bias(const PairDistribution& pair, Rng& rng);

/// Same with U forced (test hook).
double sample_zero_bias(const PairDistribution& pair, Rng& rng, double u);

/// Reweights an exchangeable mean-zero joint by (w - w')^2 / E(W - W')^2.
/// Interpolating the result realizes the zero-bias law of the marginal
/// (exact for joints with a linear conditional mean, e.g. products and
/// sampling-type pairs). Throws on non-exchangeable or degenerate input.
PairDistribution exchangeable_pair_zero_bias(const PairDistribution& joint);

/// Exact law of U x' + (1-U) x'': the uniform mixture over pair intervals.
/// Breakpoints closer than `snap` are coalesced before accumulation.
PiecewiseUniformDensity interpolated_density(const PairDistribution& pair,
                                             double snap = 1e-9);

/// E X f(X) - sigma^2 E f'(X*), left side by exact atom summation, right
/// side by exact piecewise-polynomial integration.
double characterization_residual(const DiscreteDistribution& d,
                                 const Polynomial& f);

}  // namespace zb
