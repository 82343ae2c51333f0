#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zb/coupling.hpp"
#include "zb/discrete_distribution.hpp"
#include "zb/piecewise_uniform.hpp"
#include "zb/rng.hpp"
#include "zb/stein.hpp"
#include "zb/test_function.hpp"

namespace zb {

/// Finite population, normalized so the power sums satisfy <1> = <3> = 0
/// and <2> = 1. Values are kept sorted; <k> is cached for k = 1..6.
class Population {
 public:
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool distinct() const { return distinct_; }
  /// <k> = sum of a^k, k = 1..6.
  double power_sum(int k) const;

 private:
  friend Population load_population(std::vector<double> values);

  std::vector<double> values_;
  std::array<double, 7> psum_{};
  bool distinct_ = false;
};

/// Rescales by 1/sqrt(<2>) and validates |<1>|, |<3>| <= 1e-12 after the
/// rescale. Requires at least 2 values and a nonzero sum of squares.
/// Duplicate values are allowed and flagged.
Population load_population(std::vector<double> values);

/// Population of the N/2 values y_j / sqrt(2 sum y^2) and their negatives.
/// Both moment conditions then hold by antisymmetry.
Population symmetrize_population(std::span<const double> y, std::size_t N);

/// Var W = n(N-n) / (N(N-1)) for the sum W of an n-draw, using <2> = 1.
double srs_variance(const Population& pop, std::size_t n);

/// The explicit bound constants for the sampling sum.
struct SrsConstants {
  std::size_t N = 0;
  std::size_t n = 0;
  double sigma2 = 0.0;
  double v1sq = 0.0;  // 2/(N-1)
  double rho = 0.0;   // -n/(N-n)
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double f = 0.0;  // sampling fraction n/N
  double b1 = 0.0;
  double b2 = 0.0;
};

SrsConstants srs_constants(const Population& pop, std::size_t n);

/// Fixed-fraction forms of C1, C2: n4 = n <4>, n6 = n^2 <6>.
std::pair<double, double> asymptotic_constants(double f, double n4, double n6);

/// Ordered without-replacement draw, uniform over the N(N-1)...(N-n+1)
/// ordered vectors.
std::vector<double> sample_srs(const Population& pop, std::size_t n, Rng& rng);

/// Pair (u, v) of distinct population values with probability
/// (u - v)^2 / (2N). Requires distinct values; the total mass, which equals
/// <2>, must be 1 within 1e-12.
std::pair<double, double> draw_q_pair(const Population& pop, Rng& rng);

/// One coupled realization: the sample, the biased pair, the fill-in values
/// hat X_2..hat X_n, the overlap count R, and the interpolated w_star.
struct SrsCouplingSample {
  std::vector<double> sample;  // X_1..X_n
  double hat_prime = 0.0;
  double hat_dprime = 0.0;
  std::vector<double> filled;  // hat X_2..hat X_n
  int r = 0;                   // |{X_2..X_n} cap {hat pair}|
  double u = 0.0;
  double w = 0.0;
  double w_star = 0.0;
};

/// Repeated-draw engine with the quadratic pair table precomputed.
class SrsCoupler {
 public:
  /// Requires distinct values and 0 < n < N-1 (case R=2 needs two spares).
  SrsCoupler(Population pop, std::size_t n);

  SrsCouplingSample draw(Rng& rng) const;
  const Population& population() const { return pop_; }
  std::size_t n() const { return n_; }

 private:
  Population pop_;
  std::size_t n_;
  std::vector<double> pair_cum_;  // over ordered index pairs (i, j), i != j
};

SrsCouplingSample couple_srs(const Population& pop, std::size_t n, Rng& rng);

/// Exact law of W by enumeration over distinct values with multiplicities.
/// Throws std::runtime_error when the visited-state count exceeds
/// `work_cap`.
DiscreteDistribution enumerate_srs(const Population& pop, std::size_t n,
                                   std::size_t work_cap = 2'000'000);

/// One aggregated hatted outcome: (hat X_1', hat X_1'', hat X_2..hat X_n)
/// with its exact probability.
struct SrsHatOutcome {
  std::vector<double> hat;
  double prob = 0.0;
};

/// One elementary coupling outcome: w, the w_star interpolation endpoints
/// a = hat X_1' + sum fill and b = hat X_1'' + sum fill, and its probability.
struct SrsJointOutcome {
  double w = 0.0;
  double a = 0.0;
  double b = 0.0;
  double prob = 0.0;
};

/// Exhaustive enumeration of couple_srs over sample, pair, and fill-in
/// randomness, with the interpolation uniform kept symbolic.
struct SrsCouplingEnumeration {
  std::vector<SrsHatOutcome> hat_law;   // merged over elementary outcomes
  std::vector<SrsJointOutcome> joint;   // unmerged elementary outcomes
  PiecewiseUniformDensity w_star_density() const;
};

SrsCouplingEnumeration enumerate_couple_srs(const Population& pop,
                                            std::size_t n);

/// C1 ||h'''|| / (3 sigma) + C2 ||h''''|| / (8 sigma^2). Distinct values
/// are not required; the constants are continuous in the population.
BoundReport srs_sum_bound(const Population& pop, std::size_t n,
                          const TestFunction& h);

/// Var(E{W*-W|W}) and E(W*-W)^2 against C1^2 and C2.
struct VarianceTermsReport {
  double var_conditional = 0.0;
  double sq_diff = 0.0;
  double c1_sq = 0.0;
  double c2 = 0.0;
  bool var_ok = false;
  bool sq_ok = false;
  bool exact = true;
  double var_stderr = 0.0;
  double sq_stderr = 0.0;
};

/// Exact enumeration path.
VarianceTermsReport verify_variance_terms(const Population& pop,
                                          std::size_t n);

/// Monte Carlo fallback. The inner expectation E[W*-W | sample] is computed
/// in closed form per draw; conditioning on W groups draws by w, which is
/// consistent when the sum law has finitely many repeated values. Standard
/// errors come from 20 replication blocks.
VarianceTermsReport verify_variance_terms_mc(const Population& pop,
                                             std::size_t n, Rng& rng,
                                             std::size_t reps);

/// The explicit replacement family of the sampling sum: for each index the
/// law of an ordered (n+1)-draw arranged as (others, X_i', X_i'').
DependentFamily srs_family(const Population& pop, std::size_t n);

}  // namespace zb
