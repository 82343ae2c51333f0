#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zb/discrete_distribution.hpp"
#include "zb/pair_distribution.hpp"
#include "zb/piecewise_uniform.hpp"
#include "zb/polynomial.hpp"
#include "zb/rng.hpp"

namespace zb {

/// Sum of independent mean-zero summands W = X_1 + ... + X_n. Square-bias
/// pairs and replacement weights are precomputed at construction.
class SumModel {
 public:
  std::span<const DiscreteDistribution> summands() const { return summands_; }
  std::span<const double> variances() const { return variances_; }
  double total_variance() const { return total_variance_; }
  const PairDistribution& square_bias(std::size_t i) const {
    return pairs_[i];
  }
  std::size_t count() const { return summands_.size(); }

 private:
  friend SumModel make_sum_model(std::vector<DiscreteDistribution> summands);
  SumModel() = default;

  std::vector<DiscreteDistribution> summands_;
  std::vector<PairDistribution> pairs_;
  std::vector<double> variances_;
  double total_variance_ = 0.0;
};

/// Requires every summand mean-zero within 1e-12 and positive total
/// variance.
SumModel make_sum_model(std::vector<DiscreteDistribution> summands);

/// Replacement index weights sigma_i^2 / sigma^2, normalized exactly.
std::vector<double> replacement_weights(const SumModel& model);

/// One coupled draw. `summands` are the drawn X_1..X_n; w is their sum;
/// w_star replaces summand `index` by the interpolated square-bias pair.
struct CouplingSample {
  double w = 0.0;
  double w_star = 0.0;
  double u = 0.0;
  std::size_t index = 0;
  std::vector<double> summands;
  double replaced = 0.0;
  double hat_prime = 0.0;
  double hat_dprime = 0.0;
};

CouplingSample independent_sum_coupling(const SumModel& model, Rng& rng);

/// Exact law of W by convolution.
DiscreteDistribution sum_law(const SumModel& model);

/// Exact law of the coupled w_star (uniform interpolation handled
/// symbolically). Equals the zero-bias law of sum_law(model).
PiecewiseUniformDensity independent_coupling_density(const SumModel& model);

/// One weighted outcome of the i-th replacement law: the off-index values
/// X_j (j != i, index order), the swapped coordinate pair, and its mass.
struct FamilyOutcome {
  std::vector<double> others;
  double xi_prime = 0.0;
  double xi_dprime = 0.0;
  double prob = 0.0;
};

/// Finite replacement family: for each index i a joint law on
/// (X_1..X_{i-1}, X_i', X_i'', X_{i+1}..X_n). Construction checks shape
/// only; the distributional conditions (swap symmetry, marginal agreement,
/// the linearity identity) are verified by verify_family_conditions so that
/// deliberately broken families can still be loaded and reported on.
class DependentFamily {
 public:
  std::size_t n() const { return per_index_.size(); }
  std::span<const FamilyOutcome> outcomes(std::size_t i) const {
    return per_index_[i];
  }
  /// v_i^2 = E(X_i' - X_i'')^2 under the i-th law.
  double v_squared(std::size_t i) const { return v2_[i]; }
  double sum_v_squared() const;
  /// Var W under the base marginal (X_i'' dropped at index 0).
  double sigma_squared() const { return sigma2_; }

 private:
  friend DependentFamily make_dependent_family(
      std::vector<std::vector<FamilyOutcome>> per_index);
  DependentFamily() = default;

  std::vector<std::vector<FamilyOutcome>> per_index_;
  std::vector<double> v2_;
  double sigma2_ = 0.0;
};

DependentFamily make_dependent_family(
    std::vector<std::vector<FamilyOutcome>> per_index);

/// rho = 1 - sum_i v_i^2 / (2 sigma^2).
double rho_from_family(const DependentFamily& fam);

/// Exact-enumeration residuals of the family conditions.
struct FamilyConditionReport {
  double swap_residual = 0.0;      // max mass asymmetry under the swap
  double marginal_residual = 0.0;  // max cross-index marginal disagreement
  double mass_residual = 0.0;      // max |total mass - 1| over indices
  double linearity_residual = 0.0; // |sum_i E X_i' f(W_i + X_i'') - rho E W f(W)|
  double regression_residual = 0.0;  // NaN unless requested
  double rho = 0.0;

  double max_residual() const;  // ignores a NaN regression residual
};

/// `check_regression` additionally verifies the conditional-mean identity
/// E{X_i' | W_i + X_i''} = (rho/n)(W_i + X_i'') by enumeration.
FamilyConditionReport verify_family_conditions(const DependentFamily& fam,
                                               const Polynomial& f,
                                               bool check_regression = false);

/// Draws I with P(I=i) = v_i^2 / sum v_j^2, a hatted vector from the i-th
/// law reweighted by (x_i' - x_i'')^2 / v_i^2, and interpolates. The base
/// draw for w uses independent randomness (the construction specifies the
/// w_star marginal; it does not single out a joint law).
CouplingSample dependent_coupling(const DependentFamily& fam, Rng& rng);

/// Exact law of dependent_coupling's w_star, uniform interpolation handled
/// symbolically. Equals the zero-bias law of the base W for valid families.
PiecewiseUniformDensity dependent_coupling_density(const DependentFamily& fam);

/// Exact base law of W (from the index-0 marginal).
DiscreteDistribution family_sum_law(const DependentFamily& fam);

/// Replacement family with X_i', X_i'' independent replicates of X_i:
/// the independent-sum special case.
DependentFamily independent_family(const SumModel& model);

}  // namespace zb
