#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zb/rng.hpp"

namespace zb {

/// Raw moments plus the absolute third moment of a finite discrete law.
struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double third = 0.0;      // EX^3
  double fourth = 0.0;     // EX^4
  double abs_third = 0.0;  // E|X|^3
};

/// Finite discrete law. Atoms are strictly increasing, probabilities are
/// positive and sum to 1; both are fixed at construction and immutable.
class DiscreteDistribution {
 public:
  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return atoms_.size(); }

  double support_min() const { return atoms_.front(); }
  double support_max() const { return atoms_.back(); }

  /// P(X <= x).
  double cdf(double x) const;

  /// One draw by CDF inversion.
  double sample_one(Rng& rng) const;

 private:
  friend DiscreteDistribution make_discrete(std::vector<double> atoms,
                                            std::vector<double> probs);
  DiscreteDistribution() = default;

  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cum_;  // cumulative probabilities, back() == 1
};

/// Validates, sorts, merges exactly-equal atoms, drops zero-probability
/// atoms, and renormalizes. Throws std::invalid_argument on length mismatch,
/// a negative probability, or a probability sum off 1 by more than 1e-9.
DiscreteDistribution make_discrete(std::vector<double> atoms,
                                   std::vector<double> probs);

/// Exact raw moment sum(p_i * a_i^k), compensated.
double moment(const DiscreteDistribution& d, int k);

/// Exact absolute moment sum(p_i * |a_i|^k), compensated.
double absolute_moment(const DiscreteDistribution& d, int k);

MomentSummary moment_summary(const DiscreteDistribution& d);

/// Shifts atoms so the mean is 0 within 1e-14 (iterating the subtraction
/// when one pass leaves round-off drift).
DiscreteDistribution center(const DiscreteDistribution& d);

/// count i.i.d. draws by CDF inversion; deterministic given the stream.
std::vector<double> sample(const DiscreteDistribution& d, Rng& rng,
                           std::size_t count);

/// Law of X + Y for independent X ~ a, Y ~ b. Sums closer than `tol` are
/// coalesced (weighted mean) so enumeration round-off cannot split atoms.
DiscreteDistribution convolve(const DiscreteDistribution& a,
                              const DiscreteDistribution& b,
                              double tol = 1e-9);

/// Law of the sum of n i.i.d. copies of d.
DiscreteDistribution iid_sum_law(const DiscreteDistribution& d, std::size_t n);

/// In-place clustering of a weighted value list: values within `tol` of the
/// running cluster are merged to their probability-weighted mean. Inputs
/// need not be sorted.
void merge_close(std::vector<double>& values, std::vector<double>& probs,
                 double tol);

}  // namespace zb
