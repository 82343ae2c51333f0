#pragma once

#include <span>
#include <utility>
#include <vector>

#include "zb/discrete_distribution.hpp"
#include "zb/rng.hpp"

namespace zb {

struct WeightedPair {
  double x_prime = 0.0;
  double x_dprime = 0.0;
  double prob = 0.0;
};

/// Finite joint law on ordered pairs. When flagged exchangeable, the mass of
/// (u, v) equals the mass of (v, u) within 1e-12.
class PairDistribution {
 public:
  std::span<const WeightedPair> pairs() const { return pairs_; }
  bool exchangeable() const { return exchangeable_; }
  double total_mass() const;

  std::pair<double, double> sample(Rng& rng) const;

 private:
  friend PairDistribution make_pair_distribution(std::vector<WeightedPair> pairs,
                                                 bool exchangeable);
  PairDistribution() = default;

  std::vector<WeightedPair> pairs_;
  std::vector<double> cum_;
  bool exchangeable_ = false;
};

/// Validates nonnegative masses summing to 1 within 1e-12 and, when the
/// exchangeable flag is set, swap symmetry within 1e-12.
PairDistribution make_pair_distribution(std::vector<WeightedPair> pairs,
                                        bool exchangeable);

/// Law of the first coordinate.
DiscreteDistribution marginal_first(const PairDistribution& pair);

}  // namespace zb
