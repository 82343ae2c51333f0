#pragma once

#include <string>
#include <vector>

#include "zb/coupling.hpp"
#include "zb/discrete_distribution.hpp"
#include "zb/pair_distribution.hpp"
#include "zb/polynomial.hpp"
#include "zb/rng.hpp"
#include "zb/srs.hpp"

namespace zb {

struct NamedDistribution {
  std::string name;
  DiscreteDistribution dist;
};

struct NamedPopulation {
  std::string name;
  Population pop;
};

/// Small centered laws exercised by the verification suites.
const std::vector<NamedDistribution>& fixture_distributions();

/// Desk-scale populations: symmetric N = 4..7, one asymmetric N = 5 with
/// both odd power sums vanishing, and one N = 6 with duplicate values
/// (bound evaluation only; the coupling needs distinct values).
const std::vector<NamedPopulation>& fixture_populations();

/// Exchangeable 3-atom joint with a linear conditional mean; its reweighted
/// interpolation reproduces the marginal's zero-bias law exactly.
PairDistribution fixture_exchangeable_joint();

/// n i.i.d. uniform{-1,+1} summands.
SumModel fixture_iid_pm1(std::size_t n);

/// Three summands with distinct variances and atom counts.
SumModel fixture_mixed_sum();

/// Random centered law with 2..max_atoms atoms drawn in [-2, 2] and then
/// shifted to mean zero; atoms stay at least 1e-3 apart.
DiscreteDistribution random_centered_distribution(Rng& rng,
                                                  std::size_t max_atoms = 10);

/// Random polynomial of degree <= max_degree, coefficients in [-1, 1].
Polynomial random_polynomial(Rng& rng, int max_degree = 6);

}  // namespace zb
