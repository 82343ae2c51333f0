#include "zb/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "zb/summation.hpp"

namespace zb {

const std::vector<NamedDistribution>& fixture_distributions() {
  static const std::vector<NamedDistribution> fixtures = [] {
    std::vector<NamedDistribution> v;
    v.push_back({"pm1", make_discrete({-1.0, 1.0}, {0.5, 0.5})});
    v.push_back(
        {"three-point", make_discrete({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25})});
    v.push_back({"asym2", make_discrete({-2.0, 0.5}, {0.2, 0.8})});
    v.push_back({"skewed2", make_discrete({-1.0, 2.0}, {2.0 / 3.0, 1.0 / 3.0})});
    v.push_back({"five-point",
                 center(make_discrete({-1.5, -0.5, 0.0, 0.75, 1.25},
                                      {0.1, 0.2, 0.3, 0.25, 0.15}))});
    return v;
  }();
  return fixtures;
}

const std::vector<NamedPopulation>& fixture_populations() {
  static const std::vector<NamedPopulation> fixtures = [] {
    std::vector<NamedPopulation> v;
    const double y4[] = {1.0, 2.0};
    v.push_back({"sym4", symmetrize_population(y4, 4)});
    v.push_back({"sym5", load_population({-2.0, -1.0, 0.0, 1.0, 2.0})});
    // Asymmetric with both odd power sums vanishing: the quadratic pair
    // (1 +- sqrt(73))/2 balances the cubes of {-4, 1, 2}.
    const double s = std::sqrt(73.0);
    v.push_back({"asym5", load_population(
                              {-4.0, (1.0 - s) / 2.0, 1.0, 2.0, (1.0 + s) / 2.0})});
    v.push_back(
        {"sym6", load_population({-3.0, -2.0, -1.0, 1.0, 2.0, 3.0})});
    v.push_back({"sym7", load_population(
                             {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0})});
    v.push_back(
        {"dup6", load_population({-2.0, -1.0, -1.0, 1.0, 1.0, 2.0})});
    return v;
  }();
  return fixtures;
}

PairDistribution fixture_exchangeable_joint() {
  const double atoms[] = {-1.0, 0.0, 1.0};
  const double m[3][3] = {{0.15, 0.10, 0.05},
                          {0.10, 0.20, 0.10},
                          {0.05, 0.10, 0.15}};
  std::vector<WeightedPair> pairs;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      pairs.push_back({atoms[i], atoms[j], m[i][j]});
  return make_pair_distribution(std::move(pairs), /*exchangeable=*/true);
}

SumModel fixture_iid_pm1(std::size_t n) {
  std::vector<DiscreteDistribution> summands(
      n, make_discrete({-1.0, 1.0}, {0.5, 0.5}));
  return make_sum_model(std::move(summands));
}

SumModel fixture_mixed_sum() {
  std::vector<DiscreteDistribution> summands;
  summands.push_back(make_discrete({-1.0, 1.0}, {0.5, 0.5}));
  summands.push_back(make_discrete({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25}));
  summands.push_back(make_discrete({-1.0, 0.25}, {0.2, 0.8}));
  return make_sum_model(std::move(summands));
}

DiscreteDistribution random_centered_distribution(Rng& rng,
                                                  std::size_t max_atoms) {
  const std::size_t k = 2 + rng.below(std::max<std::size_t>(max_atoms, 2) - 1);
  std::vector<double> atoms;
  while (atoms.size() < k) {
    const double a = -2.0 + 4.0 * rng.uniform01();
    bool ok = true;
    for (double b : atoms)
      if (std::abs(a - b) < 1e-3) {
        ok = false;
        break;
      }
    if (ok) atoms.push_back(a);
  }
  std::vector<double> probs(k);
  CompensatedSum total;
  for (double& p : probs) {
    p = 0.05 + rng.uniform01();
    total.add(p);
  }
  for (double& p : probs) p /= total.value();
  return center(make_discrete(std::move(atoms), std::move(probs)));
}

Polynomial random_polynomial(Rng& rng, int max_degree) {
  const int deg = static_cast<int>(
      rng.below(static_cast<std::size_t>(max_degree) + 1));
  std::vector<double> coeffs(static_cast<std::size_t>(deg) + 1);
  for (double& c : coeffs) c = -1.0 + 2.0 * rng.uniform01();
  return Polynomial(std::move(coeffs));
}

}  // namespace zb
