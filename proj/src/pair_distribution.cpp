#include "zb/pair_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "zb/summation.hpp"

namespace zb {

PairDistribution make_pair_distribution(std::vector<WeightedPair> pairs,
                                        bool exchangeable) {
  if (pairs.empty())
    throw std::invalid_argument("make_pair_distribution: empty law");
  CompensatedSum total;
  for (const WeightedPair& p : pairs) {
    if (!std::isfinite(p.x_prime) || !std::isfinite(p.x_dprime))
      throw std::invalid_argument("make_pair_distribution: non-finite value");
    if (!(p.prob >= 0.0))
      throw std::invalid_argument("make_pair_distribution: negative mass");
    total.add(p.prob);
  }
  if (std::abs(total.value() - 1.0) > 1e-12)
    throw std::invalid_argument("make_pair_distribution: mass " +
                                std::to_string(total.value()) +
                                " deviates from 1 beyond 1e-12");
  if (exchangeable) {
    std::map<std::pair<double, double>, double> mass;
    for (const WeightedPair& p : pairs)
      mass[{p.x_prime, p.x_dprime}] += p.prob;
    for (const auto& [key, m] : mass) {
      const auto it = mass.find({key.second, key.first});
      const double other = it == mass.end() ? 0.0 : it->second;
      if (std::abs(m - other) > 1e-12)
        throw std::invalid_argument(
            "make_pair_distribution: exchangeable flag set but swap "
            "symmetry fails");
    }
  }

  PairDistribution d;
  d.pairs_ = std::move(pairs);
  d.exchangeable_ = exchangeable;
  d.cum_.resize(d.pairs_.size());
  CompensatedSum run;
  for (std::size_t i = 0; i < d.pairs_.size(); ++i) {
    run.add(d.pairs_[i].prob);
    d.cum_[i] = run.value();
  }
  d.cum_.back() = 1.0;
  return d;
}

double PairDistribution::total_mass() const {
  CompensatedSum s;
  for (const WeightedPair& p : pairs_) s.add(p.prob);
  return s.value();
}

std::pair<double, double> PairDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const std::size_t idx =
      std::min(static_cast<std::size_t>(it - cum_.begin()), pairs_.size() - 1);
  return {pairs_[idx].x_prime, pairs_[idx].x_dprime};
}

DiscreteDistribution marginal_first(const PairDistribution& pair) {
  std::vector<double> values, probs;
  values.reserve(pair.pairs().size());
  probs.reserve(pair.pairs().size());
  for (const WeightedPair& p : pair.pairs()) {
    values.push_back(p.x_prime);
    probs.push_back(p.prob);
  }
  return make_discrete(std::move(values), std::move(probs));
}

}  // namespace zb
