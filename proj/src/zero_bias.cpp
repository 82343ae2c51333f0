#include "zb/zero_bias.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zb/summation.hpp"

namespace zb {

namespace {

void require_centered(const DiscreteDistribution& d, const char* where) {
  const double mu = moment(d, 1);
  if (std::abs(mu) > 1e-12)
    throw std::invalid_argument(std::string(where) +
                                ": mean deviates from 0 beyond 1e-12");
}

}  // namespace

PiecewiseUniformDensity zero_bias_density(const DiscreteDistribution& d) {
  require_centered(d, "zero_bias_density");
  if (d.size() < 2)
    throw std::invalid_argument("zero_bias_density: zero variance");
  const std::size_t m = d.size();

  // Suffix sums S_k = sum_{j >= k} p_j a_j, accumulated right to left.
  std::vector<double> suffix(m + 1, 0.0);
  CompensatedSum run;
  for (std::size_t j = m; j-- > 0;) {
    run.add(d.probs()[j] * d.atoms()[j]);
    suffix[j] = run.value();
  }

  // Normalizer sum_i S_{i+1} (a_{i+1} - a_i) telescopes to EX^2 - a_0 EX,
  // i.e. exactly the variance for mean-zero input; dividing by the computed
  // value keeps the mass at 1 to machine precision.
  CompensatedSum z;
  for (std::size_t i = 0; i + 1 < m; ++i)
    z.add(suffix[i + 1] * (d.atoms()[i + 1] - d.atoms()[i]));
  if (!(z.value() > 0.0))
    throw std::invalid_argument("zero_bias_density: zero variance");

  std::vector<double> densities(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) densities[i] = suffix[i + 1] / z.value();
  return make_piecewise_density({d.atoms().begin(), d.atoms().end()},
                                std::move(densities));
}

double zero_bias_moment(const DiscreteDistribution& d, int n) {
  if (n < 1) throw std::invalid_argument("zero_bias_moment: order must be >= 1");
  require_centered(d, "zero_bias_moment");
  const double s2 = moment(d, 2);
  if (!(s2 > 0.0))
    throw std::invalid_argument("zero_bias_moment: zero variance");
  return moment(d, n + 2) / ((n + 1) * s2);
}

PairDistribution square_bias_pair(const DiscreteDistribution& d) {
  require_centered(d, "square_bias_pair");
  const double s2 = moment(d, 2);
  if (!(s2 > 0.0))
    throw std::invalid_argument("square_bias_pair: zero variance");
  std::vector<WeightedPair> pairs;
  pairs.reserve(d.size() * d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (i == j) continue;
      const double diff = d.atoms()[i] - d.atoms()[j];
      pairs.push_back({d.atoms()[i], d.atoms()[j],
                       diff * diff * d.probs()[i] * d.probs()[j] / (2.0 * s2)});
    }
  return make_pair_distribution(std::move(pairs), /*exchangeable=*/true);
}

double sample_zero_bias(const PairDistribution& pair, Rng& rng) {
  const auto [xp, xpp] = pair.sample(rng);
  const double u = rng.uniform01();
  return u * xp + (1.0 - u) * xpp;
}

double sample_zero_bias(const PairDistribution& pair, Rng& rng, double u) {
  const auto [xp, xpp] = pair.sample(rng);
  return u * xp + (1.0 - u) * xpp;
}

PairDistribution exchangeable_pair_zero_bias(const PairDistribution& joint) {
  if (!joint.exchangeable())
    throw std::invalid_argument(
        "exchangeable_pair_zero_bias: non-exchangeable input");
  const DiscreteDistribution marg = marginal_first(joint);
  if (std::abs(moment(marg, 1)) > 1e-12)
    throw std::invalid_argument(
        "exchangeable_pair_zero_bias: marginal mean deviates from 0");
  CompensatedSum denom;
  for (const WeightedPair& p : joint.pairs()) {
    const double diff = p.x_prime - p.x_dprime;
    denom.add(diff * diff * p.prob);
  }
  if (!(denom.value() > 1e-15))
    throw std::invalid_argument(
        "exchangeable_pair_zero_bias: degenerate pair (W = W' a.s.)");
  std::vector<WeightedPair> out;
  out.reserve(joint.pairs().size());
  for (const WeightedPair& p : joint.pairs()) {
    const double diff = p.x_prime - p.x_dprime;
    if (diff == 0.0) continue;
    out.push_back({p.x_prime, p.x_dprime, diff * diff * p.prob / denom.value()});
  }
  return make_pair_distribution(std::move(out), /*exchangeable=*/true);
}

PiecewiseUniformDensity interpolated_density(const PairDistribution& pair,
                                             double snap) {
  // Cluster all interval endpoints so round-off cannot split breakpoints.
  std::vector<double> endpoints;
  endpoints.reserve(2 * pair.pairs().size());
  for (const WeightedPair& p : pair.pairs()) {
    endpoints.push_back(p.x_prime);
    endpoints.push_back(p.x_dprime);
  }
  std::sort(endpoints.begin(), endpoints.end());
  std::vector<double> grid;
  std::vector<std::size_t> cluster_start;
  for (std::size_t i = 0; i < endpoints.size();) {
    std::size_t j = i + 1;
    while (j < endpoints.size() && endpoints[j] - endpoints[j - 1] <= snap) ++j;
    CompensatedSum mean;
    for (std::size_t k = i; k < j; ++k) mean.add(endpoints[k]);
    grid.push_back(mean.value() / static_cast<double>(j - i));
    i = j;
  }
  const auto cluster_of = [&](double x) -> std::size_t {
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - grid.begin());
    if (idx == grid.size()) return idx - 1;
    if (idx > 0 && x - grid[idx - 1] < grid[idx] - x) return idx - 1;
    return idx;
  };

  // Difference array of density increments at cluster boundaries.
  std::vector<std::vector<double>> inc(grid.size());
  double dropped = 0.0;
  for (const WeightedPair& p : pair.pairs()) {
    const double lo = std::min(p.x_prime, p.x_dprime);
    const double hi = std::max(p.x_prime, p.x_dprime);
    const std::size_t a = cluster_of(lo);
    const std::size_t b = cluster_of(hi);
    if (a == b) {
      dropped += p.prob;  // interval collapsed by clustering
      continue;
    }
    const double h = p.prob / (grid[b] - grid[a]);
    inc[a].push_back(h);
    inc[b].push_back(-h);
  }
  if (dropped > 1e-13)
    throw std::invalid_argument(
        "interpolated_density: degenerate pair interval carries mass");
  if (grid.size() < 2)
    throw std::invalid_argument("interpolated_density: no usable intervals");

  std::vector<double> densities(grid.size() - 1);
  CompensatedSum level;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    for (double v : inc[k]) level.add(v);
    densities[k] = level.value();
  }
  return make_piecewise_density(std::move(grid), std::move(densities));
}

double characterization_residual(const DiscreteDistribution& d,
                                 const Polynomial& f) {
  require_centered(d, "characterization_residual");
  const double s2 = moment(d, 2);
  if (!(s2 > 0.0))
    throw std::invalid_argument("characterization_residual: zero variance");
  CompensatedSum lhs;
  for (std::size_t i = 0; i < d.size(); ++i)
    lhs.add(d.probs()[i] * d.atoms()[i] * f(d.atoms()[i]));
  const double rhs = s2 * zero_bias_density(d).integrate(f.derivative());
  return lhs.value() - rhs;
}

}  // namespace zb
