#include "zb/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "zb/summation.hpp"
#include "zb/zero_bias.hpp"

namespace zb {

namespace {

// Inverse-CDF index draw over unnormalized nonnegative weights.
std::size_t draw_index(std::span<const double> weights, double total,
                       Rng& rng) {
  const double u = rng.uniform01() * total;
  CompensatedSum run;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    run.add(weights[i]);
    if (u < run.value()) return i;
  }
  return weights.size() - 1;
}

double outcome_rest_sum(const FamilyOutcome& o) {
  CompensatedSum s;
  for (double x : o.others) s.add(x);
  return s.value();
}

}  // namespace

SumModel make_sum_model(std::vector<DiscreteDistribution> summands) {
  if (summands.empty())
    throw std::invalid_argument("make_sum_model: no summands");
  SumModel m;
  m.summands_ = std::move(summands);
  m.variances_.reserve(m.summands_.size());
  m.pairs_.reserve(m.summands_.size());
  CompensatedSum total;
  for (const DiscreteDistribution& d : m.summands_) {
    if (std::abs(moment(d, 1)) > 1e-12)
      throw std::invalid_argument("make_sum_model: summand mean deviates from 0");
    const double v = moment(d, 2);
    if (!(v > 0.0))
      throw std::invalid_argument("make_sum_model: degenerate summand");
    m.variances_.push_back(v);
    total.add(v);
    m.pairs_.push_back(square_bias_pair(d));
  }
  m.total_variance_ = total.value();
  return m;
}

std::vector<double> replacement_weights(const SumModel& model) {
  if (!(model.total_variance() > 0.0))
    throw std::invalid_argument("replacement_weights: zero total variance");
  std::vector<double> w(model.count());
  for (std::size_t i = 0; i < model.count(); ++i)
    w[i] = model.variances()[i] / model.total_variance();
  return w;
}

CouplingSample independent_sum_coupling(const SumModel& model, Rng& rng) {
  CouplingSample s;
  s.summands.reserve(model.count());
  for (std::size_t i = 0; i < model.count(); ++i)
    s.summands.push_back(model.summands()[i].sample_one(rng));
  CompensatedSum w;
  for (double x : s.summands) w.add(x);
  s.w = w.value();

  s.index = draw_index(model.variances(), model.total_variance(), rng);
  const auto [hp, hpp] = model.square_bias(s.index).sample(rng);
  s.hat_prime = hp;
  s.hat_dprime = hpp;
  s.u = rng.uniform01();
  s.replaced = s.summands[s.index];

  CompensatedSum rest;
  for (std::size_t i = 0; i < model.count(); ++i)
    if (i != s.index) rest.add(s.summands[i]);
  s.w_star = rest.value() + s.u * hp + (1.0 - s.u) * hpp;
  return s;
}

DiscreteDistribution sum_law(const SumModel& model) {
  DiscreteDistribution acc = model.summands()[0];
  for (std::size_t i = 1; i < model.count(); ++i)
    acc = convolve(acc, model.summands()[i]);
  return acc;
}

PiecewiseUniformDensity independent_coupling_density(const SumModel& model) {
  std::vector<WeightedPair> pairs;
  for (std::size_t i = 0; i < model.count(); ++i) {
    const double weight = model.variances()[i] / model.total_variance();
    // Law of W_i = W - X_i.
    DiscreteDistribution rest = make_discrete({0.0}, {1.0});
    for (std::size_t j = 0; j < model.count(); ++j)
      if (j != i) rest = convolve(rest, model.summands()[j]);
    for (const WeightedPair& p : model.square_bias(i).pairs())
      for (std::size_t k = 0; k < rest.size(); ++k)
        pairs.push_back({rest.atoms()[k] + p.x_prime,
                         rest.atoms()[k] + p.x_dprime,
                         weight * p.prob * rest.probs()[k]});
  }
  return interpolated_density(make_pair_distribution(std::move(pairs), true));
}

DependentFamily make_dependent_family(
    std::vector<std::vector<FamilyOutcome>> per_index) {
  if (per_index.empty())
    throw std::invalid_argument("make_dependent_family: no indices");
  const std::size_t n = per_index.size();
  for (const auto& outcomes : per_index) {
    if (outcomes.empty())
      throw std::invalid_argument("make_dependent_family: empty index law");
    for (const FamilyOutcome& o : outcomes) {
      if (o.others.size() + 1 != n)
        throw std::invalid_argument(
            "make_dependent_family: outcome arity mismatch");
      if (!(o.prob >= 0.0))
        throw std::invalid_argument("make_dependent_family: negative mass");
    }
  }

  DependentFamily fam;
  fam.per_index_ = std::move(per_index);
  fam.v2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum mass, v2;
    for (const FamilyOutcome& o : fam.per_index_[i]) {
      mass.add(o.prob);
      const double d = o.xi_prime - o.xi_dprime;
      v2.add(o.prob * d * d);
    }
    if (!(mass.value() > 0.0))
      throw std::invalid_argument("make_dependent_family: zero index mass");
    fam.v2_[i] = v2.value() / mass.value();
  }

  // Base variance from the index-0 marginal (X_0'' dropped).
  CompensatedSum mass, ew, ew2;
  for (const FamilyOutcome& o : fam.per_index_[0]) {
    const double w = o.xi_prime + outcome_rest_sum(o);
    mass.add(o.prob);
    ew.add(o.prob * w);
    ew2.add(o.prob * w * w);
  }
  const double mean = ew.value() / mass.value();
  fam.sigma2_ = ew2.value() / mass.value() - mean * mean;
  return fam;
}

double DependentFamily::sum_v_squared() const {
  CompensatedSum s;
  for (double v : v2_) s.add(v);
  return s.value();
}

double rho_from_family(const DependentFamily& fam) {
  if (!(fam.sigma_squared() > 0.0))
    throw std::invalid_argument("rho_from_family: zero variance");
  return 1.0 - fam.sum_v_squared() / (2.0 * fam.sigma_squared());
}

double FamilyConditionReport::max_residual() const {
  double m = std::max({swap_residual, marginal_residual, mass_residual,
                       linearity_residual});
  if (std::isfinite(regression_residual))
    m = std::max(m, regression_residual);
  return m;
}

FamilyConditionReport verify_family_conditions(const DependentFamily& fam,
                                               const Polynomial& f,
                                               bool check_regression) {
  FamilyConditionReport rep;
  rep.regression_residual = std::numeric_limits<double>::quiet_NaN();
  rep.rho = rho_from_family(fam);
  const std::size_t n = fam.n();

  using VecKey = std::vector<double>;
  std::vector<std::map<VecKey, double>> marginals(n);

  for (std::size_t i = 0; i < n; ++i) {
    // Swap symmetry: mass of (others, a, b) equals mass of (others, b, a).
    std::map<std::pair<VecKey, std::pair<double, double>>, double> mass;
    CompensatedSum total;
    for (const FamilyOutcome& o : fam.outcomes(i)) {
      mass[{o.others, {o.xi_prime, o.xi_dprime}}] += o.prob;
      total.add(o.prob);

      VecKey full(o.others.begin(), o.others.end());
      full.insert(full.begin() + static_cast<std::ptrdiff_t>(i), o.xi_prime);
      marginals[i][full] += o.prob;
    }
    rep.mass_residual =
        std::max(rep.mass_residual, std::abs(total.value() - 1.0));
    for (const auto& [key, m] : mass) {
      const auto it =
          mass.find({key.first, {key.second.second, key.second.first}});
      const double other = it == mass.end() ? 0.0 : it->second;
      rep.swap_residual = std::max(rep.swap_residual, std::abs(m - other));
    }
  }

  // Marginal agreement across indices.
  for (std::size_t i = 1; i < n; ++i) {
    for (const auto& [key, m] : marginals[0]) {
      const auto it = marginals[i].find(key);
      const double other = it == marginals[i].end() ? 0.0 : it->second;
      rep.marginal_residual =
          std::max(rep.marginal_residual, std::abs(m - other));
    }
    for (const auto& [key, m] : marginals[i])
      if (marginals[0].find(key) == marginals[0].end())
        rep.marginal_residual = std::max(rep.marginal_residual, m);
  }

  // Linearity identity: sum_i E X_i' f(W_i + X_i'') = rho E W f(W).
  CompensatedSum lhs;
  for (std::size_t i = 0; i < n; ++i)
    for (const FamilyOutcome& o : fam.outcomes(i))
      lhs.add(o.prob * o.xi_prime * f(outcome_rest_sum(o) + o.xi_dprime));
  CompensatedSum rhs;
  for (const FamilyOutcome& o : fam.outcomes(0)) {
    const double w = o.xi_prime + outcome_rest_sum(o);
    rhs.add(o.prob * w * f(w));
  }
  rep.linearity_residual = std::abs(lhs.value() - rep.rho * rhs.value());

  if (check_regression) {
    // E{X_i' | W_i + X_i''} = (rho/n)(W_i + X_i'').
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> keys, wsum, psum;
      for (const FamilyOutcome& o : fam.outcomes(i))
        keys.push_back(outcome_rest_sum(o) + o.xi_dprime);
      std::sort(keys.begin(), keys.end());
      std::vector<double> reps;
      for (double k : keys)
        if (reps.empty() || k - reps.back() > 1e-9) reps.push_back(k);
      wsum.assign(reps.size(), 0.0);
      psum.assign(reps.size(), 0.0);
      for (const FamilyOutcome& o : fam.outcomes(i)) {
        const double s = outcome_rest_sum(o) + o.xi_dprime;
        const auto it = std::lower_bound(reps.begin(), reps.end(), s - 1e-9);
        const std::size_t g = static_cast<std::size_t>(it - reps.begin());
        wsum[g] += o.prob * o.xi_prime;
        psum[g] += o.prob;
      }
      for (std::size_t g = 0; g < reps.size(); ++g) {
        if (psum[g] <= 0.0) continue;
        const double cond = wsum[g] / psum[g];
        worst = std::max(
            worst, std::abs(cond - rep.rho / static_cast<double>(n) * reps[g]));
      }
    }
    rep.regression_residual = worst;
  }
  return rep;
}

CouplingSample dependent_coupling(const DependentFamily& fam, Rng& rng) {
  const double vtotal = fam.sum_v_squared();
  if (!(vtotal > 0.0))
    throw std::invalid_argument("dependent_coupling: all v_i^2 are zero");
  const std::size_t n = fam.n();

  CouplingSample s;
  // Base draw for w from the index-0 marginal, independent randomness.
  {
    CompensatedSum mass;
    for (const FamilyOutcome& o : fam.outcomes(0)) mass.add(o.prob);
    const double u = rng.uniform01() * mass.value();
    CompensatedSum run;
    const FamilyOutcome* pick = &fam.outcomes(0).back();
    for (const FamilyOutcome& o : fam.outcomes(0)) {
      run.add(o.prob);
      if (u < run.value()) {
        pick = &o;
        break;
      }
    }
    s.summands.push_back(pick->xi_prime);
    s.summands.insert(s.summands.end(), pick->others.begin(),
                      pick->others.end());
    s.w = pick->xi_prime + outcome_rest_sum(*pick);
  }

  std::vector<double> v2(fam.n());
  for (std::size_t i = 0; i < n; ++i) v2[i] = fam.v_squared(i);
  s.index = draw_index(v2, vtotal, rng);

  // Reweighted draw: mass proportional to (x' - x'')^2 p.
  CompensatedSum total;
  for (const FamilyOutcome& o : fam.outcomes(s.index)) {
    const double d = o.xi_prime - o.xi_dprime;
    total.add(d * d * o.prob);
  }
  const double u = rng.uniform01() * total.value();
  CompensatedSum run;
  const FamilyOutcome* pick = &fam.outcomes(s.index).back();
  for (const FamilyOutcome& o : fam.outcomes(s.index)) {
    const double d = o.xi_prime - o.xi_dprime;
    run.add(d * d * o.prob);
    if (u < run.value()) {
      pick = &o;
      break;
    }
  }
  s.hat_prime = pick->xi_prime;
  s.hat_dprime = pick->xi_dprime;
  s.u = rng.uniform01();
  s.w_star = s.u * s.hat_prime + (1.0 - s.u) * s.hat_dprime +
             outcome_rest_sum(*pick);
  return s;
}

PiecewiseUniformDensity dependent_coupling_density(const DependentFamily& fam) {
  const double vtotal = fam.sum_v_squared();
  if (!(vtotal > 0.0))
    throw std::invalid_argument(
        "dependent_coupling_density: all v_i^2 are zero");
  std::vector<WeightedPair> pairs;
  for (std::size_t i = 0; i < fam.n(); ++i) {
    CompensatedSum mass;
    for (const FamilyOutcome& o : fam.outcomes(i)) mass.add(o.prob);
    for (const FamilyOutcome& o : fam.outcomes(i)) {
      const double d = o.xi_prime - o.xi_dprime;
      if (d == 0.0) continue;
      const double rest = outcome_rest_sum(o);
      pairs.push_back({rest + o.xi_prime, rest + o.xi_dprime,
                       d * d * (o.prob / mass.value()) / vtotal});
    }
  }
  return interpolated_density(
      make_pair_distribution(std::move(pairs), /*exchangeable=*/false));
}

DiscreteDistribution family_sum_law(const DependentFamily& fam) {
  CompensatedSum mass;
  for (const FamilyOutcome& o : fam.outcomes(0)) mass.add(o.prob);
  std::vector<double> values, probs;
  values.reserve(fam.outcomes(0).size());
  probs.reserve(fam.outcomes(0).size());
  for (const FamilyOutcome& o : fam.outcomes(0)) {
    values.push_back(o.xi_prime + outcome_rest_sum(o));
    probs.push_back(o.prob / mass.value());
  }
  merge_close(values, probs, 1e-9);
  return make_discrete(std::move(values), std::move(probs));
}

DependentFamily independent_family(const SumModel& model) {
  const std::size_t n = model.count();
  std::vector<std::vector<FamilyOutcome>> per_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Product over the off-index atom grids, times an independent pair of
    // replicates at index i.
    std::vector<FamilyOutcome> outcomes;
    std::vector<std::size_t> which;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) which.push_back(j);

    std::vector<std::size_t> idx(which.size(), 0);
    while (true) {
      FamilyOutcome base;
      base.others.resize(which.size());
      double p = 1.0;
      for (std::size_t k = 0; k < which.size(); ++k) {
        const DiscreteDistribution& d = model.summands()[which[k]];
        base.others[k] = d.atoms()[idx[k]];
        p *= d.probs()[idx[k]];
      }
      const DiscreteDistribution& di = model.summands()[i];
      for (std::size_t a = 0; a < di.size(); ++a)
        for (std::size_t b = 0; b < di.size(); ++b) {
          FamilyOutcome o = base;
          o.xi_prime = di.atoms()[a];
          o.xi_dprime = di.atoms()[b];
          o.prob = p * di.probs()[a] * di.probs()[b];
          outcomes.push_back(std::move(o));
        }
      if (outcomes.size() > 200000)
        throw std::runtime_error("independent_family: law too large");

      std::size_t k = 0;
      for (; k < which.size(); ++k) {
        if (++idx[k] < model.summands()[which[k]].size()) break;
        idx[k] = 0;
      }
      if (k == which.size()) break;
    }
    per_index[i] = std::move(outcomes);
  }
  return make_dependent_family(std::move(per_index));
}

}  // namespace zb
