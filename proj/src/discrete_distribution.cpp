#include "zb/discrete_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zb/summation.hpp"

namespace zb {

namespace {

// Sorts (values, probs) jointly by value.
void sort_by_value(std::vector<double>& values, std::vector<double>& probs) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> v(values.size()), p(values.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    v[k] = values[order[k]];
    p[k] = probs[order[k]];
  }
  values = std::move(v);
  probs = std::move(p);
}

}  // namespace

void merge_close(std::vector<double>& values, std::vector<double>& probs,
                 double tol) {
  if (values.size() != probs.size())
    throw std::invalid_argument("merge_close: length mismatch");
  if (values.empty()) return;
  sort_by_value(values, probs);
  std::vector<double> out_v, out_p;
  out_v.reserve(values.size());
  out_p.reserve(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    // Chain clustering: extend while the next value stays within tol of the
    // previous member.
    while (j < values.size() && values[j] - values[j - 1] <= tol) ++j;
    CompensatedSum mass, weighted;
    for (std::size_t k = i; k < j; ++k) {
      mass.add(probs[k]);
      weighted.add(probs[k] * values[k]);
    }
    const double m = mass.value();
    out_v.push_back(m > 0.0 ? weighted.value() / m : values[i]);
    out_p.push_back(m);
    i = j;
  }
  values = std::move(out_v);
  probs = std::move(out_p);
}

DiscreteDistribution make_discrete(std::vector<double> atoms,
                                   std::vector<double> probs) {
  if (atoms.size() != probs.size())
    throw std::invalid_argument("make_discrete: length mismatch");
  if (atoms.empty()) throw std::invalid_argument("make_discrete: empty input");
  for (double a : atoms)
    if (!std::isfinite(a))
      throw std::invalid_argument("make_discrete: non-finite atom");
  for (double p : probs)
    if (!(p >= 0.0))
      throw std::invalid_argument("make_discrete: negative probability");

  CompensatedSum total;
  for (double p : probs) total.add(p);
  if (std::abs(total.value() - 1.0) > 1e-9)
    throw std::invalid_argument(
        "make_discrete: probabilities sum to " + std::to_string(total.value()) +
        ", expected 1 within 1e-9");

  sort_by_value(atoms, probs);

  DiscreteDistribution d;
  d.atoms_.reserve(atoms.size());
  d.probs_.reserve(atoms.size());
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    CompensatedSum mass;
    mass.add(probs[i]);
    while (j < atoms.size() && atoms[j] == atoms[i]) {
      mass.add(probs[j]);
      ++j;
    }
    if (mass.value() > 0.0) {
      d.atoms_.push_back(atoms[i]);
      d.probs_.push_back(mass.value());
    }
    i = j;
  }
  if (d.atoms_.empty())
    throw std::invalid_argument("make_discrete: all probabilities zero");

  // Exact renormalization of the merged masses.
  CompensatedSum merged;
  for (double p : d.probs_) merged.add(p);
  const double z = merged.value();
  for (double& p : d.probs_) p /= z;

  d.cum_.resize(d.probs_.size());
  CompensatedSum run;
  for (std::size_t k = 0; k < d.probs_.size(); ++k) {
    run.add(d.probs_[k]);
    d.cum_[k] = run.value();
  }
  d.cum_.back() = 1.0;
  return d;
}

double DiscreteDistribution::cdf(double x) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteDistribution::sample_one(Rng& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const std::size_t idx =
      std::min(static_cast<std::size_t>(it - cum_.begin()), atoms_.size() - 1);
  return atoms_[idx];
}

double moment(const DiscreteDistribution& d, int k) {
  if (k < 0) throw std::invalid_argument("moment: negative order");
  CompensatedSum s;
  for (std::size_t i = 0; i < d.size(); ++i)
    s.add(d.probs()[i] * ipow(d.atoms()[i], k));
  return s.value();
}

double absolute_moment(const DiscreteDistribution& d, int k) {
  if (k < 0) throw std::invalid_argument("absolute_moment: negative order");
  CompensatedSum s;
  for (std::size_t i = 0; i < d.size(); ++i)
    s.add(d.probs()[i] * ipow(std::abs(d.atoms()[i]), k));
  return s.value();
}

MomentSummary moment_summary(const DiscreteDistribution& d) {
  MomentSummary m;
  m.mean = moment(d, 1);
  CompensatedSum var;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double c = d.atoms()[i] - m.mean;
    var.add(d.probs()[i] * c * c);
  }
  m.variance = var.value();
  m.third = moment(d, 3);
  m.fourth = moment(d, 4);
  m.abs_third = absolute_moment(d, 3);
  return m;
}

DiscreteDistribution center(const DiscreteDistribution& d) {
  std::vector<double> atoms(d.atoms().begin(), d.atoms().end());
  std::vector<double> probs(d.probs().begin(), d.probs().end());
  DiscreteDistribution out = make_discrete(atoms, probs);
  for (int pass = 0; pass < 3; ++pass) {
    const double mu = moment(out, 1);
    if (std::abs(mu) < 1e-14) break;
    std::vector<double> shifted(out.atoms().begin(), out.atoms().end());
    for (double& a : shifted) a -= mu;
    out = make_discrete(std::move(shifted),
                        {out.probs().begin(), out.probs().end()});
  }
  return out;
}

std::vector<double> sample(const DiscreteDistribution& d, Rng& rng,
                           std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(d.sample_one(rng));
  return out;
}

DiscreteDistribution convolve(const DiscreteDistribution& a,
                              const DiscreteDistribution& b, double tol) {
  std::vector<double> values, probs;
  values.reserve(a.size() * b.size());
  probs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      values.push_back(a.atoms()[i] + b.atoms()[j]);
      probs.push_back(a.probs()[i] * b.probs()[j]);
    }
  merge_close(values, probs, tol);
  return make_discrete(std::move(values), std::move(probs));
}

DiscreteDistribution iid_sum_law(const DiscreteDistribution& d,
                                 std::size_t n) {
  if (n == 0) return make_discrete({0.0}, {1.0});
  DiscreteDistribution acc = d;
  for (std::size_t i = 1; i < n; ++i) acc = convolve(acc, d);
  return acc;
}

}  // namespace zb
