#include "zb/srs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "zb/summation.hpp"
#include "zb/zero_bias.hpp"

namespace zb {

namespace {

double falling_factorial(std::size_t N, std::size_t k) {
  double v = 1.0;
  for (std::size_t i = 0; i < k; ++i) v *= static_cast<double>(N - i);
  return v;
}

double binomial(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  k = std::min(k, m - k);
  double v = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    v = v * static_cast<double>(m - k + i) / static_cast<double>(i);
  return v;
}

// Ordered without-replacement index draw (partial Fisher-Yates).
std::vector<std::size_t> draw_indices(std::size_t N, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(N);
  for (std::size_t i = 0; i < N; ++i) idx[i] = i;
  for (std::size_t k = 0; k < n; ++k)
    std::swap(idx[k], idx[k + rng.below(N - k)]);
  idx.resize(n);
  return idx;
}

}  // namespace

double Population::power_sum(int k) const {
  if (k < 1 || k > 6)
    throw std::invalid_argument("power_sum: cached orders are 1..6");
  return psum_[static_cast<std::size_t>(k)];
}

Population load_population(std::vector<double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("load_population: need at least 2 values");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("load_population: non-finite value");
  CompensatedSum sq;
  for (double v : values) sq.add(v * v);
  if (!(sq.value() > 0.0))
    throw std::invalid_argument("load_population: zero sum of squares");
  const double scale = 1.0 / std::sqrt(sq.value());
  for (double& v : values) v *= scale;
  std::sort(values.begin(), values.end());

  Population pop;
  pop.values_ = std::move(values);
  for (int k = 1; k <= 6; ++k) {
    CompensatedSum s;
    for (double v : pop.values_) s.add(ipow(v, k));
    pop.psum_[static_cast<std::size_t>(k)] = s.value();
  }
  if (std::abs(pop.psum_[1]) > 1e-12)
    throw std::invalid_argument(
        "load_population: sum of values must vanish (got " +
        std::to_string(pop.psum_[1]) + ")");
  if (std::abs(pop.psum_[3]) > 1e-12)
    throw std::invalid_argument(
        "load_population: sum of cubes must vanish (got " +
        std::to_string(pop.psum_[3]) + ")");
  pop.distinct_ = true;
  for (std::size_t i = 1; i < pop.values_.size(); ++i)
    if (pop.values_[i] == pop.values_[i - 1]) {
      pop.distinct_ = false;
      break;
    }
  return pop;
}

Population symmetrize_population(std::span<const double> y, std::size_t N) {
  if (N < 2 || N % 2 != 0)
    throw std::invalid_argument("symmetrize_population: N must be even");
  if (y.size() != N / 2)
    throw std::invalid_argument(
        "symmetrize_population: need exactly N/2 values");
  CompensatedSum sq;
  for (double v : y) sq.add(v * v);
  if (!(sq.value() > 0.0))
    throw std::invalid_argument(
        "symmetrize_population: zero sum of squares");
  const double z = std::sqrt(2.0 * sq.value());
  std::vector<double> values;
  values.reserve(N);
  for (double v : y) {
    values.push_back(v / z);
    values.push_back(-v / z);
  }
  return load_population(std::move(values));
}

double srs_variance(const Population& pop, std::size_t n) {
  const std::size_t N = pop.size();
  if (n == 0 || n >= N)
    throw std::invalid_argument("srs_variance: need 0 < n < N");
  const double dn = static_cast<double>(n);
  const double dN = static_cast<double>(N);
  return dn * (dN - dn) / (dN * (dN - 1.0));
}

std::pair<double, double> asymptotic_constants(double f, double n4,
                                               double n6) {
  if (!(f > 0.0) || !(f < 1.0))
    throw std::invalid_argument("asymptotic_constants: need 0 < f < 1");
  if (!(n4 >= 0.0) || !(n6 >= 0.0))
    throw std::invalid_argument("asymptotic_constants: negative moment input");
  const double ff = f * (1.0 - f);
  const double ratio = f / (1.0 - f);
  const double b1 =
      std::sqrt(8.0) / 3.0 *
      std::sqrt(ff / 4.0 + n6 + 2.0 * ratio * ratio) / std::sqrt(ff);
  const double b2 = (11.0 * n4 + 45.0 * f) / (8.0 * ff);
  return {b1, b2};
}

SrsConstants srs_constants(const Population& pop, std::size_t n) {
  const std::size_t N = pop.size();
  if (n == 0 || n >= N)
    throw std::invalid_argument("srs_constants: need 0 < n < N");
  const double dN = static_cast<double>(N);
  const double dn = static_cast<double>(n);

  SrsConstants c;
  c.N = N;
  c.n = n;
  c.sigma2 = srs_variance(pop, n);
  c.v1sq = 2.0 / (dN - 1.0);
  c.rho = -dn / (dN - dn);
  c.alpha = (dn - 1.0) / (dN * (dN - dn)) - 1.0;
  c.beta = -2.0 * (dn - 1.0) / (dN * (dN - dn + 1.0)) +
           (dn - 3.0) / (dN * (dN - dn)) - 1.0 / dN;
  c.gamma = -2.0 / (dN * (dN - dn) * (dN - dn + 1.0));
  c.eta = (-dN + 3.0) / (dN * (dN - dn));
  const double six = pop.power_sum(6);
  c.c1 = std::sqrt(8.0) *
         std::sqrt(c.sigma2 / (4.0 * dn * dn) + six * c.alpha * c.alpha +
                   c.beta * c.beta + c.gamma * c.gamma * (dn - 1.0) * (dn - 1.0) +
                   c.eta * c.eta);
  c.c2 = 11.0 * pop.power_sum(4) + 45.0 / dN;
  c.f = dn / dN;
  const auto [b1, b2] = asymptotic_constants(
      c.f, dn * pop.power_sum(4), dn * dn * six);
  c.b1 = b1;
  c.b2 = b2;
  return c;
}

std::vector<double> sample_srs(const Population& pop, std::size_t n,
                               Rng& rng) {
  if (n == 0 || n > pop.size())
    throw std::invalid_argument("sample_srs: need 0 < n <= N");
  const auto idx = draw_indices(pop.size(), n, rng);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = pop.values()[idx[k]];
  return out;
}

std::pair<double, double> draw_q_pair(const Population& pop, Rng& rng) {
  const std::size_t N = pop.size();
  if (!pop.distinct())
    throw std::invalid_argument("draw_q_pair: population values must be distinct");
  const auto values = pop.values();
  std::vector<double> cum(N * (N - 1));
  CompensatedSum run;
  std::size_t k = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const double d = values[i] - values[j];
      run.add(d * d / (2.0 * static_cast<double>(N)));
      cum[k++] = run.value();
    }
  if (std::abs(cum.back() - 1.0) > 1e-12)
    throw std::invalid_argument(
        "draw_q_pair: pair mass deviates from 1; population not normalized");
  const double u = rng.uniform01() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  std::size_t flat =
      std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
  const std::size_t i = flat / (N - 1);
  std::size_t j = flat % (N - 1);
  if (j >= i) ++j;
  return {values[i], values[j]};
}

SrsCoupler::SrsCoupler(Population pop, std::size_t n)
    : pop_(std::move(pop)), n_(n) {
  const std::size_t N = pop_.size();
  if (!pop_.distinct())
    throw std::invalid_argument("SrsCoupler: population values must be distinct");
  if (n_ == 0 || n_ + 1 >= N)
    throw std::invalid_argument("SrsCoupler: need 0 < n < N-1");
  pair_cum_.resize(N * (N - 1));
  CompensatedSum run;
  std::size_t k = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const double d = pop_.values()[i] - pop_.values()[j];
      run.add(d * d / (2.0 * static_cast<double>(N)));
      pair_cum_[k++] = run.value();
    }
  if (std::abs(pair_cum_.back() - 1.0) > 1e-12)
    throw std::invalid_argument(
        "SrsCoupler: pair mass deviates from 1; population not normalized");
}

SrsCouplingSample SrsCoupler::draw(Rng& rng) const {
  const std::size_t N = pop_.size();
  const auto values = pop_.values();

  SrsCouplingSample s;
  const auto sample_idx = draw_indices(N, n_, rng);
  s.sample.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) s.sample[k] = values[sample_idx[k]];

  // Biased pair, independent of the sample.
  const double u = rng.uniform01() * pair_cum_.back();
  const auto it = std::upper_bound(pair_cum_.begin(), pair_cum_.end(), u);
  std::size_t flat = std::min(
      static_cast<std::size_t>(it - pair_cum_.begin()), pair_cum_.size() - 1);
  const std::size_t pi = flat / (N - 1);
  std::size_t pj = flat % (N - 1);
  if (pj >= pi) ++pj;
  s.hat_prime = values[pi];
  s.hat_dprime = values[pj];

  // Overlap with the retained coordinates 2..n.
  std::vector<std::size_t> collide;
  for (std::size_t k = 1; k < n_; ++k)
    if (sample_idx[k] == pi || sample_idx[k] == pj) collide.push_back(k);
  s.r = static_cast<int>(collide.size());

  std::vector<char> used(N, 0);
  used[pi] = used[pj] = 1;
  for (std::size_t k = 1; k < n_; ++k) used[sample_idx[k]] = 1;
  std::vector<std::size_t> complement;
  complement.reserve(N);
  for (std::size_t i = 0; i < N; ++i)
    if (!used[i]) complement.push_back(i);

  std::vector<std::size_t> filled_idx(sample_idx.begin() + 1,
                                      sample_idx.end());
  if (s.r == 1) {
    // Replace the colliding coordinate by a uniform spare.
    const std::size_t c = rng.below(complement.size());
    filled_idx[collide[0] - 1] = complement[c];
  } else if (s.r == 2) {
    // Ordered 2-draw from the spares, mapped to the vacated coordinates in
    // index order.
    const std::size_t c1 = rng.below(complement.size());
    std::size_t first = complement[c1];
    std::vector<std::size_t> rest = complement;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(c1));
    const std::size_t c2 = rng.below(rest.size());
    const std::size_t second = rest[c2];
    filled_idx[collide[0] - 1] = first;
    filled_idx[collide[1] - 1] = second;
  }

  s.filled.resize(filled_idx.size());
  for (std::size_t k = 0; k < filled_idx.size(); ++k)
    s.filled[k] = values[filled_idx[k]];

  s.u = rng.uniform01();
  CompensatedSum w;
  for (double x : s.sample) w.add(x);
  s.w = w.value();
  CompensatedSum rest_sum;
  for (double x : s.filled) rest_sum.add(x);
  s.w_star = s.u * s.hat_prime + (1.0 - s.u) * s.hat_dprime + rest_sum.value();
  return s;
}

SrsCouplingSample couple_srs(const Population& pop, std::size_t n, Rng& rng) {
  SrsCoupler coupler(pop, n);
  return coupler.draw(rng);
}

DiscreteDistribution enumerate_srs(const Population& pop, std::size_t n,
                                   std::size_t work_cap) {
  const std::size_t N = pop.size();
  if (n == 0 || n > N)
    throw std::invalid_argument("enumerate_srs: need 0 < n <= N");

  // Distinct values with multiplicities.
  std::vector<double> vals;
  std::vector<std::size_t> mult;
  for (double v : pop.values()) {
    if (!vals.empty() && v == vals.back()) {
      ++mult.back();
    } else {
      vals.push_back(v);
      mult.push_back(1);
    }
  }
  std::vector<std::size_t> tail(vals.size() + 1, 0);
  for (std::size_t g = vals.size(); g-- > 0;) tail[g] = tail[g + 1] + mult[g];

  std::vector<double> sums, weights;
  std::size_t visited = 0;
  const double total = binomial(N, n);

  // DFS over group occupation counts.
  struct Frame {
    std::size_t g;
    std::size_t left;
    double sum;
    double weight;
  };
  std::vector<Frame> stack{{0, n, 0.0, 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (++visited > work_cap)
      throw std::runtime_error("enumerate_srs: enumeration cap exceeded");
    if (f.left == 0) {
      sums.push_back(f.sum);
      weights.push_back(f.weight / total);
      continue;
    }
    if (f.g >= vals.size() || tail[f.g] < f.left) continue;
    const std::size_t kmax = std::min(f.left, mult[f.g]);
    for (std::size_t k = 0; k <= kmax; ++k)
      stack.push_back({f.g + 1, f.left - k,
                       f.sum + static_cast<double>(k) * vals[f.g],
                       f.weight * binomial(mult[f.g], k)});
  }

  merge_close(sums, weights, 1e-9);
  return make_discrete(std::move(sums), std::move(weights));
}

PiecewiseUniformDensity SrsCouplingEnumeration::w_star_density() const {
  std::vector<WeightedPair> pairs;
  pairs.reserve(joint.size());
  for (const SrsJointOutcome& o : joint)
    pairs.push_back({o.a, o.b, o.prob});
  return interpolated_density(
      make_pair_distribution(std::move(pairs), /*exchangeable=*/false));
}

SrsCouplingEnumeration enumerate_couple_srs(const Population& pop,
                                            std::size_t n) {
  const std::size_t N = pop.size();
  if (!pop.distinct())
    throw std::invalid_argument(
        "enumerate_couple_srs: population values must be distinct");
  if (n == 0 || n + 1 >= N)
    throw std::invalid_argument("enumerate_couple_srs: need 0 < n < N-1");
  const auto values = pop.values();

  std::map<std::vector<double>, double> hat_mass;
  SrsCouplingEnumeration out;

  const double p_sample = 1.0 / falling_factorial(N, n);
  std::vector<std::size_t> sample_idx(n);
  std::vector<char> in_sample(N, 0);

  // Elementary outcome emission for one (sample, pair, fill) choice.
  const auto emit = [&](std::size_t pi, std::size_t pj, double q,
                        const std::vector<std::size_t>& filled_idx,
                        double p_fill) {
    const double prob = p_sample * q * p_fill;
    CompensatedSum w;
    for (std::size_t k = 0; k < n; ++k) w.add(values[sample_idx[k]]);
    CompensatedSum rest;
    std::vector<double> hat;
    hat.reserve(n + 1);
    hat.push_back(values[pi]);
    hat.push_back(values[pj]);
    for (std::size_t idx : filled_idx) {
      rest.add(values[idx]);
      hat.push_back(values[idx]);
    }
    hat_mass[hat] += prob;
    out.joint.push_back({w.value(), values[pi] + rest.value(),
                         values[pj] + rest.value(), prob});
  };

  const auto for_each_pair = [&] {
    for (std::size_t pi = 0; pi < N; ++pi)
      for (std::size_t pj = 0; pj < N; ++pj) {
        if (pi == pj) continue;
        const double d = values[pi] - values[pj];
        const double q = d * d / (2.0 * static_cast<double>(N));

        std::vector<std::size_t> collide;
        for (std::size_t k = 1; k < n; ++k)
          if (sample_idx[k] == pi || sample_idx[k] == pj)
            collide.push_back(k);

        // Spares: indices outside the pair and the retained coordinates
        // 2..n.  The discarded first coordinate stays available.
        std::vector<char> excluded(N, 0);
        excluded[pi] = excluded[pj] = 1;
        for (std::size_t k = 1; k < n; ++k) excluded[sample_idx[k]] = 1;
        std::vector<std::size_t> complement;
        for (std::size_t i = 0; i < N; ++i)
          if (!excluded[i]) complement.push_back(i);

        std::vector<std::size_t> filled(sample_idx.begin() + 1,
                                        sample_idx.end());
        if (collide.empty()) {
          emit(pi, pj, q, filled, 1.0);
        } else if (collide.size() == 1) {
          const double p_fill = 1.0 / static_cast<double>(complement.size());
          for (std::size_t c : complement) {
            filled[collide[0] - 1] = c;
            emit(pi, pj, q, filled, p_fill);
          }
        } else {
          const double M = static_cast<double>(complement.size());
          const double p_fill = 1.0 / (M * (M - 1.0));
          for (std::size_t c1 : complement)
            for (std::size_t c2 : complement) {
              if (c1 == c2) continue;
              filled[collide[0] - 1] = c1;
              filled[collide[1] - 1] = c2;
              emit(pi, pj, q, filled, p_fill);
            }
        }
      }
  };

  // Recursive enumeration of ordered samples.
  const auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == n) {
      for_each_pair();
      return;
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (in_sample[i]) continue;
      in_sample[i] = 1;
      sample_idx[pos] = i;
      self(self, pos + 1);
      in_sample[i] = 0;
    }
  };
  rec(rec, 0);

  out.hat_law.reserve(hat_mass.size());
  for (const auto& [hat, prob] : hat_mass) out.hat_law.push_back({hat, prob});
  return out;
}

BoundReport srs_sum_bound(const Population& pop, std::size_t n,
                          const TestFunction& h) {
  const SrsConstants c = srs_constants(pop, n);
  BoundReport r;
  r.method = "srs";
  r.sigma = std::sqrt(c.sigma2);
  r.norm3 = h.norm_or_throw(3);
  r.norm4 = h.norm_or_throw(4);
  r.c1 = c.c1;
  r.c2 = c.c2;
  r.term1 = c.c1 * r.norm3 / (3.0 * r.sigma);
  r.term2 = c.c2 * r.norm4 / (8.0 * c.sigma2);
  r.bound = r.term1 + r.term2;
  return r;
}

VarianceTermsReport verify_variance_terms(const Population& pop,
                                          std::size_t n) {
  const SrsCouplingEnumeration en = enumerate_couple_srs(pop, n);
  const SrsConstants c = srs_constants(pop, n);

  std::vector<SrsJointOutcome> joint = en.joint;
  std::sort(joint.begin(), joint.end(),
            [](const SrsJointOutcome& a, const SrsJointOutcome& b) {
              return a.w < b.w;
            });

  VarianceTermsReport rep;
  rep.c1_sq = c.c1 * c.c1;
  rep.c2 = c.c2;

  CompensatedSum sq, mean_cond, var_cond;
  std::vector<std::pair<double, double>> cond;  // (P(w), E[W*-W|w])
  std::size_t i = 0;
  while (i < joint.size()) {
    std::size_t j = i;
    CompensatedSum pw, pexp;
    while (j < joint.size() && joint[j].w - joint[i].w <= 1e-9) {
      pw.add(joint[j].prob);
      pexp.add(joint[j].prob * (0.5 * (joint[j].a + joint[j].b) - joint[j].w));
      ++j;
    }
    cond.emplace_back(pw.value(), pexp.value() / pw.value());
    i = j;
  }
  for (const auto& [pw, m] : cond) mean_cond.add(pw * m);
  for (const auto& [pw, m] : cond) {
    const double cdev = m - mean_cond.value();
    var_cond.add(pw * cdev * cdev);
  }
  for (const SrsJointOutcome& o : joint) {
    const double da = o.a - o.w;
    const double db = o.b - o.w;
    sq.add(o.prob * (da * da + da * db + db * db) / 3.0);
  }

  rep.var_conditional = var_cond.value();
  rep.sq_diff = sq.value();
  rep.exact = true;
  rep.var_ok = rep.var_conditional <= rep.c1_sq * (1.0 + 1e-12) + 1e-15;
  rep.sq_ok = rep.sq_diff <= rep.c2 * (1.0 + 1e-12) + 1e-15;
  return rep;
}

VarianceTermsReport verify_variance_terms_mc(const Population& pop,
                                             std::size_t n, Rng& rng,
                                             std::size_t reps) {
  if (reps < 40)
    throw std::invalid_argument("verify_variance_terms_mc: need reps >= 40");
  const SrsCoupler coupler(pop, n);
  const SrsConstants c = srs_constants(pop, n);
  const std::size_t N = pop.size();
  const auto values = pop.values();

  // Exact inner expectation E[W* - W | sample] over pair and fill
  // randomness, O(N^2) per draw.
  const auto inner = [&](const std::vector<double>& sample_values) {
    std::vector<std::size_t> idx(sample_values.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto it = std::lower_bound(values.begin(), values.end(),
                                       sample_values[k]);
      idx[k] = static_cast<std::size_t>(it - values.begin());
    }
    std::vector<char> retained(N, 0);
    CompensatedSum rest;
    for (std::size_t k = 1; k < idx.size(); ++k) {
      retained[idx[k]] = 1;
      rest.add(values[idx[k]]);
    }
    CompensatedSum w;
    for (double x : sample_values) w.add(x);

    CompensatedSum acc;
    for (std::size_t pi = 0; pi < N; ++pi)
      for (std::size_t pj = 0; pj < N; ++pj) {
        if (pi == pj) continue;
        const double d = values[pi] - values[pj];
        const double q = d * d / (2.0 * static_cast<double>(N));
        int r = 0;
        double coll = 0.0;
        if (retained[pi]) {
          ++r;
          coll += values[pi];
        }
        if (retained[pj]) {
          ++r;
          coll += values[pj];
        }
        double fill = rest.value();
        if (r > 0) {
          const double m =
              static_cast<double>(N) - static_cast<double>(n + 1 - r);
          // Complement sum: population total (0 after normalization up to
          // round-off) minus the union of pair and retained values.
          const double union_sum =
              values[pi] + values[pj] + rest.value() - coll;
          const double comp_sum = pop.power_sum(1) - union_sum;
          fill = rest.value() - coll + static_cast<double>(r) * comp_sum / m;
        }
        acc.add(q * (0.5 * (values[pi] + values[pj]) + fill));
      }
    return acc.value() - w.value();
  };

  const std::size_t blocks = 20;
  const std::size_t per_block = reps / blocks;
  std::vector<double> block_var(blocks, 0.0), block_sq(blocks, 0.0);

  for (std::size_t b = 0; b < blocks; ++b) {
    // Group per-draw inner expectations by w to estimate Var(E{...|W}).
    std::vector<double> ws, gs, sqs;
    for (std::size_t r = 0; r < per_block; ++r) {
      const SrsCouplingSample s = coupler.draw(rng);
      ws.push_back(s.w);
      gs.push_back(inner(s.sample));
      CompensatedSum rest;
      for (double x : s.filled) rest.add(x);
      const double da = s.hat_prime + rest.value() - s.w;
      const double db = s.hat_dprime + rest.value() - s.w;
      sqs.push_back((da * da + da * db + db * db) / 3.0);
    }
    std::vector<std::size_t> order(ws.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t bb) { return ws[a] < ws[bb]; });
    CompensatedSum var_acc, mean_acc;
    std::size_t i = 0;
    std::vector<std::pair<double, double>> cond;
    while (i < order.size()) {
      std::size_t j = i;
      CompensatedSum g;
      while (j < order.size() && ws[order[j]] - ws[order[i]] <= 1e-9) {
        g.add(gs[order[j]]);
        ++j;
      }
      cond.emplace_back(static_cast<double>(j - i) / static_cast<double>(per_block),
                        g.value() / static_cast<double>(j - i));
      i = j;
    }
    for (const auto& [pw, m] : cond) mean_acc.add(pw * m);
    for (const auto& [pw, m] : cond) {
      const double dev = m - mean_acc.value();
      var_acc.add(pw * dev * dev);
    }
    block_var[b] = var_acc.value();
    CompensatedSum sq;
    for (double v : sqs) sq.add(v);
    block_sq[b] = sq.value() / static_cast<double>(per_block);
  }

  const auto mean_se = [](const std::vector<double>& xs) {
    CompensatedSum m;
    for (double x : xs) m.add(x);
    const double mean = m.value() / static_cast<double>(xs.size());
    CompensatedSum v;
    for (double x : xs) v.add((x - mean) * (x - mean));
    const double se = std::sqrt(v.value() /
                                static_cast<double>(xs.size() - 1) /
                                static_cast<double>(xs.size()));
    return std::pair<double, double>{mean, se};
  };

  VarianceTermsReport rep;
  rep.c1_sq = c.c1 * c.c1;
  rep.c2 = c.c2;
  rep.exact = false;
  const auto [vm, vs] = mean_se(block_var);
  const auto [sm, ss] = mean_se(block_sq);
  rep.var_conditional = vm;
  rep.var_stderr = vs;
  rep.sq_diff = sm;
  rep.sq_stderr = ss;
  rep.var_ok = vm <= rep.c1_sq + 3.0 * vs;
  rep.sq_ok = sm <= rep.c2 + 3.0 * ss;
  return rep;
}

DependentFamily srs_family(const Population& pop, std::size_t n) {
  const std::size_t N = pop.size();
  if (n == 0 || n + 1 > N)
    throw std::invalid_argument("srs_family: need 0 < n <= N-1");
  if (falling_factorial(N, n + 1) > 500000.0)
    throw std::runtime_error("srs_family: law too large");
  const auto values = pop.values();

  // By exchangeability the (others, x', x'') law is the same ordered
  // (n+1)-draw for every index.
  std::vector<FamilyOutcome> outcomes;
  const double p = 1.0 / falling_factorial(N, n + 1);
  std::vector<std::size_t> idx(n + 1);
  std::vector<char> used(N, 0);
  const auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == n + 1) {
      FamilyOutcome o;
      o.others.assign(n - 1, 0.0);
      for (std::size_t k = 0; k + 2 < n + 1; ++k)
        o.others[k] = values[idx[k]];
      o.xi_prime = values[idx[n - 1]];
      o.xi_dprime = values[idx[n]];
      o.prob = p;
      outcomes.push_back(std::move(o));
      return;
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      idx[pos] = i;
      self(self, pos + 1);
      used[i] = 0;
    }
  };
  rec(rec, 0);

  std::vector<std::vector<FamilyOutcome>> per_index(n, outcomes);
  return make_dependent_family(std::move(per_index));
}

}  // namespace zb
