#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "zb/fixtures.hpp"
#include "zb/srs.hpp"
#include "zb/summation.hpp"
#include "zb/zero_bias.hpp"

using namespace zb;

namespace {

const Population& named_population(const char* name) {
  for (const auto& p : fixture_populations())
    if (p.name == name) return p.pop;
  throw std::logic_error("missing fixture population");
}

double falling(double x, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out *= x - static_cast<double>(i);
  return out;
}

}  // namespace

TEST_CASE("load_population normalizes and validates") {
  const auto two = load_population({-1.0, 1.0});
  CHECK(two.values()[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(two.values()[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(two.distinct());
  CHECK(std::abs(two.power_sum(2) - 1.0) <= 1e-15);

  const auto four = load_population({-2.0, -1.0, 1.0, 2.0});
  CHECK(four.values()[3] == doctest::Approx(2.0 / std::sqrt(10.0)));
  CHECK(std::abs(four.power_sum(1)) <= 1e-12);
  CHECK(std::abs(four.power_sum(3)) <= 1e-12);

  // Rescaling the raw values must not change the population.
  const auto scaled = load_population({-6.0, -3.0, 3.0, 6.0});
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::abs(scaled.values()[i] - four.values()[i]) <= 1e-15);

  const auto dup = load_population({-2.0, -1.0, -1.0, 1.0, 1.0, 2.0});
  CHECK_FALSE(dup.distinct());

  CHECK_THROWS_AS(load_population({1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(load_population({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(load_population({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("symmetrization") {
  const auto pop = symmetrize_population(std::vector<double>{1.0, 1.0}, 4);
  REQUIRE(pop.size() == 4);
  CHECK(pop.values()[0] == -0.5);
  CHECK(pop.values()[3] == 0.5);

  CHECK_THROWS_AS(symmetrize_population(std::vector<double>{1.0}, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(symmetrize_population(std::vector<double>{0.0, 0.0}, 4),
                  std::invalid_argument);

  // +-1 symmetrization: n <4> equals the sampling fraction at f = 1/2.
  const auto big = symmetrize_population(std::vector<double>(8, 1.0), 16);
  CHECK(std::abs(8.0 * big.power_sum(4) - 0.5) <= 1e-13);
}

TEST_CASE("sampling-sum variance") {
  const auto sym4 = named_population("sym4");
  CHECK(srs_variance(sym4, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const auto sym6 = named_population("sym6");
  CHECK(srs_variance(sym6, 2) == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
  CHECK(srs_variance(sym6, 4) == srs_variance(sym6, 2));  // n <-> N-n
  CHECK_THROWS_AS(srs_variance(sym4, 0), std::invalid_argument);
  CHECK_THROWS_AS(srs_variance(sym4, 4), std::invalid_argument);
}

TEST_CASE("bound constants, hand anchors at N=4, n=2") {
  const auto c = srs_constants(named_population("sym4"), 2);
  CHECK(c.sigma2 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.v1sq == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c.rho == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(c.alpha == doctest::Approx(-7.0 / 8.0).epsilon(1e-15));
  CHECK(c.beta == doctest::Approx(-13.0 / 24.0).epsilon(1e-15));
  CHECK(c.gamma == doctest::Approx(-1.0 / 12.0).epsilon(1e-15));
  CHECK(c.eta == doctest::Approx(-1.0 / 8.0).epsilon(1e-15));
  CHECK(c.c2 == doctest::Approx(11.0 * 0.34 + 45.0 / 4.0).epsilon(1e-15));
  const double inner = 1.0 / 48.0 + 0.13 * 49.0 / 64.0 + 169.0 / 576.0 +
                       1.0 / 144.0 + 1.0 / 64.0;
  CHECK(c.c1 == doctest::Approx(std::sqrt(8.0 * inner)).epsilon(1e-14));
  CHECK(c.f == 0.5);
}

TEST_CASE("equal-magnitude population pins C2 = 14") {
  const auto pop = load_population({-0.5, -0.5, 0.5, 0.5});
  const auto c = srs_constants(pop, 2);
  CHECK(c.c2 == doctest::Approx(14.0).epsilon(1e-15));
  const auto report = srs_sum_bound(pop, 2, test_function_by_name("cos"));
  CHECK(report.term2 == doctest::Approx(5.25).epsilon(1e-14));
  CHECK(report.method == "srs");
  CHECK(report.bound == doctest::Approx(report.term1 + report.term2));
}

TEST_CASE("rho agrees with the replacement-family form across N, n") {
  for (std::size_t N = 3; N <= 50; ++N) {
    std::vector<double> raw;
    if (N % 2 == 0) {
      for (std::size_t j = 1; j <= N / 2; ++j) {
        raw.push_back(static_cast<double>(j));
        raw.push_back(-static_cast<double>(j));
      }
    } else {
      const double half = (static_cast<double>(N) - 1.0) / 2.0;
      for (std::size_t j = 0; j < N; ++j)
        raw.push_back(static_cast<double>(j) - half);
    }
    const auto pop = load_population(std::move(raw));
    for (std::size_t n = 1; n + 2 <= N; ++n) {
      const auto c = srs_constants(pop, n);
      const double via_v =
          1.0 - static_cast<double>(n) * c.v1sq / (2.0 * c.sigma2);
      CHECK(std::abs(c.rho - via_v) <= 1e-12);
    }
  }
}

TEST_CASE("asymptotic constants") {
  const auto [b1, b2] = asymptotic_constants(0.5, 0.0, 0.0);
  CHECK(b2 == doctest::Approx(11.25).epsilon(1e-15));
  CHECK(b1 == doctest::Approx(std::sqrt(8.0) / 3.0 *
                              std::sqrt(0.0625 + 2.0) / 0.5)
                  .epsilon(1e-14));
  // B2 is affine in n4 with slope 11 / (8 f (1-f)).
  const auto [b1b, b2b] = asymptotic_constants(0.5, 1.0, 0.0);
  CHECK(b1b == b1);
  CHECK(b2b - b2 == doctest::Approx(5.5).epsilon(1e-14));
  CHECK_THROWS_AS(asymptotic_constants(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("sample_srs is a uniform without-replacement draw") {
  const auto pop = named_population("sym5");
  Rng rng(107);

  // n = N exhausts the population: every draw is a permutation.
  for (int t = 0; t < 50; ++t) {
    auto all = sample_srs(pop, 5, rng);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(all[i] == pop.values()[i]);
  }

  // First coordinate is uniform over the population.
  std::map<double, std::size_t> counts;
  const std::size_t reps = 20000;
  for (std::size_t t = 0; t < reps; ++t)
    ++counts[sample_srs(pop, 2, rng)[0]];
  REQUIRE(counts.size() == 5);
  for (const auto& [v, c] : counts)
    CHECK(std::abs(static_cast<double>(c) / static_cast<double>(reps) - 0.2) <=
          0.015);

  // E W^2 matches the variance formula.
  CompensatedSum sq;
  for (std::size_t t = 0; t < reps; ++t) {
    const auto s = sample_srs(pop, 2, rng);
    const double w = s[0] + s[1];
    sq.add(w * w);
  }
  CHECK(std::abs(sq.value() / static_cast<double>(reps) -
                 srs_variance(pop, 2)) <= 0.02);
}

TEST_CASE("biased pair draw") {
  const auto two = load_population({-1.0, 1.0});
  Rng rng(109);
  std::size_t first_hi = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto [u, v] = draw_q_pair(two, rng);
    CHECK(u != v);
    if (u > 0.0) ++first_hi;
  }
  CHECK(std::abs(static_cast<double>(first_hi) / 20000.0 - 0.5) <= 0.015);

  const auto dup = load_population({-0.5, -0.5, 0.5, 0.5});
  CHECK_THROWS_AS(draw_q_pair(dup, rng), std::invalid_argument);
}

TEST_CASE("coupler draw invariants") {
  const auto pop = named_population("sym5");
  const SrsCoupler coupler(pop, 3);
  const std::set<double> support(pop.values().begin(), pop.values().end());
  Rng rng(113);
  for (int t = 0; t < 2000; ++t) {
    const auto s = coupler.draw(rng);
    REQUIRE(s.sample.size() == 3);
    REQUIRE(s.filled.size() == 2);
    CHECK(s.hat_prime != s.hat_dprime);
    for (double x : s.sample) CHECK(support.count(x) == 1);
    for (double x : s.filled) CHECK(support.count(x) == 1);
    CHECK(support.count(s.hat_prime) == 1);

    // R recomputed from scratch.
    int r = 0;
    for (std::size_t k = 1; k < s.sample.size(); ++k)
      if (s.sample[k] == s.hat_prime || s.sample[k] == s.hat_dprime) ++r;
    CHECK(r == s.r);
    if (s.r == 0)
      for (std::size_t k = 1; k < s.sample.size(); ++k)
        CHECK(s.filled[k - 1] == s.sample[k]);

    // The hatted vector has no repeats.
    std::set<double> hat{s.hat_prime, s.hat_dprime};
    for (double x : s.filled) hat.insert(x);
    CHECK(hat.size() == 2 + s.filled.size());

    CompensatedSum w;
    for (double x : s.sample) w.add(x);
    CHECK(s.w == w.value());
    CompensatedSum rest;
    for (double x : s.filled) rest.add(x);
    const double interp = s.u * s.hat_prime + (1.0 - s.u) * s.hat_dprime;
    CHECK(std::abs(s.w_star - (interp + rest.value())) <= 1e-12);
  }

  CHECK_THROWS_AS(SrsCoupler(pop, 4), std::invalid_argument);
  CHECK_THROWS_AS(SrsCoupler(load_population({-0.5, -0.5, 0.5, 0.5}), 2),
                  std::invalid_argument);
}

TEST_CASE("enumerated hat law carries the predicted mass") {
  // mass(hat) = (u - v)^2 / (2N) / (N-2)(N-3)...(N-n) for every admissible
  // hatted vector.
  struct Case {
    const char* name;
    std::size_t n;
  };
  for (const Case c : {Case{"sym4", 2}, Case{"sym5", 2}, Case{"sym5", 3}}) {
    const auto& pop = named_population(c.name);
    const double dN = static_cast<double>(pop.size());
    const auto enumeration = enumerate_couple_srs(pop, c.n);
    const double denom = falling(dN - 2.0, c.n - 1);
    CompensatedSum total;
    for (const auto& h : enumeration.hat_law) {
      REQUIRE(h.hat.size() == c.n + 1);
      const double q = h.hat[0] - h.hat[1];
      const double expected = q * q / (2.0 * dN) / denom;
      CHECK(std::abs(h.prob - expected) <= 1e-12);
      total.add(h.prob);
    }
    CHECK(std::abs(total.value() - 1.0) <= 1e-12);
  }
}

TEST_CASE("enumerated w_star density equals the zero bias of the sum") {
  for (const char* name : {"sym4", "sym5"}) {
    const auto& pop = named_population(name);
    const auto coupled = enumerate_couple_srs(pop, 2).w_star_density();
    const auto direct = zero_bias_density(enumerate_srs(pop, 2));
    CHECK(max_density_difference(coupled, direct) <= 1e-12);
  }
}

TEST_CASE("exact sampling-sum law") {
  const auto pop = named_population("sym5");
  const auto one = enumerate_srs(pop, 1);
  REQUIRE(one.size() == 5);
  for (double p : one.probs()) CHECK(p == doctest::Approx(0.2).epsilon(1e-14));

  const auto law = enumerate_srs(pop, 2);
  CHECK(std::abs(moment(law, 1)) <= 1e-13);
  CHECK(std::abs(moment(law, 2) - srs_variance(pop, 2)) <= 1e-13);
  CHECK(std::abs(moment(law, 3)) <= 1e-13);  // symmetric population

  CHECK_THROWS_AS(enumerate_srs(pop, 3, 3), std::runtime_error);
}

TEST_CASE("duplicate-value populations are enumerable and boundable") {
  const auto& dup = named_population("dup6");
  const auto law = enumerate_srs(dup, 2);
  CHECK(std::abs(moment(law, 2) - srs_variance(dup, 2)) <= 1e-13);
  const auto report = srs_sum_bound(dup, 2, test_function_by_name("cos"));
  CHECK(report.bound > 0.0);
}

TEST_CASE("variance terms, exact") {
  for (const char* name : {"sym4", "sym5", "sym6"}) {
    const auto report = verify_variance_terms(named_population(name), 2);
    CHECK(report.exact);
    CHECK(report.var_ok);
    CHECK(report.sq_ok);
    CHECK(report.var_conditional <= report.c1_sq);
    CHECK(report.sq_diff <= report.c2);
    CHECK(report.sq_diff > 0.0);
  }
}

TEST_CASE("variance terms, Monte Carlo agrees with exact") {
  const auto& pop = named_population("sym5");
  const auto exact = verify_variance_terms(pop, 2);
  Rng rng(127);
  const auto mc = verify_variance_terms_mc(pop, 2, rng, 20000);
  CHECK_FALSE(mc.exact);
  CHECK(mc.var_ok);
  CHECK(mc.sq_ok);
  CHECK(mc.sq_stderr > 0.0);
  CHECK(std::abs(mc.sq_diff - exact.sq_diff) <= 4.0 * mc.sq_stderr);
  // Grouping by w within finite blocks biases the conditional variance
  // upward slightly; allow that on top of the Monte Carlo error.
  CHECK(std::abs(mc.var_conditional - exact.var_conditional) <=
        4.0 * mc.var_stderr + 0.01);
}

TEST_CASE("bound decays like 1/n at fixed fraction") {
  std::vector<double> log_n, log_bound;
  for (std::size_t n : {8, 16, 32, 64}) {
    const auto pop =
        symmetrize_population(std::vector<double>(n, 1.0), 2 * n);
    const auto report = srs_sum_bound(pop, n, test_function_by_name("cos"));
    log_n.push_back(std::log(static_cast<double>(n)));
    log_bound.push_back(std::log(report.bound));
  }
  const double slope = oracle::fit_slope(log_n, log_bound);
  CHECK(slope >= -1.2);
  CHECK(slope <= -0.8);
}
