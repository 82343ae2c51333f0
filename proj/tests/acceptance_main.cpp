// Acceptance gate: ten checks, one pass/fail line each. Exit code is the
// number of failures. Tolerances and runtime limits are fixed here.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zb/coupling.hpp"
#include "zb/fixtures.hpp"
#include "zb/io.hpp"
#include "zb/srs.hpp"
#include "zb/stein.hpp"
#include "zb/summation.hpp"
#include "zb/zero_bias.hpp"

using namespace zb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void run_criterion(int index, const char* name, double limit_seconds,
                   const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  bool ok = outcome.ok;
  std::string detail = outcome.detail;
  if (limit_seconds > 0.0 && elapsed > limit_seconds) {
    ok = false;
    detail += detail.empty() ? "" : "; ";
    detail += "over time limit";
  }
  std::printf("[%s] %2d %s (%s%s%.2fs)\n", ok ? "PASS" : "FAIL", index, name,
              detail.c_str(), detail.empty() ? "" : ", ", elapsed);
  if (!ok) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", x);
  return buf;
}

double falling(double x, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out *= x - static_cast<double>(i);
  return out;
}

std::vector<DiscreteDistribution> random_suite() {
  Rng rng(20240817);
  std::vector<DiscreteDistribution> suite;
  suite.reserve(50);
  for (int i = 0; i < 50; ++i)
    suite.push_back(random_centered_distribution(rng));
  return suite;
}

Outcome criterion_identity() {
  Rng rng(911);
  double worst = 0.0;
  for (const auto& d : random_suite()) {
    const Polynomial f = random_polynomial(rng);
    worst = std::max(worst, std::abs(characterization_residual(d, f)));
  }
  return {worst < 1e-12, "max residual " + sci(worst)};
}

Outcome criterion_two_point() {
  const auto density =
      zero_bias_density(make_discrete({-1.0, 1.0}, {0.5, 0.5}));
  const bool ok = density.pieces() == 1 && density.breakpoints()[0] == -1.0 &&
                  density.breakpoints()[1] == 1.0 &&
                  density.densities()[0] == 0.5;
  return {ok, ok ? "uniform 1/2 on [-1,1], bit-exact" : "density mismatch"};
}

Outcome criterion_moments() {
  double worst = 0.0;
  for (const auto& d : random_suite()) {
    const auto density = zero_bias_density(d);
    const double m2 = moment(d, 2);
    for (int n = 1; n <= 4; ++n) {
      const double rhs =
          moment(d, n + 2) / ((static_cast<double>(n) + 1.0) * m2);
      worst = std::max(worst, std::abs(density.moment(n) - rhs));
    }
  }
  return {worst <= 1e-12, "max residual " + sci(worst)};
}

Outcome criterion_coupling_marginal() {
  double worst_mass = 0.0, worst_density = 0.0;
  std::size_t instances = 0;
  for (const auto& np : fixture_populations()) {
    if (!np.pop.distinct()) continue;  // the coupling needs distinct values
    const std::size_t N = np.pop.size();
    for (std::size_t n : {2, 3}) {
      if (n + 1 >= N) continue;  // the R=2 case needs two spare values
      ++instances;
      const auto enumeration = enumerate_couple_srs(np.pop, n);
      const double dN = static_cast<double>(N);
      const double denom = falling(dN - 2.0, n - 1);
      const std::size_t expected_count =
          static_cast<std::size_t>(dN * (dN - 1.0) * denom + 0.5);
      if (enumeration.hat_law.size() != expected_count)
        return {false, "hat outcome count mismatch"};
      for (const auto& h : enumeration.hat_law) {
        const double q = h.hat[0] - h.hat[1];
        const double predicted = q * q / (2.0 * dN) / denom;
        worst_mass = std::max(worst_mass, std::abs(h.prob - predicted));
      }
      worst_density = std::max(
          worst_density,
          max_density_difference(enumeration.w_star_density(),
                                 zero_bias_density(enumerate_srs(np.pop, n))));
    }
  }
  const bool ok =
      instances == 9 && worst_mass <= 1e-12 && worst_density <= 1e-12;
  return {ok, "mass " + sci(worst_mass) + ", density " + sci(worst_density) +
                  " over " + std::to_string(instances) + " instances"};
}

Outcome criterion_rho() {
  double worst = 0.0;
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
      const double via_family =
          1.0 - static_cast<double>(n) * c.v1sq / (2.0 * c.sigma2);
      worst = std::max(worst, std::abs(c.rho - via_family));
    }
  }
  return {worst <= 1e-12, "max deviation " + sci(worst)};
}

Outcome criterion_desk_scale() {
  const auto h = test_function_by_name("cos");
  const auto w = iid_sum_law(make_discrete({-1.0, 1.0}, {0.5, 0.5}), 10);
  const auto gap = expectation_gap(w, std::sqrt(10.0), h);
  const auto bound = iid_fourth_moment_bound(10, 1.0, h);
  const bool ok = std::abs(bound.bound - 0.05) <= 1e-15 &&
                  std::abs(gap.gap) <= bound.bound;
  return {ok, "gap " + sci(gap.gap) + " vs bound 0.05"};
}

Outcome criterion_domination() {
  std::size_t instances = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  const auto consider = [&](double gap, double bound) {
    ++instances;
    worst_margin = std::min(worst_margin, bound - std::abs(gap));
  };

  for (const auto& h : registered_test_functions()) {
    // Sampling sums over every fixture population.
    for (const auto& np : fixture_populations())
      for (std::size_t n : {2, 3}) {
        if (n >= np.pop.size()) continue;
        const double sigma = std::sqrt(srs_variance(np.pop, n));
        const auto gap =
            expectation_gap(enumerate_srs(np.pop, n), sigma, h);
        consider(gap.gap, srs_sum_bound(np.pop, n, h).bound);
      }

    // Standardized coin-flip sums, both i.i.d. bounds.
    for (std::size_t n : {4, 9, 16}) {
      const auto w = iid_sum_law(make_discrete({-1.0, 1.0}, {0.5, 0.5}), n);
      const double sigma = std::sqrt(static_cast<double>(n));
      const auto gap = expectation_gap(w, sigma, h);
      consider(gap.gap,
               iid_fourth_moment_bound(static_cast<std::int64_t>(n), 1.0, h)
                   .bound);
      consider(gap.gap,
               clt_iid_bound(static_cast<std::int64_t>(n), 1.0, h).bound);
    }

    // Single summands under the independent coupling of W and W*.
    for (const auto& nd : fixture_distributions()) {
      const double sigma2 = moment(nd.dist, 2);
      const double sigma = std::sqrt(sigma2);
      const double mean_star = zero_bias_moment(nd.dist, 1);
      const double sq_star = zero_bias_moment(nd.dist, 2);
      const double cond_var = mean_star * mean_star + sigma2;
      const double sq_diff = sq_star + sigma2;
      const auto gap = expectation_gap(nd.dist, sigma, h);
      consider(gap.gap, zero_bias_bound(sigma, h, cond_var, sq_diff).bound);
    }
  }
  return {worst_margin >= 0.0, std::to_string(instances) +
                                   " instances, min margin " +
                                   sci(worst_margin)};
}

Outcome criterion_rate() {
  const auto h = test_function_by_name("cos");
  std::vector<double> log_n, log_gap;
  // max over the grid of n|gap| - (B1 + B2); negative means bounded.
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t n : {8, 16, 32, 64}) {
    const auto pop =
        symmetrize_population(std::vector<double>(n, 1.0), 2 * n);
    const auto c = srs_constants(pop, n);
    const auto gap =
        expectation_gap(enumerate_srs(pop, n), std::sqrt(c.sigma2), h);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_gap.push_back(std::log(std::abs(gap.gap)));
    worst_excess = std::max(worst_excess, static_cast<double>(n) *
                                                  std::abs(gap.gap) -
                                              (c.b1 + c.b2));
  }
  const double slope = oracle::fit_slope(log_n, log_gap);
  const bool ok = slope >= -1.3 && slope <= -0.7 && worst_excess <= 0.0;
  return {ok, "slope " + sci(slope) + ", n|gap| under B1+B2 by " +
                  sci(-worst_excess)};
}

Outcome criterion_variance_terms() {
  for (const auto& np : fixture_populations()) {
    if (!np.pop.distinct()) continue;
    for (std::size_t n : {2, 3}) {
      if (n + 1 >= np.pop.size()) continue;
      const auto report = verify_variance_terms(np.pop, n);
      if (!report.exact || !report.var_ok || !report.sq_ok)
        return {false, np.name + " n=" + std::to_string(n) + ": " +
                           sci(report.var_conditional) + " vs " +
                           sci(report.c1_sq) + ", " + sci(report.sq_diff) +
                           " vs " + sci(report.c2)};
    }
  }
  return {true, "all fixture instances"};
}

Outcome criterion_determinism() {
  const fs::path dir =
      fs::temp_directory_path() /
      ("zb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto pop = dir / "pop.txt";
  atomic_write(pop, "3\n1\n-1\n-3\n1\n-1\n");
  const auto read_file = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };

  bool ok = true;
  std::string detail;
  const std::string exe = ZB_CLI_PATH;
  const auto log = (dir / "log.txt").string();

  // Exact-enumeration path, two runs.
  const std::string exact_cmd = exe + " srs-experiment --input " +
                                pop.string() +
                                " --n-grid 2,3 --h cos --seed 99 --out ";
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  if (oracle::run_command(exact_cmd + a.string() + " >" + log + " 2>&1") !=
          0 ||
      oracle::run_command(exact_cmd + b.string() + " >" + log + " 2>&1") !=
          0) {
    ok = false;
    detail = "exact run failed";
  } else if (read_file(a) != read_file(b)) {
    ok = false;
    detail = "exact outputs differ";
  }

  // Monte Carlo path under different worker counts.
  if (ok) {
    const std::string mc_cmd =
        exe +
        " srs-experiment --fraction 0.5 --n-grid 4 --h cos --seed 99"
        " --enum-cap 1 --reps 2048 --out ";
    const auto c = dir / "c.csv";
    const auto d = dir / "d.csv";
    if (oracle::run_command("ZB_THREADS=1 " + mc_cmd + c.string() + " >" +
                            log + " 2>&1") != 0 ||
        oracle::run_command("ZB_THREADS=4 " + mc_cmd + d.string() + " >" +
                            log + " 2>&1") != 0) {
      ok = false;
      detail = "Monte Carlo run failed";
    } else if (read_file(c) != read_file(d)) {
      ok = false;
      detail = "Monte Carlo outputs differ across worker counts";
    }
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
  return {ok, ok ? "byte-identical across reruns and worker counts" : detail};
}

}  // namespace

int main() {
  run_criterion(1, "characterizing identity on the random suite", 1.0,
                criterion_identity);
  run_criterion(2, "two-point law transforms to uniform 1/2", 0.0,
                criterion_two_point);
  run_criterion(3, "zero-bias moment identity, orders 1..4", 0.0,
                criterion_moments);
  run_criterion(4, "coupling enumeration matches the biased-pair law", 30.0,
                criterion_coupling_marginal);
  run_criterion(5, "rho closed form vs replacement-family form", 0.0,
                criterion_rho);
  run_criterion(6, "ten coin flips: gap within 0.05", 1.0,
                criterion_desk_scale);
  run_criterion(7, "assembled bounds dominate exact gaps", 0.0,
                criterion_domination);
  run_criterion(8, "O(1/n) rate at fixed sampling fraction", 120.0,
                criterion_rate);
  run_criterion(9, "variance-term inequalities by enumeration", 0.0,
                criterion_variance_terms);
  run_criterion(10, "experiment CSV is byte-identical across runs", 0.0,
                criterion_determinism);
  return failures;
}
