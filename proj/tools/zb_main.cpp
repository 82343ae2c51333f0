#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zb/coupling.hpp"
#include "zb/fixtures.hpp"
#include "zb/io.hpp"
#include "zb/srs.hpp"
#include "zb/stein.hpp"
#include "zb/summation.hpp"
#include "zb/test_function.hpp"
#include "zb/zero_bias.hpp"

namespace {

using namespace zb;

constexpr const char* kVersion = "0.1.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fputs(content.c_str(), stdout);
  } else {
    atomic_write(out_path, content);
  }
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ZB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
  }
  return std::min<std::size_t>(n, 256);
}

TestFunction pick_h(const std::string& name, double norm3, double norm4) {
  if (name == "user") {
    if (std::isnan(norm3) || std::isnan(norm4))
      throw std::invalid_argument(
          "user test function requires --h-norm3 and --h-norm4");
    return make_user_norms(norm3, norm4);
  }
  return test_function_by_name(name);
}

// ---------------------------------------------------------------- transform

struct TransformOpts {
  std::string input;
  std::string out;
};

int run_transform(const TransformOpts& o) {
  const DiscreteDistribution d = read_distribution(o.input);
  const PiecewiseUniformDensity density = zero_bias_density(d);
  emit(o.out, density_json(density));
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyOpts {
  std::string input;  // optional replacement-family JSON
  std::string out;
  double tol_identity = 1e-12;
  double tol_quadrature = 1e-10;
};

struct VerifyRow {
  std::string suite;
  std::string name;
  double residual;
  double tol;
};

int run_verify(const VerifyOpts& o) {
  std::vector<VerifyRow> rows;
  const auto add = [&rows](std::string suite, std::string name,
                           double residual, double tol) {
    rows.push_back({std::move(suite), std::move(name), residual, tol});
  };

  // Characterization suite: EWf(W) = sigma^2 Ef'(W*) plus the derived mass,
  // moment, and normal-equation residuals.
  const Polynomial mixed({0.3, -1.0, 0.25, 0.5, -0.125});
  for (const NamedDistribution& nd : fixture_distributions()) {
    const PiecewiseUniformDensity density = zero_bias_density(nd.dist);
    add("characterization", nd.name + "/mass", std::abs(density.mass() - 1.0),
        o.tol_identity);
    const double m2 = moment(nd.dist, 2);
    for (int n = 1; n <= 4; ++n) {
      const double lhs = density.moment(n);
      const double rhs =
          moment(nd.dist, n + 2) / ((static_cast<double>(n) + 1.0) * m2);
      add("characterization", nd.name + "/moment" + std::to_string(n),
          std::abs(lhs - rhs), o.tol_identity);
    }
    for (int deg = 1; deg <= 4; ++deg)
      add("characterization", nd.name + "/monomial" + std::to_string(deg),
          std::abs(characterization_residual(nd.dist,
                                             Polynomial::monomial(deg, 1.0))),
          o.tol_identity);
    add("characterization", nd.name + "/mixed-poly",
        std::abs(characterization_residual(nd.dist, mixed)), o.tol_identity);
  }
  // Normal-equation residuals, quadrature-backed.
  {
    const double quad_tol = std::max(o.tol_quadrature, 1e-12);
    const double stein_tol = 1e4 * o.tol_quadrature;
    for (const char* hname : {"cos", "logistic"})
      for (double sigma : {1.0, 3.0}) {
        const SteinSolution sol(test_function_by_name(hname), sigma,
                                quad_tol);
        double worst = 0.0;
        for (double x : {-2.0, -0.5, 0.7, 2.0})
          worst = std::max(worst,
                           std::abs(sol.equation_residual(x * sigma)));
        std::ostringstream name;
        name << hname << "/sigma=" << sigma;
        add("stein-equation", name.str(), worst, stein_tol);
      }
  }

  // Family-condition suite.
  const auto& pops = fixture_populations();
  const auto pop_by_name = [&pops](std::string_view name) -> const Population& {
    for (const NamedPopulation& np : pops)
      if (np.name == name) return np.pop;
    throw std::logic_error("missing fixture population");
  };
  {
    const Polynomial f = Polynomial::monomial(3, 1.0);
    const struct {
      const char* pop;
      std::size_t n;
    } cases[] = {{"sym4", 2}, {"sym5", 2}, {"sym5", 3}};
    for (const auto& c : cases) {
      const DependentFamily fam = srs_family(pop_by_name(c.pop), c.n);
      const FamilyConditionReport rep =
          verify_family_conditions(fam, f, /*check_regression=*/true);
      const std::string base =
          std::string(c.pop) + "-n" + std::to_string(c.n);
      add("family-condition", base + "/conditions", rep.max_residual(),
          o.tol_identity);
      add("family-condition", base + "/regression",
          std::abs(rep.regression_residual), o.tol_identity);
      const SrsConstants sc = srs_constants(pop_by_name(c.pop), c.n);
      add("family-condition", base + "/rho", std::abs(rep.rho - sc.rho),
          o.tol_identity);
    }
    const DependentFamily ind = independent_family(fixture_mixed_sum());
    add("family-condition", "independent-mixed/conditions",
        verify_family_conditions(ind, f).max_residual(), o.tol_identity);
  }
  if (!o.input.empty()) {
    const DependentFamily fam = read_family(o.input);
    add("family-condition", "file/conditions",
        verify_family_conditions(fam, mixed).max_residual(), o.tol_identity);
  }

  // Coupling-marginal suite: every construction must reproduce the zero-bias
  // density of the underlying sum law.
  {
    const SumModel pm3 = fixture_iid_pm1(3);
    add("coupling-marginal", "independent-pm1-3",
        max_density_difference(independent_coupling_density(pm3),
                               zero_bias_density(sum_law(pm3))),
        o.tol_identity);
    const SumModel mixed_sum = fixture_mixed_sum();
    add("coupling-marginal", "independent-mixed",
        max_density_difference(independent_coupling_density(mixed_sum),
                               zero_bias_density(sum_law(mixed_sum))),
        o.tol_identity);
    const struct {
      const char* pop;
      std::size_t n;
    } cases[] = {{"sym4", 2}, {"sym5", 2}, {"sym5", 3}};
    for (const auto& c : cases) {
      const Population& pop = pop_by_name(c.pop);
      const PiecewiseUniformDensity target =
          zero_bias_density(enumerate_srs(pop, c.n));
      const std::string base =
          std::string(c.pop) + "-n" + std::to_string(c.n);
      add("coupling-marginal", base + "/couple-srs",
          max_density_difference(
              enumerate_couple_srs(pop, c.n).w_star_density(), target),
          o.tol_identity);
      add("coupling-marginal", base + "/dependent-family",
          max_density_difference(
              dependent_coupling_density(srs_family(pop, c.n)), target),
          o.tol_identity);
    }
    const PairDistribution joint = fixture_exchangeable_joint();
    add("coupling-marginal", "exchangeable-reweight",
        max_density_difference(
            interpolated_density(exchangeable_pair_zero_bias(joint)),
            zero_bias_density(marginal_first(joint))),
        o.tol_identity);
  }

  std::string csv = "suite,case,residual,tolerance,status\n";
  bool all_ok = true;
  for (const VerifyRow& r : rows) {
    const bool ok = r.residual <= r.tol;
    all_ok = all_ok && ok;
    csv += r.suite + "," + r.name + "," + format_double(r.residual) + "," +
           format_double(r.tol) + "," + (ok ? "pass" : "fail") + "\n";
  }
  emit(o.out, csv);
  return all_ok ? 0 : 1;
}

// ----------------------------------------------------------- srs-experiment

struct ExperimentOpts {
  std::string input;      // population file; empty -> symmetrized +-1
  double fraction = 0.5;  // used when input is empty
  std::vector<std::size_t> n_grid;
  std::string h_name = "cos";
  double h_norm3 = kNaN;
  double h_norm4 = kNaN;
  std::uint64_t seed = 0;
  std::size_t reps = 200000;
  std::size_t enum_cap = 2'000'000;
  std::string out;
  std::string record;
};

struct ExperimentRow {
  std::size_t N;
  std::size_t n;
  double f;
  double sigma2;
  double c1;
  double c2;
  double bound;
  double gap;
  double gap_stderr;
  double b1;
  double b2;
  bool exact;
};

Population experiment_population(const ExperimentOpts& o, std::size_t n) {
  if (!o.input.empty()) return load_population(read_population_values(o.input));
  if (!(o.fraction > 0.0) || !(o.fraction < 1.0))
    throw std::invalid_argument("srs-experiment: need 0 < fraction < 1");
  const double dN = static_cast<double>(n) / o.fraction;
  const auto N = static_cast<std::size_t>(std::llround(dN));
  if (std::abs(dN - static_cast<double>(N)) > 1e-9 || N % 2 != 0 || N < 4)
    throw std::invalid_argument(
        "srs-experiment: n/fraction must be an even population size");
  const std::vector<double> ones(N / 2, 1.0);
  return symmetrize_population(ones, N);
}

// Monte Carlo gap with one derived stream per replication, merged in
// replication order so the result is independent of the worker count.
GapEstimate mc_gap(const Population& pop, std::size_t n, double sigma,
                   const TestFunction& h, const Rng& row_rng,
                   std::size_t reps) {
  std::vector<double> w(reps);
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(reps, 1));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 256;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= reps) return;
        const std::size_t end = std::min(begin + kChunk, reps);
        for (std::size_t r = begin; r < end; ++r) {
          Rng stream = row_rng.derive(r);
          CompensatedSum sum;
          for (double x : sample_srs(pop, n, stream)) sum.add(x);
          w[r] = sum.value();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  return expectation_gap_mc(w, sigma, h);
}

int run_experiment(const ExperimentOpts& o) {
  if (o.n_grid.empty())
    throw std::invalid_argument("srs-experiment: --n-grid is required");
  for (std::size_t i = 1; i < o.n_grid.size(); ++i)
    if (o.n_grid[i] <= o.n_grid[i - 1])
      throw std::invalid_argument(
          "srs-experiment: --n-grid must be strictly increasing");
  const TestFunction h = pick_h(o.h_name, o.h_norm3, o.h_norm4);
  h.norm_or_throw(3);
  h.norm_or_throw(4);
  if (!h.evaluable())
    throw std::invalid_argument(
        "srs-experiment: test function must be evaluable");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ExperimentRow> rows;
  const Rng base(o.seed);
  for (std::size_t i = 0; i < o.n_grid.size(); ++i) {
    const std::size_t n = o.n_grid[i];
    const Population pop = experiment_population(o, n);
    const SrsConstants c = srs_constants(pop, n);
    const BoundReport bound = srs_sum_bound(pop, n, h);
    const double sigma = std::sqrt(c.sigma2);

    GapEstimate gap;
    try {
      gap = expectation_gap(enumerate_srs(pop, n, o.enum_cap), sigma, h);
    } catch (const std::runtime_error&) {
      gap = mc_gap(pop, n, sigma, h, base.derive(i), o.reps);
    }

    const double slack = gap.exact ? 0.0 : 4.0 * gap.stderr_;
    if (std::abs(gap.gap) > bound.bound + slack)
      throw std::runtime_error(
          "srs-experiment: measured gap " + format_double(gap.gap) +
          " exceeds the bound " + format_double(bound.bound) + " at n=" +
          std::to_string(n));

    rows.push_back({c.N, n, c.f, c.sigma2, c.c1, c.c2, bound.bound, gap.gap,
                    gap.stderr_, c.b1, c.b2, gap.exact});
  }

  // Least-squares slope of log|gap| against log n.
  double slope = kNaN;
  {
    std::vector<double> xs, ys;
    for (const ExperimentRow& r : rows)
      if (std::isfinite(r.gap) && std::abs(r.gap) > 0.0) {
        xs.push_back(std::log(static_cast<double>(r.n)));
        ys.push_back(std::log(std::abs(r.gap)));
      }
    if (xs.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
      }
      mx /= static_cast<double>(xs.size());
      my /= static_cast<double>(xs.size());
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
      }
      if (sxx > 0.0) slope = sxy / sxx;
    }
  }

  std::string csv =
      "N,n,f,sigma2,C1,C2,bound,gap_exact_or_mc,gap_stderr,seed,b1,b2\n";
  for (const ExperimentRow& r : rows) {
    csv += std::to_string(r.N) + "," + std::to_string(r.n) + "," +
           format_double(r.f) + "," + format_double(r.sigma2) + "," +
           format_double(r.c1) + "," + format_double(r.c2) + "," +
           format_double(r.bound) + "," + format_double(r.gap) + "," +
           format_double(r.gap_stderr) + "," + std::to_string(o.seed) + "," +
           format_double(r.b1) + "," + format_double(r.b2) + "\n";
  }
  csv += "# loglog_slope," + format_double(slope) + "\n";
  emit(o.out, csv);

  if (!o.record.empty()) {
    const auto t1 = std::chrono::steady_clock::now();
    nlohmann::json j;
    j["config"] = {{"command", "srs-experiment"},
                   {"input", o.input},
                   {"fraction", o.fraction},
                   {"n_grid", o.n_grid},
                   {"h", o.h_name},
                   {"seed", o.seed},
                   {"reps", o.reps},
                   {"enum_cap", o.enum_cap},
                   {"out", o.out}};
    j["rows"] = nlohmann::json::array();
    for (const ExperimentRow& r : rows)
      j["rows"].push_back({{"N", r.N},
                           {"n", r.n},
                           {"f", r.f},
                           {"sigma2", r.sigma2},
                           {"C1", r.c1},
                           {"C2", r.c2},
                           {"bound", r.bound},
                           {"gap", r.gap},
                           {"gap_stderr", r.gap_stderr},
                           {"b1", r.b1},
                           {"b2", r.b2},
                           {"exact", r.exact}});
    j["loglog_slope"] = slope;
    j["versions"] = {{"zb", kVersion}};
    j["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
            .count();
    atomic_write(o.record, j.dump(2) + "\n");
  }
  return 0;
}

// -------------------------------------------------------------------- bound

struct BoundOpts {
  std::string method;
  std::string input;
  std::string h_name = "cos";
  double h_norm3 = kNaN;
  double h_norm4 = kNaN;
  std::int64_t n = 0;
  double ex4 = kNaN;
  double ex3 = 0.0;
  double abs3 = kNaN;
  double sigma = kNaN;
  double cond_var = kNaN;
  double sq_diff = kNaN;
  std::string out;
};

int run_bound(const BoundOpts& o) {
  const TestFunction h = pick_h(o.h_name, o.h_norm3, o.h_norm4);
  const auto need = [](double v, const char* flag) {
    if (std::isnan(v))
      throw std::invalid_argument(std::string("bound: missing ") + flag);
    return v;
  };
  BoundReport report;
  if (o.method == "srs") {
    if (o.input.empty())
      throw std::invalid_argument("bound: --method srs needs --input");
    if (o.n <= 0) throw std::invalid_argument("bound: --method srs needs --n");
    const Population pop = load_population(read_population_values(o.input));
    report = srs_sum_bound(pop, static_cast<std::size_t>(o.n), h);
  } else if (o.method == "iid") {
    if (o.n <= 0) throw std::invalid_argument("bound: --method iid needs --n");
    report = iid_fourth_moment_bound(o.n, need(o.ex4, "--ex4"), h, o.ex3);
  } else if (o.method == "clt") {
    if (o.n <= 0) throw std::invalid_argument("bound: --method clt needs --n");
    report = clt_iid_bound(o.n, need(o.abs3, "--abs3"), h);
  } else {
    report = zero_bias_bound(need(o.sigma, "--sigma"), h,
                             need(o.cond_var, "--cond-var"),
                             need(o.sq_diff, "--sq-diff"));
  }
  emit(o.out, bound_report_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-bias transformation toolkit"};
  app.require_subcommand(1);
  // --h names a test function below, so help must not claim -h.
  app.set_help_flag("--help", "print help");

  TransformOpts to;
  CLI::App* transform =
      app.add_subcommand("transform", "Zero-bias density of a discrete law");
  transform->set_help_flag("--help", "print help");
  transform->add_option("--input", to.input, "distribution JSON")->required();
  transform->add_option("--out", to.out, "output path (default stdout)");

  VerifyOpts vo;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the identity-residual suites");
  verify->set_help_flag("--help", "print help");
  verify->add_option("--input", vo.input, "replacement-family JSON to check");
  verify->add_option("--out", vo.out, "CSV path (default stdout)");
  verify->add_option("--tol-identity", vo.tol_identity,
                     "identity residual tolerance");
  verify->add_option("--tol-quadrature", vo.tol_quadrature,
                     "quadrature tolerance");

  ExperimentOpts eo;
  CLI::App* experiment = app.add_subcommand(
      "srs-experiment", "Gap-vs-bound grid for sampling sums");
  experiment->set_help_flag("--help", "print help");
  experiment->add_option("--input", eo.input, "population value file");
  experiment->add_option("--fraction", eo.fraction,
                         "sampling fraction for symmetrized +-1 populations");
  experiment->add_option("--n-grid", eo.n_grid, "sample sizes")
      ->required()
      ->delimiter(',');
  experiment->add_option("--h", eo.h_name, "test function");
  experiment->add_option("--h-norm3", eo.h_norm3, "norm of h''' (user h)");
  experiment->add_option("--h-norm4", eo.h_norm4, "norm of h'''' (user h)");
  experiment->add_option("--seed", eo.seed, "RNG seed")->required();
  experiment->add_option("--reps", eo.reps, "Monte Carlo replications");
  experiment->add_option("--enum-cap", eo.enum_cap,
                         "enumeration work cap before MC fallback");
  experiment->add_option("--out", eo.out, "CSV path (default stdout)");
  experiment->add_option("--record", eo.record, "run-record JSON path");

  BoundOpts bo;
  CLI::App* bound =
      app.add_subcommand("bound", "Assemble a normal-approximation bound");
  bound->set_help_flag("--help", "print help");
  bound->add_option("--method", bo.method, "srs | iid | clt | zero-bias")
      ->required()
      ->check(CLI::IsMember({"srs", "iid", "clt", "zero-bias"}));
  bound->add_option("--input", bo.input, "population value file (srs)");
  bound->add_option("--h", bo.h_name, "test function (cos|sin|logistic|user)");
  bound->add_option("--h-norm3", bo.h_norm3, "norm of h''' (user h)");
  bound->add_option("--h-norm4", bo.h_norm4, "norm of h'''' (user h)");
  bound->add_option("--n", bo.n, "sample size / summand count");
  bound->add_option("--ex4", bo.ex4, "EX^4 of a standardized summand (iid)");
  bound->add_option("--ex3", bo.ex3, "EX^3, must vanish (iid)");
  bound->add_option("--abs3", bo.abs3, "E|X|^3 (clt)");
  bound->add_option("--sigma", bo.sigma, "sd of W (zero-bias)");
  bound->add_option("--cond-var", bo.cond_var,
                    "E{E(W*-W|W)^2} (zero-bias)");
  bound->add_option("--sq-diff", bo.sq_diff, "E(W*-W)^2 (zero-bias)");
  bound->add_option("--out", bo.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (transform->parsed()) return run_transform(to);
    if (verify->parsed()) return run_verify(vo);
    if (experiment->parsed()) return run_experiment(eo);
    return run_bound(bo);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
