#include "zb/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zb/summation.hpp"

namespace zb {

namespace {

constexpr int kGhOrder = 64;

// Orthonormal Hermite values p_0..p_n at x for weight exp(-x^2).
double hermite_ortho(int n, double x) {
  double pm1 = 0.0;
  double p = 0.7511255444649425;  // pi^(-1/4)
  for (int k = 0; k < n; ++k) {
    const double pk1 = x * std::sqrt(2.0 / (k + 1)) * p -
                       std::sqrt(static_cast<double>(k) / (k + 1)) * pm1;
    pm1 = p;
    p = pk1;
  }
  return p;
}

struct GaussHermiteTable {
  std::array<double, kGhOrder> nodes;
  std::array<double, kGhOrder> weights;
};

// Roots by interlacing bisection: the zeros of p_{k+1} are separated by the
// zeros of p_k, so each level brackets the next.
GaussHermiteTable build_gauss_hermite() {
  std::vector<double> roots{0.0};  // zeros of p_1
  for (int k = 1; k < kGhOrder; ++k) {
    const double outer = std::sqrt(2.0 * (k + 1) + 1.0) + 1.0;
    std::vector<double> brackets;
    brackets.push_back(-outer);
    brackets.insert(brackets.end(), roots.begin(), roots.end());
    brackets.push_back(outer);
    std::vector<double> next(static_cast<std::size_t>(k) + 1);
    for (int r = 0; r <= k; ++r) {
      double lo = brackets[static_cast<std::size_t>(r)];
      double hi = brackets[static_cast<std::size_t>(r) + 1];
      double flo = hermite_ortho(k + 1, lo);
      for (int it = 0; it < 200 && hi - lo > 1e-17 * (1.0 + std::abs(lo));
           ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = hermite_ortho(k + 1, mid);
        if ((flo <= 0.0) == (fmid <= 0.0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      next[static_cast<std::size_t>(r)] = 0.5 * (lo + hi);
    }
    roots = std::move(next);
  }

  GaussHermiteTable t;
  for (int i = 0; i < kGhOrder; ++i) {
    const double x = roots[static_cast<std::size_t>(i)];
    t.nodes[static_cast<std::size_t>(i)] = x;
    // Christoffel weight 1 / sum_{k<n} p_k(x)^2.
    double pm1 = 0.0;
    double p = 0.7511255444649425;
    CompensatedSum s;
    s.add(p * p);
    for (int k = 0; k + 1 < kGhOrder; ++k) {
      const double pk1 = x * std::sqrt(2.0 / (k + 1)) * p -
                         std::sqrt(static_cast<double>(k) / (k + 1)) * pm1;
      pm1 = p;
      p = pk1;
      s.add(p * p);
    }
    t.weights[static_cast<std::size_t>(i)] = 1.0 / s.value();
  }
  return t;
}

const GaussHermiteTable& gauss_hermite_table() {
  static const GaussHermiteTable t = build_gauss_hermite();
  return t;
}

// 7-15 Gauss-Kronrod constants (positive half; node 0 last).
constexpr std::array<double, 8> kK15Nodes = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr std::array<double, 8> kK15Weights = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr std::array<double, 4> kG7Weights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const double dx = h * kK15Nodes[j];
    const double fv = j == 7 ? f(c) : f(c - dx) + f(c + dx);
    resk += kK15Weights[j] * fv;
    // Odd j are the embedded 7-point Gauss nodes (j == 7 is the center).
    if (j % 2 == 1) resg += kG7Weights[j / 2] * fv;
  }
  kronrod = resk * h;
  const double gauss = resg * h;
  err = std::abs(kronrod - gauss);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
  double v = 0.0, e = 0.0;
  gk15(f, a, b, v, e);
  if (!std::isfinite(v) || !std::isfinite(e))
    throw std::runtime_error("integrate_adaptive: non-finite integrand");
  if (e <= tol || b - a <= 1e-14 * (1.0 + std::abs(a) + std::abs(b))) return v;
  if (depth >= 60)
    throw std::runtime_error("integrate_adaptive: did not converge");
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth + 1) +
         adapt(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

const std::array<double, 64>& gauss_hermite_nodes() {
  return gauss_hermite_table().nodes;
}

const std::array<double, 64>& gauss_hermite_weights() {
  return gauss_hermite_table().weights;
}

double normal_expectation(const std::function<double(double)>& h) {
  const GaussHermiteTable& t = gauss_hermite_table();
  const double sqrt2 = std::sqrt(2.0);
  CompensatedSum s;
  for (int i = 0; i < kGhOrder; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    s.add(t.weights[k] * h(sqrt2 * t.nodes[k]));
  }
  return s.value() / std::sqrt(std::acos(-1.0));
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_adaptive(f, b, a, tol);
  return adapt(f, a, b, tol, 0);
}

}  // namespace zb
