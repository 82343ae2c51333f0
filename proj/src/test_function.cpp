#include "zb/test_function.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace zb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

bool TestFunction::has_norm(int j) const {
  if (j < 1 || j > 4) return false;
  return std::isfinite(norm[static_cast<std::size_t>(j - 1)]);
}

double TestFunction::norm_or_throw(int j) const {
  if (!has_norm(j))
    throw std::invalid_argument("test function '" + name +
                                "': derivative norm " + std::to_string(j) +
                                " not declared");
  return norm[static_cast<std::size_t>(j - 1)];
}

void validate_declared_norms(const TestFunction& f) {
  if (!f.evaluable()) return;
  const double r = f.check_radius;
  for (int j = 1; j <= 4; ++j) {
    const auto& dj = f.deriv[static_cast<std::size_t>(j - 1)];
    if (!f.has_norm(j) || !dj) continue;
    const double declared = f.norm[static_cast<std::size_t>(j - 1)];
    double sup = 0.0;
    const double step = 1e-3;
    for (double x = -r; x <= r + 0.5 * step; x += step)
      sup = std::max(sup, std::abs(dj(x)));
    if (sup > declared * (1.0 + 1e-12) + 1e-15)
      throw std::invalid_argument("test function '" + f.name +
                                  "': declared norm " + std::to_string(j) +
                                  " is below the grid supremum");
  }
}

TestFunction make_cos() {
  TestFunction f;
  f.name = "cos";
  f.family = TestFamily::trig;
  f.h = [](double x) { return std::cos(x); };
  f.deriv[0] = [](double x) { return -std::sin(x); };
  f.deriv[1] = [](double x) { return -std::cos(x); };
  f.deriv[2] = [](double x) { return std::sin(x); };
  f.deriv[3] = [](double x) { return std::cos(x); };
  f.norm = {1.0, 1.0, 1.0, 1.0};
  return f;
}

TestFunction make_sin() {
  TestFunction f;
  f.name = "sin";
  f.family = TestFamily::trig;
  f.h = [](double x) { return std::sin(x); };
  f.deriv[0] = [](double x) { return std::cos(x); };
  f.deriv[1] = [](double x) { return -std::sin(x); };
  f.deriv[2] = [](double x) { return -std::cos(x); };
  f.deriv[3] = [](double x) { return std::sin(x); };
  f.norm = {1.0, 1.0, 1.0, 1.0};
  return f;
}

TestFunction make_logistic() {
  TestFunction f;
  f.name = "logistic";
  f.family = TestFamily::logistic;
  f.h = sigmoid;
  f.deriv[0] = [](double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s);
  };
  f.deriv[1] = [](double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s) * (1.0 - 2.0 * s);
  };
  f.deriv[2] = [](double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s) * (6.0 * s * s - 6.0 * s + 1.0);
  };
  f.deriv[3] = [](double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s) * (1.0 - 2.0 * s) * (12.0 * s * s - 12.0 * s + 1.0);
  };
  // Suprema of the derivative expressions over s in (0, 1), rounded up in
  // the last digits.
  f.norm = {0.25, 0.0962250448649377, 0.125, 0.1276839219677142};
  return f;
}

TestFunction make_polynomial_test(const Polynomial& p, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("make_polynomial_test: radius must be > 0");
  TestFunction f;
  f.name = "polynomial";
  f.family = TestFamily::polynomial_compact;
  f.check_radius = radius;
  f.h = [p](double x) { return p(x); };
  Polynomial d = p;
  for (std::size_t j = 0; j < 4; ++j) {
    d = d.derivative();
    const Polynomial dj = d;
    f.deriv[j] = [dj](double x) { return dj(x); };
    // Grid supremum over the declared compact, padded so the registration
    // check cannot fail on its own grid.
    double sup = 0.0;
    for (double x = -radius; x <= radius + 5e-4; x += 1e-3)
      sup = std::max(sup, std::abs(dj(x)));
    f.norm[j] = sup * (1.0 + 1e-9) + 1e-15;
  }
  return f;
}

TestFunction make_user_norms(double norm3, double norm4) {
  if (std::isfinite(norm3) && norm3 < 0.0)
    throw std::invalid_argument("make_user_norms: negative norm");
  if (std::isfinite(norm4) && norm4 < 0.0)
    throw std::invalid_argument("make_user_norms: negative norm");
  TestFunction f;
  f.name = "user";
  f.family = TestFamily::user;
  f.norm = {kNaN, kNaN, norm3, norm4};
  return f;
}

const std::vector<TestFunction>& registered_test_functions() {
  static const std::vector<TestFunction> fns = [] {
    std::vector<TestFunction> v{make_cos(), make_sin(), make_logistic()};
    for (const TestFunction& f : v) validate_declared_norms(f);
    return v;
  }();
  return fns;
}

TestFunction test_function_by_name(std::string_view name) {
  for (const TestFunction& f : registered_test_functions())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown test function '" + std::string(name) +
                              "' (expected cos, sin, or logistic)");
}

}  // namespace zb
