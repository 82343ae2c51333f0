#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "zb/polynomial.hpp"

namespace zb {

enum class TestFamily { trig, logistic, polynomial_compact, user };

/// Smooth test function with evaluators for h and its first four
/// derivatives plus declared sup norms ||h^(j)||, j = 1..4. Declared norms
/// are validated as upper bounds on a dense grid at registration. For the
/// `user` family only the norms are known.
struct TestFunction {
  std::string name;
  TestFamily family = TestFamily::user;
  std::function<double(double)> h;
  std::array<std::function<double(double)>, 4> deriv;  // h', h'', h''', h''''
  std::array<double, 4> norm{};                        // ||h^(j)||, j-1 indexed
  double check_radius = 20.0;  // grid half-width for the norm check

  bool has_norm(int j) const;
  /// Throws std::invalid_argument when norm j was not declared.
  double norm_or_throw(int j) const;
  bool evaluable() const { return static_cast<bool>(h); }
};

TestFunction make_cos();
TestFunction make_sin();
TestFunction make_logistic();

/// Polynomial restricted to [-radius, radius]; norms are grid suprema over
/// that compact. Only meaningful against laws supported inside it.
TestFunction make_polynomial_test(const Polynomial& p, double radius);

/// Norms-only function (j = 3, 4). Not evaluable; feeds bound assembly.
TestFunction make_user_norms(double norm3, double norm4);

/// Checks every declared norm against a grid supremum of the matching
/// derivative over [-check_radius, check_radius], step 1e-3. Throws when a
/// declared norm is exceeded. No-op for non-evaluable functions.
void validate_declared_norms(const TestFunction& f);

/// The built-in families: cos, sin, logistic.
const std::vector<TestFunction>& registered_test_functions();

/// Lookup by name among the built-ins; throws std::invalid_argument.
TestFunction test_function_by_name(std::string_view name);

}  // namespace zb
