#pragma once

#include <array>
#include <functional>

namespace zb {

/// Nodes and weights for 64-node Gauss-Hermite quadrature with weight
/// exp(-x^2), computed once by bisection on the orthonormal recurrence.
const std::array<double, 64>& gauss_hermite_nodes();
const std::array<double, 64>& gauss_hermite_weights();

/// E h(Z) for standard normal Z via the 64-node rule.
double normal_expectation(const std::function<double(double)>& h);

/// Adaptive 7-15 Gauss-Kronrod integral of f over [a, b] to absolute
/// tolerance `tol`. Throws std::runtime_error when the recursion cannot
/// reach the tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol);

}  // namespace zb
