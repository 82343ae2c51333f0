#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "zb/coupling.hpp"
#include "zb/discrete_distribution.hpp"
#include "zb/piecewise_uniform.hpp"
#include "zb/stein.hpp"

namespace zb {

/// JSON object {"atoms":[...], "probs":[...]}.
DiscreteDistribution read_distribution(const std::filesystem::path& path);

/// Plain text, one decimal per line; '#' starts a comment; blanks skipped.
std::vector<double> read_population_values(const std::filesystem::path& path);

/// JSON array over indices i of arrays of outcomes
/// {"others":[...], "prime":x, "second":y, "prob":p}.
DependentFamily read_family(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Writes via a temporary in the same directory plus rename, so failed runs
/// leave no partial artifact.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string density_json(const PiecewiseUniformDensity& d);
std::string bound_report_json(const BoundReport& r);

}  // namespace zb
