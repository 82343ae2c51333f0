#include "zb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace zb {

namespace {

nlohmann::json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return j;
}

std::vector<double> number_array(const nlohmann::json& j,
                                 const std::string& what) {
  if (!j.is_array())
    throw std::runtime_error(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number())
      throw std::runtime_error(what + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

DiscreteDistribution read_distribution(const std::filesystem::path& path) {
  const nlohmann::json j = parse_file(path);
  if (!j.is_object() || !j.contains("atoms") || !j.contains("probs"))
    throw std::runtime_error(path.string() +
                             ": expected object with atoms and probs");
  return make_discrete(number_array(j["atoms"], "atoms"),
                       number_array(j["probs"], "probs"));
}

std::vector<double> read_population_values(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(begin, end - begin + 1);
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": not a number: " + tok);
    values.push_back(v);
  }
  return values;
}

DependentFamily read_family(const std::filesystem::path& path) {
  const nlohmann::json j = parse_file(path);
  if (!j.is_array() || j.empty())
    throw std::runtime_error(path.string() +
                             ": expected a nonempty array per index");
  std::vector<std::vector<FamilyOutcome>> per_index;
  per_index.reserve(j.size());
  for (const auto& idx : j) {
    if (!idx.is_array())
      throw std::runtime_error(path.string() +
                               ": each index entry must be an array");
    std::vector<FamilyOutcome> outcomes;
    outcomes.reserve(idx.size());
    for (const auto& o : idx) {
      if (!o.is_object() || !o.contains("others") || !o.contains("prime") ||
          !o.contains("second") || !o.contains("prob"))
        throw std::runtime_error(
            path.string() +
            ": outcome needs others, prime, second, prob");
      FamilyOutcome f;
      f.others = number_array(o["others"], "others");
      f.xi_prime = o["prime"].get<double>();
      f.xi_dprime = o["second"].get<double>();
      f.prob = o["prob"].get<double>();
      outcomes.push_back(std::move(f));
    }
    per_index.push_back(std::move(outcomes));
  }
  return make_dependent_family(std::move(per_index));
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{})
    throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void atomic_write(const std::filesystem::path& path,
                  std::string_view content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : ".";
  const std::filesystem::path tmp =
      dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("rename failed: " + path.string() + ": " +
                             ec.message());
  }
}

std::string density_json(const PiecewiseUniformDensity& d) {
  nlohmann::json j;
  j["breakpoints"] = nlohmann::json::array();
  for (double b : d.breakpoints()) j["breakpoints"].push_back(b);
  j["densities"] = nlohmann::json::array();
  for (double v : d.densities()) j["densities"].push_back(v);
  return j.dump(2) + "\n";
}

std::string bound_report_json(const BoundReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["sigma"] = r.sigma;
  const auto put = [&j](const char* key, double v) {
    if (std::isnan(v)) return;
    j[key] = v;
  };
  put("norm3", r.norm3);
  put("norm4", r.norm4);
  put("cond_term", r.cond_term);
  put("sq_diff", r.sq_diff);
  put("c1", r.c1);
  put("c2", r.c2);
  put("term1", r.term1);
  put("term2", r.term2);
  j["bound"] = r.bound;
  return j.dump(2) + "\n";
}

}  // namespace zb
