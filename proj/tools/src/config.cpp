#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace malthus::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "name(a,b)" into name and the argument list.
std::pair<std::string, std::vector<double>> call_form(const std::string& text, const std::string& what) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {trim(text), {}};
  if (text.back() != ')') throw ConfigError(what + ": unbalanced parentheses in '" + text + "'");
  return {trim(text.substr(0, open)), parse_list(text.substr(open + 1, text.size() - open - 2), what)};
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(values_.at(key), key) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return value;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = values_.at(key);
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    if (!text.empty() && text[0] != '-') value = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? parse_list(values_.at(key), key) : fallback;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size() || !std::isfinite(value)) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

VariabilitySpec parse_baseline(const std::string& text, double vbar, double sigma_eta) {
  const auto [name, args] = call_form(text, "baseline");
  try {
    if (name == "gauss" && args.empty()) return VariabilitySpec::truncated_gaussian(0.0, 2.0 * vbar, sigma_eta);
    if (name == "twopoint" && args.size() == 2) return VariabilitySpec::two_point(args[0], args[1]);
    if (name == "uniform" && args.size() == 2) return VariabilitySpec::uniform(args[0], args[1]);
    if (name == "dirac" && args.size() == 1) return VariabilitySpec::dirac(args[0]);
  } catch (const InputError& e) {
    throw ConfigError(std::string("baseline: ") + e.what());
  }
  throw ConfigError("baseline: expected gauss, twopoint(v1,v2), uniform(a,b) or dirac(v), got '" + text + "'");
}

size::SplitRule parse_split(const std::string& text) {
  if (text == "sym") return size::Symmetric{};
  if (text.rfind("asym:", 0) == 0) return size::UniformAsymmetric{parse_double(text.substr(5), "split")};
  throw ConfigError("split: expected sym or asym:eps, got '" + text + "'");
}

size::HeredityKernel parse_kernel(const std::string& text, VariabilitySpec law) {
  if (text == "memoryless") return size::Memoryless{std::move(law)};
  if (text.rfind("ar:", 0) == 0) return size::AutoRegressive{std::move(law), parse_double(text.substr(3), "kernel")};
  throw ConfigError("kernel: expected memoryless or ar:theta, got '" + text + "'");
}

size::RootRate parse_root_rate(const std::string& text) {
  if (text == "drawn") return size::DrawnFromKernel{};
  if (text.rfind("fixed:", 0) == 0) return size::FixedRate{parse_double(text.substr(6), "root_rate")};
  throw ConfigError("root_rate: expected fixed:v or drawn, got '" + text + "'");
}

std::vector<std::pair<double, double>> parse_rows(const std::string& text) {
  std::vector<std::pair<double, double>> rows;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("rows: expected alpha:T, got '" + item + "'");
    rows.emplace_back(parse_double(item.substr(0, colon), "rows"), parse_double(item.substr(colon + 1), "rows"));
  }
  if (rows.empty()) throw ConfigError("rows: empty list");
  return rows;
}

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

}  // namespace malthus::cli
