#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "malthus/error.hpp"
#include "malthus/size_sim.hpp"
#include "malthus/variability.hpp"

namespace malthus::cli {

/// Invalid configuration: reported with exit code 2 before any computation.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Flat key=value configuration. Keys may carry section dots
/// (division.beta=2); '#' starts a comment; later assignments win.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// "key=value" as given on the command line.
  void set_assignment(const std::string& assignment);
  void merge(const Config& other);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
std::vector<double> parse_list(const std::string& text, const std::string& what);

/// gauss | twopoint(v1,v2) | uniform(a,b) | dirac(v). `gauss` is the
/// Gaussian with mean vbar and sd sigma_eta truncated to [0, 2 vbar].
VariabilitySpec parse_baseline(const std::string& text, double vbar, double sigma_eta);
/// sym | asym:eps
size::SplitRule parse_split(const std::string& text);
/// memoryless | ar:theta
size::HeredityKernel parse_kernel(const std::string& text, VariabilitySpec law);
/// fixed:v | drawn
size::RootRate parse_root_rate(const std::string& text);
/// "alpha:T,alpha:T,..."
std::vector<std::pair<double, double>> parse_rows(const std::string& text);

/// Fixed 10-significant-digit formatting used in every CSV.
std::string fmt(double value);

}  // namespace malthus::cli
