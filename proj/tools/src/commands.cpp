#include "commands.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "malthus/age_model.hpp"
#include "malthus/estimator.hpp"

namespace malthus::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kAgeKeys = {"beta", "lag", "b_const", "baseline", "vbar", "sigma_eta", "tol"};
const std::set<std::string> kSimKeys = {"division.mode", "division.x0", "division.beta", "growth",
                                        "split",         "kernel",      "baseline",      "baseline.vbar",
                                        "baseline.sigma_eta", "x_root", "root_rate",     "max_cells",
                                        "M",             "seed"};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(extra);
  return base;
}

const std::map<std::string, std::set<std::string>>& key_table() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"age-curve", with(kAgeKeys, {"alpha"})},
      {"age-perturb", with(kAgeKeys, {"alphas"})},
      {"size-mc", with(kSimKeys, {"rows", "estimator", "window.t1", "window.t2"})},
      {"estimator-compare", with(kSimKeys, {"alpha", "horizons"})},
      {"tree-dump", with(kSimKeys, {"alpha", "T", "stream"})},
  };
  return table;
}

AgeDivisionRate age_rate(const Config& c) {
  if (c.has("b_const")) {
    if (c.has("beta")) throw ConfigError("give either b_const or beta, not both");
    return AgeDivisionRate::constant(c.get_double("b_const", 1.0));
  }
  return AgeDivisionRate::power_lag(c.get_double("beta", 2.0), c.get_double("lag", 1.0));
}

VariabilitySpec age_baseline(const Config& c) {
  return parse_baseline(c.get("baseline", "gauss"), c.get_double("vbar", 1.0), c.get_double("sigma_eta", 0.7));
}

age::Tolerance age_tolerance(const Config& c) {
  age::Tolerance tol = age::Tolerance::root_default();
  tol.abs_tol = c.get_double("tol", tol.abs_tol);
  tol.validate();
  return tol;
}

std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int i = 1; i <= 9; ++i) a.push_back(0.1 * i);
  return a;
}

std::string age_curve(const Config& c) {
  const std::vector<double> betas =
      c.has("b_const") ? std::vector<double>{kNaN}
                       : c.get_list("beta", {0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0});
  const std::vector<double> alphas = c.get_list("alpha", default_alphas());
  const VariabilitySpec baseline = age_baseline(c);
  if (baseline.is_degenerate()) throw ConfigError("baseline must not be degenerate");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha values must lie in [0, 1]");
  }
  const age::Tolerance tol = age_tolerance(c);
  std::vector<AgeDivisionRate> rates;
  for (double beta : betas) {
    rates.push_back(std::isnan(beta) ? age_rate(c)
                                     : AgeDivisionRate::power_lag(beta, c.get_double("lag", 1.0)));
  }

  std::ostringstream os;
  os << "beta,alpha,cv,lambda,lambda_reference,solver_status\n";
  for (std::size_t i = 0; i < betas.size(); ++i) {
    double reference = kNaN;
    try {
      reference = age::malthus_reference(rates[i], baseline.mean(), tol);
    } catch (const Error&) {
    }
    for (const auto& row : age::cv_curve(rates[i], baseline, alphas, tol)) {
      os << fmt(betas[i]) << ',' << fmt(row.alpha) << ',' << fmt(row.cv) << ',' << fmt(row.lambda) << ','
         << fmt(reference) << ',' << row.status << '\n';
    }
  }
  return os.str();
}

std::string age_perturb(const Config& c) {
  const AgeDivisionRate B = age_rate(c);
  const VariabilitySpec baseline = age_baseline(c);
  if (baseline.is_degenerate()) throw ConfigError("baseline must not be degenerate");
  const std::vector<double> alphas = c.get_list("alphas", {0.0, 0.025, 0.05, 0.1, 0.2});
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alphas must lie in [0, 1]");
  }
  const age::Tolerance tol = age_tolerance(c);

  const double reference = age::malthus_reference(B, baseline.mean(), tol);
  const double d2 = age::d2lambda_at_zero(B, baseline, tol);
  std::ostringstream os;
  os << "alpha,lambda_exact,lambda_quadratic_approx,residual,d2_at_zero,dlambda_dalpha\n";
  for (double a : alphas) {
    const double approx = reference + 0.5 * a * a * d2;
    double exact = reference, slope = 0.0;
    if (a > 0.0) {
      const AlphaFamily family(baseline, a);
      exact = age::malthus_with_variability(B, family.realized(), tol);
      slope = age::dlambda_dalpha(B, family, tol);
    }
    os << fmt(a) << ',' << fmt(exact) << ',' << fmt(approx) << ',' << fmt(exact - approx) << ',' << fmt(d2) << ','
       << fmt(slope) << '\n';
  }
  return os.str();
}

struct SimSetup {
  size::SimConfig config;
  VariabilitySpec baseline;
  std::size_t M;
  std::uint64_t seed;
};

SimSetup sim_setup(const Config& c) {
  size::SimConfig config;
  const std::string mode = c.get("division.mode", "unit_size");
  if (mode == "unit_size") {
    config.division.mode = size::SizeDivisionRate::Mode::UnitSize;
  } else if (mode == "unit_time") {
    config.division.mode = size::SizeDivisionRate::Mode::UnitTime;
  } else {
    throw ConfigError("division.mode: expected unit_size or unit_time, got '" + mode + "'");
  }
  config.division.x0 = c.get_double("division.x0", 1.0);
  config.division.beta = c.get_double("division.beta", 2.0);
  const std::string growth = c.get("growth", "exp");
  if (growth == "exp") {
    config.growth = size::GrowthLaw::Exponential;
  } else if (growth == "linear") {
    config.growth = size::GrowthLaw::Linear;
  } else {
    throw ConfigError("growth: expected exp or linear, got '" + growth + "'");
  }
  config.split = parse_split(c.get("split", "sym"));
  VariabilitySpec baseline = parse_baseline(c.get("baseline", "gauss"), c.get_double("baseline.vbar", 1.0),
                                            c.get_double("baseline.sigma_eta", 0.7));
  config.kernel = parse_kernel(c.get("kernel", "memoryless"), baseline);
  config.x_root = c.get_double("x_root", 2.0);
  config.root_rate = parse_root_rate(c.get("root_rate", "fixed:1"));
  config.max_cells = static_cast<std::size_t>(c.get_u64("max_cells", 10'000'000));
  const long M = c.get_long("M", 50);
  if (M < 2) throw ConfigError("M must be >= 2");
  return {config, baseline, static_cast<std::size_t>(M), c.get_u64("seed", 1)};
}

// Kernel law for a given alpha; alpha = 0 is the Dirac mass at the mean.
size::SimConfig at_alpha(const SimSetup& s, double alpha, double T) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  size::SimConfig config = s.config;
  config.kernel = size::with_law(s.config.kernel, s.baseline.contract(alpha));
  config.horizon = T;
  try {
    config.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

const char* kTable1Rows = "0.1:10.5,0.2:11,0.3:11.25,0.4:11.5,0.5:11.75,0.6:12,0.7:12.25,0.8:12.5,0.9:13";

std::string size_mc(const Config& c, unsigned threads) {
  const SimSetup setup = sim_setup(c);
  const auto rows = parse_rows(c.get("rows", kTable1Rows));
  estimate::MonteCarloOptions options;
  const std::string est = c.get("estimator", "biomass");
  if (est == "biomass") {
    options.estimator = estimate::Estimator::Biomass;
  } else if (est == "count") {
    options.estimator = estimate::Estimator::Count;
  } else {
    throw ConfigError("estimator: expected biomass or count, got '" + est + "'");
  }
  options.window.t1_fraction = c.get_double("window.t1", 0.5);
  options.window.t2_fraction = c.get_double("window.t2", 1.0);
  if (!(options.window.t1_fraction >= 0.0 && options.window.t1_fraction < options.window.t2_fraction &&
        options.window.t2_fraction <= 1.0)) {
    throw ConfigError("window: need 0 <= window.t1 < window.t2 <= 1");
  }
  options.threads = threads;
  std::vector<estimate::TableRow> table;
  for (const auto& [alpha, T] : rows) {
    at_alpha(setup, alpha, T);
    table.push_back({alpha, T});
  }

  std::ostringstream os;
  os << "cv,alpha,T,mean,sd,ci_low,ci_high,pop_mean,pop_min,pop_max,status\n";
  for (const auto& row : estimate::cv_table(setup.config, setup.baseline, table, setup.M, setup.seed, options)) {
    os << fmt(row.cv) << ',' << fmt(row.alpha) << ',' << fmt(row.T) << ',';
    if (row.estimate) {
      const auto& e = *row.estimate;
      os << fmt(e.mean) << ',' << fmt(e.sd) << ',' << fmt(e.ci_low) << ',' << fmt(e.ci_high) << ','
         << fmt(e.pop.mean) << ',' << fmt(e.pop.min) << ',' << fmt(e.pop.max);
    } else {
      os << "nan,nan,nan,nan,nan,nan,nan";
    }
    os << ',' << (row.status.find_first_of(",\n") == std::string::npos ? row.status : "\"" + row.status + "\"")
       << '\n';
  }
  return os.str();
}

std::string estimator_compare(const Config& c, unsigned threads) {
  const SimSetup setup = sim_setup(c);
  const std::vector<double> horizons = c.get_list("horizons", {6.0, 8.0, 10.0, 12.0});
  double largest = 0.0;
  for (double T : horizons) {
    if (!(T > 0.0)) throw ConfigError("horizons must be > 0");
    largest = std::max(largest, T);
  }
  const size::SimConfig config = at_alpha(setup, c.get_double("alpha", 0.3), largest);
  std::ostringstream os;
  os << "T,sd_biomass,sd_count\n";
  for (const auto& row : estimate::estimator_sd_comparison(config, horizons, setup.M, setup.seed, threads)) {
    os << fmt(row.T) << ',' << fmt(row.sd_biomass) << ',' << fmt(row.sd_count) << '\n';
  }
  return os.str();
}

std::string tree_dump(const Config& c) {
  const SimSetup setup = sim_setup(c);
  const size::SimConfig config = at_alpha(setup, c.get_double("alpha", 0.4), c.get_double("T", 5.0));
  const size::TreeResult tree = size::simulate_tree(config, RngStream(setup.seed, c.get_u64("stream", 0)));
  std::ostringstream os;
  os << "id_path,parent_path,b,zeta,xi,tau,d\n";
  for (std::size_t i = 0; i < tree.cells.size(); ++i) {
    const auto& cell = tree.cells[i];
    // The root is written as "root".
    const std::string id = i == 0 ? "root" : tree.path_of(i);
    const std::string parent =
        cell.parent < 0 ? "" : (cell.parent == 0 ? "root" : tree.path_of(static_cast<std::size_t>(cell.parent)));
    os << id << ',' << parent << ',' << fmt(cell.b) << ',' << fmt(cell.zeta) << ',' << fmt(cell.xi) << ','
       << fmt(cell.tau) << ',' << fmt(cell.d) << '\n';
  }
  return os.str();
}

const std::map<std::string, std::string> kSimDefaults = {
    {"division.mode", "unit_size"}, {"division.x0", "1"},  {"division.beta", "2"},     {"growth", "exp"},
    {"split", "sym"},               {"kernel", "memoryless"}, {"baseline", "gauss"},    {"baseline.vbar", "1"},
    {"baseline.sigma_eta", "0.7"},  {"x_root", "2"},       {"root_rate", "fixed:1"},  {"max_cells", "10000000"},
    {"M", "50"},                    {"seed", "1"}};

std::map<std::string, std::string> merged(std::map<std::string, std::string> base,
                                          std::initializer_list<std::pair<const std::string, std::string>> extra) {
  for (const auto& [k, v] : extra) base[k] = v;
  return base;
}

const std::map<std::string, std::map<std::string, std::string>>& default_table() {
  static const std::map<std::string, std::map<std::string, std::string>> table = {
      {"age-curve",
       {{"beta", "0,0.25,0.5,0.75,1,2,3,4,5,6,7"},
        {"lag", "1"},
        {"alpha", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"},
        {"baseline", "gauss"},
        {"vbar", "1"},
        {"sigma_eta", "0.7"},
        {"tol", "1e-10"}}},
      {"age-perturb",
       {{"beta", "2"},
        {"lag", "1"},
        {"alphas", "0,0.025,0.05,0.1,0.2"},
        {"baseline", "gauss"},
        {"vbar", "1"},
        {"sigma_eta", "0.7"},
        {"tol", "1e-10"}}},
      {"size-mc", merged(kSimDefaults, {{"rows", kTable1Rows}, {"estimator", "biomass"}, {"window.t1", "0.5"},
                                        {"window.t2", "1"}})},
      {"estimator-compare", merged(kSimDefaults, {{"alpha", "0.3"}, {"horizons", "6,8,10,12"}})},
      {"tree-dump", merged(kSimDefaults, {{"alpha", "0.4"}, {"T", "5"}, {"stream", "0"}})},
  };
  return table;
}

}  // namespace

Config resolve(const std::string& command, const Config& given) {
  given.require_known(allowed_keys(command));
  Config out;
  for (const auto& [k, v] : default_table().at(command)) {
    if (k == "beta" && given.has("b_const")) continue;
    out.set(k, v);
  }
  out.merge(given);
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"age-curve", "age-perturb", "size-mc", "estimator-compare",
                                                 "tree-dump"};
  return names;
}

const std::set<std::string>& allowed_keys(const std::string& command) {
  const auto it = key_table().find(command);
  if (it == key_table().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

std::string run_command(const std::string& command, const Config& config, unsigned threads) {
  config.require_known(allowed_keys(command));
  if (command == "age-curve") return age_curve(config);
  if (command == "age-perturb") return age_perturb(config);
  if (command == "size-mc") return size_mc(config, threads);
  if (command == "estimator-compare") return estimator_compare(config, threads);
  return tree_dump(config);
}

std::uint64_t config_seed(const Config& config) { return config.get_u64("seed", 0); }

}  // namespace malthus::cli
