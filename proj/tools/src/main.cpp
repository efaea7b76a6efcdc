#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "malthus/estimator.hpp"

#ifndef MALTHUS_VERSION
#define MALTHUS_VERSION "unknown"
#endif

namespace {

using malthus::cli::Config;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::map<std::string, std::vector<Flag>>& command_flags() {
  static const std::vector<Flag> age = {
      {"--beta", "beta", "exponent(s) of B(a) = (a - lag)^beta, comma separated"},
      {"--lag", "lag", "lag of the power-law division rate"},
      {"--b-const", "b_const", "constant division rate instead of the power law"},
      {"--baseline", "baseline", "gauss | twopoint(v1,v2) | uniform(a,b)"},
      {"--vbar", "vbar", "mean of the gauss baseline"},
      {"--sigma-eta", "sigma_eta", "sd before truncation of the gauss baseline"},
      {"--tol", "tol", "root tolerance"},
  };
  static const std::vector<Flag> sim = {
      {"--M", "M", "number of trees"},
      {"--seed", "seed", "64-bit seed"},
      {"--baseline", "baseline", "gauss | twopoint(v1,v2) | uniform(a,b) | dirac(v)"},
      {"--kernel", "kernel", "memoryless | ar:theta"},
      {"--split", "split", "sym | asym:eps"},
      {"--growth", "growth", "exp | linear"},
      {"--division-mode", "division.mode", "unit_size | unit_time"},
  };
  auto plus = [](std::vector<Flag> base, std::vector<Flag> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  static const std::map<std::string, std::vector<Flag>> table = {
      {"age-curve", plus(age, {{"--alpha", "alpha", "contraction amplitude(s), comma separated"}})},
      {"age-perturb", plus(age, {{"--alphas", "alphas", "contraction amplitudes, comma separated"}})},
      {"size-mc", plus(sim, {{"--rows", "rows", "alpha:T pairs, comma separated"},
                             {"--estimator", "estimator", "biomass | count"}})},
      {"estimator-compare", plus(sim, {{"--alpha", "alpha", "contraction amplitude"},
                                       {"--horizons", "horizons", "horizons T, comma separated"}})},
      {"tree-dump", plus(sim, {{"--alpha", "alpha", "contraction amplitude"},
                               {"--T", "T", "horizon"},
                               {"--stream", "stream", "stream index of the tree"}})},
  };
  return table;
}

const char* command_help(const std::string& name) {
  if (name == "age-curve") return "Malthus parameter against the CV of the aging-rate law (age model)";
  if (name == "age-perturb") return "Quadratic expansion of the Malthus parameter around alpha = 0";
  if (name == "size-mc") return "Monte Carlo estimation on simulated size-structured trees";
  if (name == "estimator-compare") return "Standard deviation of the biomass and count estimators";
  return "One simulated tree, one row per cell";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Malthus parameter of structured cell populations with variable growth rates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MALTHUS_VERSION);

  struct Common {
    std::string config_file;
    std::vector<std::string> sets;
    std::string out;
    std::string manifest;
    unsigned threads = 0;
    std::map<std::string, std::string> flags;
  };
  std::map<std::string, Common> common;
  for (const auto& name : malthus::cli::command_names()) common[name];

  for (const auto& name : malthus::cli::command_names()) {
    Common& c = common[name];
    CLI::App* sub = app.add_subcommand(name, command_help(name));
    sub->add_option("--config", c.config_file, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", c.sets, "override one config key (key=value), repeatable");
    sub->add_option("--out", c.out, "output CSV path (default: stdout)");
    sub->add_option("--manifest", c.manifest, "manifest JSON path (default: <out>.manifest.json)");
    sub->add_option("--threads", c.threads, "worker threads (default: MALTHUS_THREADS or all cores)");
    for (const Flag& f : command_flags().at(name)) {
      sub->add_option_function<std::string>(
          f.name, [&c, key = std::string(f.key)](const std::string& v) { c.flags[key] = v; }, f.help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const Common& c = common[command];
  Config resolved;
  try {
    Config given;
    if (!c.config_file.empty()) given = Config::load(c.config_file);
    for (const auto& [k, v] : c.flags) given.set(k, v);
    for (const auto& s : c.sets) given.set_assignment(s);
    resolved = malthus::cli::resolve(command, given);
  } catch (const malthus::InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  const std::string started = utc_now();
  std::string csv;
  try {
    csv = malthus::cli::run_command(command, resolved, malthus::estimate::resolve_threads(c.threads));
  } catch (const malthus::InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const std::string finished = utc_now();

  try {
    if (c.out.empty()) {
      std::cout << csv;
    } else {
      write_file(c.out, csv);
    }
    const std::string manifest_path = !c.manifest.empty() ? c.manifest : (c.out.empty() ? "" : c.out + ".manifest.json");
    if (!manifest_path.empty()) {
      nlohmann::ordered_json m;
      m["command"] = command;
      m["tool_version"] = MALTHUS_VERSION;
      m["config"] = resolved.values();
      m["seed"] = malthus::cli::config_seed(resolved);
      m["started_at"] = started;
      m["finished_at"] = finished;
      m["outputs"] = nlohmann::ordered_json::array();
      m["outputs"].push_back({{"path", c.out.empty() ? "-" : c.out},
                              {"fnv1a64", malthus::estimate::hex64(malthus::estimate::fnv1a64(csv))}});
      write_file(manifest_path, m.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
