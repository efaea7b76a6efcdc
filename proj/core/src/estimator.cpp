#include "malthus/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "malthus/error.hpp"

namespace malthus::estimate {

std::string to_string(Estimator e) { return e == Estimator::Biomass ? "biomass" : "count"; }

namespace {

std::pair<double, double> times(const size::TreeResult& tree, double T, Window w) {
  if (!(T > 0.0 && T <= tree.horizon)) throw InputError("extinct or horizon mismatch: T outside (0, horizon]");
  if (!(w.t1_fraction >= 0.0 && w.t1_fraction < w.t2_fraction && w.t2_fraction <= 1.0)) {
    throw InputError("measurement window must satisfy 0 <= t1 < t2 <= 1");
  }
  return {w.t1_fraction * T, w.t2_fraction * T};
}

double log_ratio(double m1, double m2, double t1, double t2) {
  if (!(m1 > 0.0 && m2 > 0.0)) throw InputError("extinct or horizon mismatch: empty population");
  return std::log(m2 / m1) / (t2 - t1);
}

}  // namespace

double malthus_hat_biomass(const size::TreeResult& tree, double T, Window window) {
  const auto [t1, t2] = times(tree, T, window);
  return log_ratio(size::biomass_at(tree, t1), size::biomass_at(tree, t2), t1, t2);
}

double malthus_hat_count(const size::TreeResult& tree, double T, Window window) {
  const auto [t1, t2] = times(tree, T, window);
  return log_ratio(static_cast<double>(size::count_at(tree, t1)), static_cast<double>(size::count_at(tree, t2)),
                   t1, t2);
}

double malthus_hat(const size::TreeResult& tree, double T, Estimator e, Window window) {
  return e == Estimator::Biomass ? malthus_hat_biomass(tree, T, window) : malthus_hat_count(tree, T, window);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MALTHUS_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

template <class Body>
void run_streams(std::size_t M, unsigned threads, Body&& body) {
  parallel_for(M, resolve_threads(threads), [&](std::size_t i) {
    try {
      body(i);
    } catch (const std::exception& e) {
      throw SimulationError("stream " + std::to_string(i) + ": " + e.what());
    }
  });
}

}  // namespace

MalthusEstimate monte_carlo(const size::SimConfig& config, std::size_t M, std::uint64_t seed,
                            const MonteCarloOptions& options) {
  if (M < 2) throw InputError("monte_carlo needs M >= 2");
  config.validate();
  MalthusEstimate out;
  out.per_tree.assign(M, 0.0);
  std::vector<double> pop(M, 0.0);
  run_streams(M, options.threads, [&](std::size_t i) {
    const size::TreeResult tree = size::simulate_tree(config, RngStream(seed, i));
    out.per_tree[i] = malthus_hat(tree, config.horizon, options.estimator, options.window);
    pop[i] = static_cast<double>(size::count_at(tree, config.horizon));
  });
  out.M = M;
  out.T = config.horizon;
  out.mean = std::accumulate(out.per_tree.begin(), out.per_tree.end(), 0.0) / static_cast<double>(M);
  out.sd = sample_sd(out.per_tree);
  out.ci_low = quantile(out.per_tree, 0.025);
  out.ci_high = quantile(out.per_tree, 0.975);
  out.pop.mean = std::accumulate(pop.begin(), pop.end(), 0.0) / static_cast<double>(M);
  out.pop.min = *std::min_element(pop.begin(), pop.end());
  out.pop.max = *std::max_element(pop.begin(), pop.end());
  out.digest = fnv1a64(config.describe() + ";M=" + std::to_string(M) + ";seed=" + std::to_string(seed) +
                       ";estimator=" + to_string(options.estimator));
  return out;
}

std::vector<CvRow> cv_table(const size::SimConfig& base, const VariabilitySpec& baseline,
                            std::span<const TableRow> rows, std::size_t M, std::uint64_t seed,
                            const MonteCarloOptions& options) {
  std::vector<CvRow> out;
  for (const TableRow& row : rows) {
    CvRow r{row.alpha, 0.0, row.T, std::nullopt, "ok"};
    try {
      if (!(row.alpha >= 0.0 && row.alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
      const VariabilitySpec law = baseline.contract(row.alpha);
      r.cv = law.cv();
      size::SimConfig config = base;
      config.kernel = size::with_law(base.kernel, law);
      config.horizon = row.T;
      r.estimate = monte_carlo(config, M, seed, options);
    } catch (const std::exception& e) {
      r.status = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SdComparisonRow> estimator_sd_comparison(const size::SimConfig& config,
                                                     std::span<const double> horizons, std::size_t M,
                                                     std::uint64_t seed, unsigned threads) {
  if (M < 2) throw InputError("estimator comparison needs M >= 2");
  if (horizons.empty()) throw InputError("estimator comparison needs at least one horizon");
  size::SimConfig full = config;
  full.horizon = *std::max_element(horizons.begin(), horizons.end());
  full.validate();
  const std::size_t H = horizons.size();
  std::vector<double> biomass(M * H), count(M * H);
  run_streams(M, threads, [&](std::size_t i) {
    const size::TreeResult tree = size::simulate_tree(full, RngStream(seed, i));
    for (std::size_t h = 0; h < H; ++h) {
      biomass[h * M + i] = malthus_hat_biomass(tree, horizons[h]);
      count[h * M + i] = malthus_hat_count(tree, horizons[h]);
    }
  });
  std::vector<SdComparisonRow> out;
  for (std::size_t h = 0; h < H; ++h) {
    std::span<const double> b(biomass.data() + h * M, M), c(count.data() + h * M, M);
    out.push_back({horizons[h], sample_sd(b), sample_sd(c),
                   std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(M),
                   std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(M)});
  }
  return out;
}

}  // namespace malthus::estimate
