#pragma once

// Malthus-parameter estimators on simulated trees and their Monte Carlo
// aggregation.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "malthus/size_sim.hpp"

namespace malthus::estimate {

enum class Estimator { Biomass, Count };

std::string to_string(Estimator e);

/// Measurement times as fractions of the horizon; defaults T/2 and T.
struct Window {
  double t1_fraction = 0.5;
  double t2_fraction = 1.0;
};

/// ln(M(t2) / M(t1)) / (t2 - t1) with M the biomass.
double malthus_hat_biomass(const size::TreeResult& tree, double T, Window window = {});
/// Same ratio with M the number of living cells.
double malthus_hat_count(const size::TreeResult& tree, double T, Window window = {});
double malthus_hat(const size::TreeResult& tree, double T, Estimator e, Window window = {});

struct PopStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct MalthusEstimate {
  std::vector<double> per_tree;
  double mean = 0.0;
  double sd = 0.0;  // denominator M - 1
  double ci_low = 0.0;
  double ci_high = 0.0;
  PopStats pop;     // living cells at T
  double T = 0.0;
  std::size_t M = 0;
  std::uint64_t digest = 0;
};

/// Linear interpolation between order statistics (h = (n - 1) p).
double quantile(std::vector<double> values, double p);
double sample_sd(std::span<const double> values);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Worker count: `requested` if > 0, else MALTHUS_THREADS if set, else the
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(i) for i in [0, count) on `threads` workers. The first failure (by
/// index) is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct MonteCarloOptions {
  Estimator estimator = Estimator::Biomass;
  Window window = {};
  unsigned threads = 0;
};

/// M trees on streams (seed, 0..M-1), aggregated. Throws SimulationError
/// naming the failing stream index.
MalthusEstimate monte_carlo(const size::SimConfig& config, std::size_t M, std::uint64_t seed,
                            const MonteCarloOptions& options = {});

struct TableRow {
  double alpha;
  double T;
};

struct CvRow {
  double alpha;
  double cv;
  double T;
  std::optional<MalthusEstimate> estimate;
  std::string status;  // "ok" or the error message
};

/// One Monte Carlo per row with the kernel law replaced by baseline
/// contracted by alpha (alpha = 0: Dirac at the mean) and the horizon by T.
/// Every row uses the same seed. Row failures are recorded, not thrown.
std::vector<CvRow> cv_table(const size::SimConfig& base, const VariabilitySpec& baseline,
                            std::span<const TableRow> rows, std::size_t M, std::uint64_t seed,
                            const MonteCarloOptions& options = {});

struct SdComparisonRow {
  double T;
  double sd_biomass;
  double sd_count;
  double mean_biomass;
  double mean_count;
};

/// Both estimators at every horizon on the same M trees, each simulated once
/// up to the largest horizon.
std::vector<SdComparisonRow> estimator_sd_comparison(const size::SimConfig& config,
                                                     std::span<const double> horizons, std::size_t M,
                                                     std::uint64_t seed, unsigned threads = 0);

}  // namespace malthus::estimate
