#pragma once

// Size-structured branching tree with individual growth rates. Each cell is
// born with a size and a growth rate, grows deterministically, and divides at
// a size drawn from its division hazard; the two daughters share the parent's
// size at division.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "malthus/rng.hpp"
#include "malthus/variability.hpp"

namespace malthus::size {

/// B(x) = (x - x0)^beta for x >= x0, read either as a hazard per unit of size
/// (UnitSize) or per unit of time (UnitTime).
struct SizeDivisionRate {
  enum class Mode { UnitSize, UnitTime };
  Mode mode = Mode::UnitSize;
  double x0 = 1.0;
  double beta = 2.0;

  double rate(double x) const;
  /// int_0^x B.
  double cumulative(double x) const;
  void validate() const;
};

enum class GrowthLaw { Exponential, Linear };

struct Symmetric {};
struct UniformAsymmetric {
  double eps;
};
using SplitRule = std::variant<Symmetric, UniformAsymmetric>;

struct Memoryless {
  VariabilitySpec law;
};
struct AutoRegressive {
  VariabilitySpec law;
  double theta;
};
using HeredityKernel = std::variant<Memoryless, AutoRegressive>;

const VariabilitySpec& kernel_law(const HeredityKernel& kernel);
/// Same kernel type with its law replaced.
HeredityKernel with_law(const HeredityKernel& kernel, VariabilitySpec law);

struct FixedRate {
  double v;
};
struct DrawnFromKernel {};
using RootRate = std::variant<FixedRate, DrawnFromKernel>;

struct SimConfig {
  SizeDivisionRate division;
  GrowthLaw growth = GrowthLaw::Exponential;
  SplitRule split = Symmetric{};
  HeredityKernel kernel = Memoryless{VariabilitySpec::dirac(1.0)};
  double horizon = 1.0;
  double x_root = 2.0;
  RootRate root_rate = FixedRate{1.0};
  std::size_t max_cells = 10'000'000;

  /// Throws InputError on an invalid field.
  void validate() const;
  /// Canonical one-line description (also hashed into run digests).
  std::string describe() const;
};

struct CellRecord {
  std::int64_t parent;  // index in TreeResult::cells, -1 for the root
  std::uint32_t generation;
  std::uint8_t bit;    // 0 or 1: position below the parent
  std::uint64_t key;   // hash of the {0,1}-path, keys the cell's random draws
  double b;            // birth time
  double zeta;         // lifetime
  double xi;           // birth size
  double tau;          // growth rate
  double d;            // division time b + zeta
  std::int64_t first_child = -1;
};

struct TreeResult {
  std::vector<CellRecord> cells;
  double horizon = 0.0;
  GrowthLaw growth = GrowthLaw::Exponential;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  /// "" for the root, otherwise the string of 0/1 branch bits from the root.
  std::string path_of(std::size_t index) const;
  /// Size of cell `index` at time t (no check that it is alive).
  double size_at(std::size_t index, double t) const;
};

inline constexpr std::uint64_t kRootKey = 0x6D616C7468757321ULL;
inline std::uint64_t child_key(std::uint64_t parent_key, int bit) {
  return mix64(parent_key ^ (bit ? 0xA0761D6478BD642FULL : 0xE7037ED1A0B428DBULL));
}

inline constexpr long kRejectionBudget = 1'000'000;

/// Step 1: root with FixedRate uses the fixed value (pass no parent rate);
/// otherwise a draw from the kernel given the parent's rate.
double sample_growth_rate(const HeredityKernel& kernel, std::optional<double> parent_rate,
                          Philox4x64& gen);

/// Division size with survival exp(-int_{x_b}^s B) per unit size, by inverting
/// the cumulative hazard: with E = -ln(1 - u),
///   s = x0 + ((beta + 1) E + max(x_b - x0, 0)^(beta + 1))^(1 / (beta + 1)).
double sample_division_size(const SizeDivisionRate& division, double birth_size, double u);

/// Same inversion with the exponential draw scaled: hazard B / scale per unit size.
double invert_scaled(const SizeDivisionRate& division, double birth_size, double exp_draw, double scale);

/// Division size under a hazard B(x) per unit of time with exponential growth
/// at rate v, i.e. B(x) / (v x) per unit of size. Sampled by thinning: from
/// the current point z the hazard is dominated by B(x) / (v z), whose law is
/// inverted in closed form; a proposal s is accepted with probability z / s,
/// otherwise the search restarts from s.
double sample_division_size_unit_time(const SizeDivisionRate& division, double birth_size, double v,
                                      Philox4x64& gen);

/// Daughter size under symmetric splitting for the unit-time model: half of
/// `sample_division_size_unit_time`. Supported on [x / 2, inf).
double sample_daughter_size_unit_time(const SizeDivisionRate& division, double birth_size, double v,
                                      Philox4x64& gen);

/// Time to grow from birth_size to s at rate v. Throws InputError if s < birth_size.
double lifetime(GrowthLaw growth, double birth_size, double s, double v);

/// Breadth-first expansion of the tree until every living cell divides after
/// the horizon. Throws SimulationError("horizon too large") past max_cells.
TreeResult simulate_tree(const SimConfig& config, const RngStream& rng);

struct LivingCell {
  std::size_t index;
  double size;
  double rate;
};

/// Cells with b <= t < d. Throws InputError if t is outside [0, horizon].
std::vector<LivingCell> living_at(const TreeResult& tree, double t);
std::size_t count_at(const TreeResult& tree, double t);
/// Total size of living cells at t, summed in cell order.
double biomass_at(const TreeResult& tree, double t);

}  // namespace malthus::size
