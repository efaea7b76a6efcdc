#include "malthus/size_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "malthus/error.hpp"

namespace malthus::size {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Uniform on (0, 1): the zero draw is resampled.
double positive_uniform(Philox4x64& gen) {
  for (;;) {
    const double u = gen.uniform01();
    if (u > 0.0) return u;
  }
}

}  // namespace

double SizeDivisionRate::rate(double x) const {
  if (x < x0) return 0.0;
  return beta == 0.0 ? 1.0 : std::pow(x - x0, beta);
}

double SizeDivisionRate::cumulative(double x) const {
  if (x <= x0) return 0.0;
  return std::pow(x - x0, beta + 1.0) / (beta + 1.0);
}

void SizeDivisionRate::validate() const {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw InputError("division.x0 must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("division.beta must be finite and >= 0");
}

const VariabilitySpec& kernel_law(const HeredityKernel& kernel) {
  return std::visit([](const auto& k) -> const VariabilitySpec& { return k.law; }, kernel);
}

HeredityKernel with_law(const HeredityKernel& kernel, VariabilitySpec law) {
  return std::visit(Overloaded{
                        [&](const Memoryless&) -> HeredityKernel { return Memoryless{std::move(law)}; },
                        [&](const AutoRegressive& k) -> HeredityKernel {
                          return AutoRegressive{std::move(law), k.theta};
                        },
                    },
                    kernel);
}

void SimConfig::validate() const {
  division.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be finite and > 0");
  if (!(x_root > 0.0) || !std::isfinite(x_root)) throw InputError("x_root must be finite and > 0");
  if (max_cells < 1) throw InputError("max_cells must be >= 1");
  if (const auto* a = std::get_if<UniformAsymmetric>(&split); a && !(a->eps >= 0.0 && a->eps < 0.5)) {
    throw InputError("asymmetric split eps must lie in [0, 1/2)");
  }
  if (const auto* k = std::get_if<AutoRegressive>(&kernel); k && !(k->theta >= 0.0 && k->theta <= 1.0)) {
    throw InputError("auto-regressive theta must lie in [0, 1]");
  }
  if (!(kernel_law(kernel).support().first > 0.0)) {
    throw InputError("growth rates must be positive: kernel support must exclude 0");
  }
  if (const auto* f = std::get_if<FixedRate>(&root_rate); f && !(f->v > 0.0 && std::isfinite(f->v))) {
    throw InputError("root rate must be finite and > 0");
  }
}

std::string SimConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "division=" << (division.mode == SizeDivisionRate::Mode::UnitSize ? "unit_size" : "unit_time")
     << ",x0=" << division.x0 << ",beta=" << division.beta
     << ";growth=" << (growth == GrowthLaw::Exponential ? "exp" : "linear") << ";split=";
  std::visit(Overloaded{
                 [&](const Symmetric&) { os << "sym"; },
                 [&](const UniformAsymmetric& a) { os << "asym:" << a.eps; },
             },
             split);
  os << ";kernel=";
  std::visit(Overloaded{
                 [&](const Memoryless& k) { os << "memoryless(" << k.law.describe() << ")"; },
                 [&](const AutoRegressive& k) { os << "ar:" << k.theta << "(" << k.law.describe() << ")"; },
             },
             kernel);
  os << ";T=" << horizon << ";x_root=" << x_root << ";root_rate=";
  std::visit(Overloaded{
                 [&](const FixedRate& f) { os << "fixed:" << f.v; },
                 [&](const DrawnFromKernel&) { os << "drawn"; },
             },
             root_rate);
  os << ";max_cells=" << max_cells;
  return os.str();
}

std::string TreeResult::path_of(std::size_t index) const {
  std::string path(cells.at(index).generation, '0');
  for (std::int64_t i = static_cast<std::int64_t>(index); cells[i].parent >= 0; i = cells[i].parent) {
    path[cells[i].generation - 1] = static_cast<char>('0' + cells[i].bit);
  }
  return path;
}

double TreeResult::size_at(std::size_t index, double t) const {
  const CellRecord& c = cells[index];
  if (growth == GrowthLaw::Exponential) return c.xi * std::exp(c.tau * (t - c.b));
  return c.xi + c.tau * (t - c.b);
}

double sample_growth_rate(const HeredityKernel& kernel, std::optional<double> parent_rate,
                          Philox4x64& gen) {
  return std::visit(Overloaded{
                        [&](const Memoryless& k) { return k.law.sample(gen); },
                        [&](const AutoRegressive& k) {
                          const double fresh = k.law.sample(gen);
                          if (!parent_rate) return fresh;
                          const auto [lo, hi] = k.law.support();
                          const double v = k.theta * *parent_rate + (1.0 - k.theta) * fresh;
                          return std::clamp(v, lo, hi);
                        },
                    },
                    kernel);
}

double invert_scaled(const SizeDivisionRate& division, double birth_size, double exp_draw, double scale) {
  const double p = division.beta + 1.0;
  const double start = std::max(birth_size - division.x0, 0.0);
  return division.x0 + std::pow(p * scale * exp_draw + std::pow(start, p), 1.0 / p);
}

double sample_division_size(const SizeDivisionRate& division, double birth_size, double u) {
  if (!(birth_size > 0.0)) throw InputError("birth size must be > 0");
  if (!(u >= 0.0 && u < 1.0)) throw InputError("u must lie in [0, 1)");
  const double s = invert_scaled(division, birth_size, -std::log1p(-u), 1.0);
  return std::max(s, birth_size);
}

double sample_division_size_unit_time(const SizeDivisionRate& division, double birth_size, double v,
                                      Philox4x64& gen) {
  if (!(birth_size > 0.0)) throw InputError("birth size must be > 0");
  if (!(v > 0.0)) throw InputError("growth rate must be > 0");
  double z = birth_size;
  for (long tries = 0; tries < kRejectionBudget; ++tries) {
    const double e = -std::log(positive_uniform(gen));
    const double s = std::max(invert_scaled(division, z, e, v * z), z);
    if (gen.uniform01() * s < z) return s;
    z = s;
  }
  std::ostringstream os;
  os << "unit-time division size: rejection budget exhausted (birth size " << birth_size << ", rate "
     << v << ", last point " << z << ")";
  throw SimulationError(os.str());
}

double sample_daughter_size_unit_time(const SizeDivisionRate& division, double birth_size, double v,
                                      Philox4x64& gen) {
  return 0.5 * sample_division_size_unit_time(division, birth_size, v, gen);
}

double lifetime(GrowthLaw growth, double birth_size, double s, double v) {
  if (!(v > 0.0)) throw InputError("growth rate must be > 0");
  if (s < birth_size) throw InputError("division size below birth size");
  if (growth == GrowthLaw::Exponential) return std::log(s / birth_size) / v;
  return (s - birth_size) / v;
}

namespace {

double draw_division_size(const SimConfig& config, double birth_size, double v, Philox4x64& gen) {
  const SizeDivisionRate& div = config.division;
  for (long tries = 0; tries < kRejectionBudget; ++tries) {
    double s;
    if (div.mode == SizeDivisionRate::Mode::UnitSize) {
      s = sample_division_size(div, birth_size, gen.uniform01());
    } else if (config.growth == GrowthLaw::Exponential) {
      s = sample_division_size_unit_time(div, birth_size, v, gen);
    } else {
      // Linear growth: B(x) per unit time is B(x) / v per unit size.
      s = invert_scaled(div, birth_size, -std::log(positive_uniform(gen)), v);
    }
    if (s > birth_size) return s;
  }
  throw SimulationError("division size: no draw above the birth size");
}

}  // namespace

TreeResult simulate_tree(const SimConfig& config, const RngStream& rng) {
  config.validate();
  TreeResult tree;
  tree.horizon = config.horizon;
  tree.growth = config.growth;
  tree.seed = rng.seed();
  tree.stream_index = rng.stream_index();

  auto fill = [&](CellRecord& cell, std::optional<double> parent_rate, bool is_root) {
    Philox4x64 gen = rng.substream(cell.key);
    if (is_root && std::holds_alternative<FixedRate>(config.root_rate)) {
      cell.tau = std::get<FixedRate>(config.root_rate).v;
    } else {
      cell.tau = sample_growth_rate(config.kernel, parent_rate, gen);
    }
    const double s = draw_division_size(config, cell.xi, cell.tau, gen);
    cell.zeta = lifetime(config.growth, cell.xi, s, cell.tau);
    cell.d = cell.b + cell.zeta;
    return std::pair{s, gen};
  };

  std::deque<std::pair<std::size_t, std::pair<double, Philox4x64>>> queue;
  tree.cells.push_back(CellRecord{-1, 0, 0, kRootKey, 0.0, 0.0, config.x_root, 0.0, 0.0});
  queue.emplace_back(0, fill(tree.cells[0], std::nullopt, true));

  while (!queue.empty()) {
    auto [index, state] = std::move(queue.front());
    queue.pop_front();
    const CellRecord parent = tree.cells[index];
    if (!(parent.d < config.horizon)) continue;
    if (tree.cells.size() + 2 > config.max_cells) {
      throw SimulationError("horizon too large: tree exceeds " + std::to_string(config.max_cells) + " cells");
    }
    auto& [s, gen] = state;
    double x0, x1;
    if (const auto* a = std::get_if<UniformAsymmetric>(&config.split)) {
      const double u = a->eps + (1.0 - 2.0 * a->eps) * gen.uniform01();
      // The larger piece first, so that s - big is exact and the two pieces sum to s.
      const double big = std::max(u, 1.0 - u) * s;
      const double small = s - big;
      x0 = u >= 0.5 ? big : small;
      x1 = u >= 0.5 ? small : big;
    } else {
      x0 = x1 = 0.5 * s;
    }
    tree.cells[index].first_child = static_cast<std::int64_t>(tree.cells.size());
    const double sizes[2] = {x0, x1};
    for (int bit = 0; bit < 2; ++bit) {
      CellRecord child{static_cast<std::int64_t>(index), parent.generation + 1, static_cast<std::uint8_t>(bit),
                       child_key(parent.key, bit), parent.d, 0.0, sizes[bit], 0.0, 0.0};
      tree.cells.push_back(child);
      const std::size_t ci = tree.cells.size() - 1;
      queue.emplace_back(ci, fill(tree.cells[ci], parent.tau, false));
    }
  }
  return tree;
}

namespace {

void check_time(const TreeResult& tree, double t) {
  if (!(t >= 0.0 && t <= tree.horizon)) {
    throw InputError("time outside [0, horizon]: the population beyond the horizon is incomplete");
  }
}

}  // namespace

std::vector<LivingCell> living_at(const TreeResult& tree, double t) {
  check_time(tree, t);
  std::vector<LivingCell> out;
  for (std::size_t i = 0; i < tree.cells.size(); ++i) {
    const CellRecord& c = tree.cells[i];
    if (c.b <= t && t < c.d) out.push_back({i, tree.size_at(i, t), c.tau});
  }
  return out;
}

std::size_t count_at(const TreeResult& tree, double t) {
  check_time(tree, t);
  return static_cast<std::size_t>(std::count_if(tree.cells.begin(), tree.cells.end(),
                                                [t](const CellRecord& c) { return c.b <= t && t < c.d; }));
}

double biomass_at(const TreeResult& tree, double t) {
  check_time(tree, t);
  double total = 0.0, compensation = 0.0;
  for (std::size_t i = 0; i < tree.cells.size(); ++i) {
    const CellRecord& c = tree.cells[i];
    if (!(c.b <= t && t < c.d)) continue;
    const double v = tree.size_at(i, t);
    const double sum = total + v;
    compensation += std::abs(total) >= std::abs(v) ? (total - sum) + v : (v - sum) + total;
    total = sum;
  }
  return total + compensation;
}

}  // namespace malthus::size
