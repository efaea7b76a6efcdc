#include "malthus/variability.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "malthus/error.hpp"

namespace malthus {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct TruncatedMoments {
  double mean, variance, mass;
};

TruncatedMoments truncated_moments(const VariabilitySpec::TruncatedGaussian& g) {
  const double centre = 0.5 * (g.v_min + g.v_max);
  const double lo = (g.v_min - centre) / g.sigma_eta;
  const double hi = (g.v_max - centre) / g.sigma_eta;
  const double mass = std_normal_cdf(hi) - std_normal_cdf(lo);
  const double pl = std_normal_pdf(lo), ph = std_normal_pdf(hi);
  const double shift = (pl - ph) / mass;
  const double var = g.sigma_eta * g.sigma_eta * (1.0 + (lo * pl - hi * ph) / mass - shift * shift);
  return {centre + g.sigma_eta * shift, var, mass};
}

constexpr long kRejectionBudget = 1'000'000;

}  // namespace

VariabilitySpec::VariabilitySpec(Variant law) : law_(std::move(law)) { build_nodes(); }

VariabilitySpec VariabilitySpec::dirac(double v) {
  if (!(v > 0.0)) throw InputError("Dirac rate must be positive");
  return VariabilitySpec(Dirac{v});
}

VariabilitySpec VariabilitySpec::uniform(double v_min, double v_max) {
  if (!(v_min >= 0.0 && v_max > v_min)) throw InputError("uniform law needs 0 <= v_min < v_max");
  return VariabilitySpec(Uniform{v_min, v_max});
}

VariabilitySpec VariabilitySpec::truncated_gaussian(double v_min, double v_max, double sigma_eta) {
  if (!(v_min >= 0.0 && v_max > v_min)) {
    throw InputError("truncated Gaussian needs 0 <= v_min < v_max");
  }
  if (!(sigma_eta > 0.0)) throw InputError("truncated Gaussian needs sigma_eta > 0");
  return VariabilitySpec(TruncatedGaussian{v_min, v_max, sigma_eta});
}

VariabilitySpec VariabilitySpec::mixture(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InputError("mixture needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.v > 0.0)) throw InputError("mixture atoms must lie in (0, inf)");
    if (!(a.w >= 0.0)) throw InputError("mixture weights must be non-negative");
    total += a.w;
  }
  if (!(total > 0.0)) throw InputError("mixture weights sum to zero");
  for (auto& a : atoms) a.w /= total;
  return VariabilitySpec(DiscreteMixture{std::move(atoms)});
}

VariabilitySpec VariabilitySpec::two_point(double v1, double v2) {
  return mixture({{v1, 0.5}, {v2, 0.5}});
}

double VariabilitySpec::mean() const {
  return std::visit(Overloaded{
                        [](const Dirac& d) { return d.v; },
                        [](const Uniform& u) { return 0.5 * (u.v_min + u.v_max); },
                        [](const TruncatedGaussian& g) { return truncated_moments(g).mean; },
                        [](const DiscreteMixture& m) {
                          double s = 0.0;
                          for (const auto& a : m.atoms) s += a.w * a.v;
                          return s;
                        },
                    },
                    law_);
}

double VariabilitySpec::variance() const {
  return std::visit(Overloaded{
                        [](const Dirac&) { return 0.0; },
                        [](const Uniform& u) {
                          const double w = u.v_max - u.v_min;
                          return w * w / 12.0;
                        },
                        [](const TruncatedGaussian& g) { return truncated_moments(g).variance; },
                        [this](const DiscreteMixture& m) {
                          const double mu = mean();
                          double s = 0.0;
                          for (const auto& a : m.atoms) s += a.w * (a.v - mu) * (a.v - mu);
                          return s;
                        },
                    },
                    law_);
}

double VariabilitySpec::sd() const { return std::sqrt(variance()); }

std::pair<double, double> VariabilitySpec::support() const {
  return std::visit(Overloaded{
                        [](const Dirac& d) { return std::pair{d.v, d.v}; },
                        [](const Uniform& u) { return std::pair{u.v_min, u.v_max}; },
                        [](const TruncatedGaussian& g) { return std::pair{g.v_min, g.v_max}; },
                        [](const DiscreteMixture& m) {
                          double lo = m.atoms.front().v, hi = lo;
                          for (const auto& a : m.atoms) {
                            if (a.w <= 0.0) continue;
                            lo = std::min(lo, a.v);
                            hi = std::max(hi, a.v);
                          }
                          return std::pair{lo, hi};
                        },
                    },
                    law_);
}

bool VariabilitySpec::is_density() const {
  return std::holds_alternative<Uniform>(law_) || std::holds_alternative<TruncatedGaussian>(law_);
}

bool VariabilitySpec::is_degenerate() const {
  if (std::holds_alternative<Dirac>(law_)) return true;
  if (const auto* m = std::get_if<DiscreteMixture>(&law_)) {
    const auto [lo, hi] = support();
    return lo == hi || m->atoms.size() == 1;
  }
  return false;
}

double VariabilitySpec::density(double v) const {
  return std::visit(Overloaded{
                        [](const Dirac&) -> double {
                          throw InputError("Dirac law has no density");
                        },
                        [v](const Uniform& u) {
                          return (v >= u.v_min && v <= u.v_max) ? 1.0 / (u.v_max - u.v_min) : 0.0;
                        },
                        [v](const TruncatedGaussian& g) {
                          if (v < g.v_min || v > g.v_max) return 0.0;
                          const double centre = 0.5 * (g.v_min + g.v_max);
                          const double mass = truncated_moments(g).mass;
                          return std_normal_pdf((v - centre) / g.sigma_eta) / (g.sigma_eta * mass);
                        },
                        [](const DiscreteMixture&) -> double {
                          throw InputError("discrete mixture has no density");
                        },
                    },
                    law_);
}

void VariabilitySpec::build_nodes() {
  nodes_.clear();
  std::visit(Overloaded{
                 [this](const Dirac& d) { nodes_.push_back({d.v, 1.0}); },
                 [this](const DiscreteMixture& m) {
                   for (const auto& a : m.atoms) {
                     if (a.w > 0.0) nodes_.push_back({a.v, a.w});
                   }
                 },
                 [this](const auto& dens) {
                   nodes_ = numerics::gauss_legendre(64, dens.v_min, dens.v_max);
                   double total = 0.0;
                   for (auto& n : nodes_) {
                     n.w *= density(n.x);
                     total += n.w;
                   }
                   for (auto& n : nodes_) n.w /= total;
                 },
             },
             law_);
}

VariabilitySpec VariabilitySpec::contract(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("contraction alpha must lie in [0, 1]");
  const double m = mean();
  if (alpha == 0.0) return dirac(m);
  auto squeeze = [&](double v) { return alpha * v + (1.0 - alpha) * m; };
  return std::visit(Overloaded{
                        [&](const Dirac& d) { return dirac(d.v); },
                        [&](const Uniform& u) { return uniform(squeeze(u.v_min), squeeze(u.v_max)); },
                        [&](const TruncatedGaussian& g) {
                          return truncated_gaussian(squeeze(g.v_min), squeeze(g.v_max),
                                                    alpha * g.sigma_eta);
                        },
                        [&](const DiscreteMixture& mix) {
                          std::vector<Atom> atoms;
                          atoms.reserve(mix.atoms.size());
                          for (const auto& a : mix.atoms) atoms.push_back({squeeze(a.v), a.w});
                          return mixture(std::move(atoms));
                        },
                    },
                    law_);
}

double VariabilitySpec::sample(Philox4x64& gen) const {
  return std::visit(Overloaded{
                        [](const Dirac& d) { return d.v; },
                        [&gen](const Uniform& u) {
                          return u.v_min + (u.v_max - u.v_min) * gen.uniform01();
                        },
                        [&gen](const TruncatedGaussian& g) {
                          const double centre = 0.5 * (g.v_min + g.v_max);
                          for (long i = 0; i < kRejectionBudget; ++i) {
                            std::normal_distribution<double> normal(centre, g.sigma_eta);
                            const double v = normal(gen);
                            if (v >= g.v_min && v <= g.v_max && v > 0.0) return v;
                          }
                          throw SimulationError("truncated Gaussian: rejection budget exhausted");
                        },
                        [&gen](const DiscreteMixture& m) {
                          const double u = gen.uniform01();
                          double acc = 0.0;
                          for (const auto& a : m.atoms) {
                            acc += a.w;
                            if (u < acc) return a.v;
                          }
                          return m.atoms.back().v;
                        },
                    },
                    law_);
}

std::string VariabilitySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Dirac& d) { os << "dirac(" << d.v << ")"; },
                 [&](const Uniform& u) { os << "uniform(" << u.v_min << "," << u.v_max << ")"; },
                 [&](const TruncatedGaussian& g) {
                   os << "gauss(" << g.v_min << "," << g.v_max << "," << g.sigma_eta << ")";
                 },
                 [&](const DiscreteMixture& m) {
                   os << "mixture(";
                   for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                     os << (i ? ";" : "") << m.atoms[i].v << ":" << m.atoms[i].w;
                   }
                   os << ")";
                 },
             },
             law_);
  return os.str();
}

AlphaFamily::AlphaFamily(VariabilitySpec base, double a) : baseline(std::move(base)), alpha(a) {
  if (baseline.is_degenerate()) throw InputError("alpha family needs a non-degenerate baseline");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
}

}  // namespace malthus
