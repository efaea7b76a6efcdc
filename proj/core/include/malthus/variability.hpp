#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "malthus/numerics.hpp"
#include "malthus/rng.hpp"

namespace malthus {

/// Law of the individual aging / growth rate v.
///
/// Variants: a Dirac mass, a uniform density, a Gaussian truncated to
/// [v_min, v_max] (centred at the midpoint, `sigma_eta` being the sd before
/// truncation) and a finite mixture of atoms. Discrete variants are accepted
/// by the eigenvalue solvers as an extension of the density case and serve as
/// test oracles; eigenvectors require a density.
class VariabilitySpec {
 public:
  struct Dirac {
    double v;
  };
  struct Uniform {
    double v_min, v_max;
  };
  struct TruncatedGaussian {
    double v_min, v_max, sigma_eta;
  };
  struct Atom {
    double v, w;
  };
  struct DiscreteMixture {
    std::vector<Atom> atoms;
  };
  using Variant = std::variant<Dirac, Uniform, TruncatedGaussian, DiscreteMixture>;

  static VariabilitySpec dirac(double v);
  static VariabilitySpec uniform(double v_min, double v_max);
  static VariabilitySpec truncated_gaussian(double v_min, double v_max, double sigma_eta);
  /// Weights are renormalised to sum to one.
  static VariabilitySpec mixture(std::vector<Atom> atoms);
  /// Equal-weight two-point law {v1, v2}.
  static VariabilitySpec two_point(double v1, double v2);

  const Variant& variant() const { return law_; }

  double mean() const;
  double variance() const;
  double sd() const;
  double cv() const { return sd() / mean(); }
  std::pair<double, double> support() const;

  bool is_density() const;
  /// Zero variance (Dirac, or a mixture collapsed on one point).
  bool is_degenerate() const;

  /// Density value; throws InputError for discrete variants.
  double density(double v) const;

  /// Quadrature rule for integrals against the law: 64-node Gauss-Legendre
  /// weighted by the density (weights renormalised to sum 1) for densities,
  /// the atoms themselves for discrete laws.
  const std::vector<numerics::QuadNode>& nodes() const { return nodes_; }

  /// rho_alpha(v) = rho((v - (1 - alpha) m) / alpha) / alpha with m the mean.
  /// The family is closed under contraction; alpha = 0 gives Dirac{m}.
  VariabilitySpec contract(double alpha) const;

  /// One draw. Truncated Gaussians use rejection against the untruncated
  /// normal; throws SimulationError if the rejection budget is exhausted.
  double sample(Philox4x64& gen) const;

  std::string describe() const;

 private:
  explicit VariabilitySpec(Variant law);
  void build_nodes();

  Variant law_;
  std::vector<numerics::QuadNode> nodes_;
};

/// Baseline law contracted toward its mean by `alpha` in (0, 1].
struct AlphaFamily {
  VariabilitySpec baseline;
  double alpha;

  /// Throws InputError if the baseline is degenerate or alpha is outside (0, 1].
  AlphaFamily(VariabilitySpec baseline, double alpha);

  VariabilitySpec realized() const { return baseline.contract(alpha); }
  double cv() const { return alpha * baseline.cv(); }
};

}  // namespace malthus
