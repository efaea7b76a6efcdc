#include "malthus/age_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "malthus/error.hpp"

namespace malthus::age {

Tolerance quadrature_for(const Tolerance& root) {
  Tolerance q = Tolerance::quadrature_default();
  q.abs_tol = 0.1 * root.abs_tol;
  return q;
}

double renewal_at_rate(const AgeDivisionRate& B, double v, double lambda, const Tolerance& quad) {
  const double k = lambda / v;
  return 2.0 * B.expectation([k](double a) { return std::exp(-k * a); }, quad);
}

double renewal_function(const AgeDivisionRate& B, const VariabilitySpec& rho, double lambda,
                        const Tolerance& quad) {
  double h = 0.0;
  for (const auto& node : rho.nodes()) h += node.w * renewal_at_rate(B, node.x, lambda, quad);
  return h;
}

double malthus_reference(const AgeDivisionRate& B, double v_bar, const Tolerance& tol) {
  if (!(v_bar > 0.0)) throw InputError("malthus_reference: v_bar must be positive");
  const Tolerance quad = quadrature_for(tol);
  return numerics::find_root_decreasing(
      [&](double lambda) { return renewal_at_rate(B, v_bar, lambda, quad); }, 1.0, tol);
}

double malthus_with_variability(const AgeDivisionRate& B, const VariabilitySpec& rho,
                                const Tolerance& tol) {
  if (!(rho.support().first >= 0.0)) throw InputError("rate law must live on [0, inf)");
  const Tolerance quad = quadrature_for(tol);
  return numerics::find_root_decreasing(
      [&](double lambda) { return renewal_function(B, rho, lambda, quad); }, 1.0, tol);
}

namespace {

// Precomputed integrand for one rate node: at each quadrature point the
// weight, hazard, accumulated inverse speed and accumulated hazard.
struct GeneralNode {
  double rho_weight;
  std::vector<double> omega, hazard, inv_speed_acc, hazard_acc;
};

constexpr int kGeneralPanels = 256;
constexpr int kPanelOrder = 16;

GeneralNode tabulate_general(const RateField& hazard, const RateField& inv_speed, double v,
                             double rho_weight, const Tolerance& quad, std::span<const double> kinks) {
  auto h = [&](double a) { return hazard(a, v); };
  auto w = [&](double a) { return inv_speed(a, v); };
  auto survival = [&](double a) {
    if (a <= 0.0) return 1.0;
    return std::exp(-numerics::integrate(h, 0.0, a, quad, kinks));
  };
  const double cutoff = numerics::semi_infinite_cutoff(survival);

  std::vector<double> cuts;
  for (int i = 0; i <= kGeneralPanels; ++i) cuts.push_back(cutoff * i / kGeneralPanels);
  for (double k : kinks) {
    if (k > 0.0 && k < cutoff) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  GeneralNode node{rho_weight, {}, {}, {}, {}};
  double w_acc = 0.0, h_acc = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p], hi = cuts[p + 1];
    for (const auto& q : numerics::gauss_legendre(kPanelOrder, lo, hi)) {
      double w_part = 0.0, h_part = 0.0;
      for (const auto& r : numerics::gauss_legendre(kPanelOrder, lo, q.x)) {
        w_part += r.w * w(r.x);
        h_part += r.w * h(r.x);
      }
      node.omega.push_back(q.w);
      node.hazard.push_back(h(q.x));
      node.inv_speed_acc.push_back(w_acc + w_part);
      node.hazard_acc.push_back(h_acc + h_part);
    }
    for (const auto& r : numerics::gauss_legendre(kPanelOrder, lo, hi)) {
      w_acc += r.w * w(r.x);
      h_acc += r.w * h(r.x);
    }
  }
  return node;
}

}  // namespace

double malthus_general(const RateField& hazard, const RateField& inv_speed, const VariabilitySpec& rho,
                       const Tolerance& tol, std::span<const double> kinks) {
  const Tolerance quad = quadrature_for(tol);
  std::vector<GeneralNode> nodes;
  for (const auto& n : rho.nodes()) {
    nodes.push_back(tabulate_general(hazard, inv_speed, n.x, n.w, quad, kinks));
  }
  auto H = [&](double lambda) {
    double total = 0.0;
    for (const auto& node : nodes) {
      double inner = 0.0;
      for (std::size_t k = 0; k < node.omega.size(); ++k) {
        inner += node.omega[k] * node.hazard[k] *
                 std::exp(-lambda * node.inv_speed_acc[k] - node.hazard_acc[k]);
      }
      total += node.rho_weight * inner;
    }
    return 2.0 * total;
  };
  return numerics::find_root_decreasing(H, 1.0, tol);
}

EigenPair::EigenPair(AgeDivisionRate B, VariabilitySpec rho, double lambda, const Tolerance& quad)
    : B_(std::move(B)), rho_(std::move(rho)), quad_(quad), lambda_(lambda) {
  // int N = kappa * E_rho[ (1/v) int exp(-lambda a / v) S(a) da ]
  double mass = 0.0;
  double first_moment = 0.0;
  for (const auto& node : rho_.nodes()) {
    const double v = node.x;
    const double k = lambda_ / v;
    double s_int = numerics::integrate([&](double a) { return std::exp(-k * a) * B_.survival(a); },
                                       0.0, B_.cutoff(), quad_, B_.kinks());
    mass += node.w * s_int / v;
    // int N phi = kappa kappa' E_rho[ int (a / v) exp(-lambda a / v) f_B(a) da ] by Fubini.
    first_moment += node.w * B_.expectation([&](double a) { return a / v * std::exp(-k * a); }, quad_);
  }
  kappa_ = 1.0 / mass;
  kappa_prime_ = 1.0 / (kappa_ * first_moment);
}

double EigenPair::direct(double a, double v) const {
  if (a < 0.0) return 0.0;
  return kappa_ * rho_.density(v) / v * std::exp(-lambda_ * a / v - B_.cumulative(a)) *
         (a > B_.support_end() ? 0.0 : 1.0);
}

double EigenPair::adjoint(double a, double v) const {
  const double end = B_.support_end();
  if (a >= end) return kappa_prime_;
  const double base = B_.cumulative(a);
  auto conditional = [&](double s) { return std::exp(-lambda_ * (s - a) / v - (B_.cumulative(s) - base)); };
  double upper;
  if (std::isfinite(end)) {
    upper = end;
  } else {
    upper = a + numerics::semi_infinite_cutoff([&](double t) { return conditional(a + t); });
  }
  double tail = 0.0;
  if (upper > a) {
    tail = numerics::integrate([&](double s) { return B_.rate(s) * conditional(s); }, a, upper, quad_,
                               B_.kinks());
  }
  // Mass surviving to a_max divides there.
  if (B_.terminal_mass() > 0.0) tail += conditional(end);
  return kappa_prime_ * tail;
}

void EigenPair::evaluate_on(const EigenGrid& grid) {
  grid_ = grid;
  N_.assign(grid.a.size() * grid.v.size(), 0.0);
  phi_.assign(grid.a.size() * grid.v.size(), 0.0);
  for (std::size_t ia = 0; ia < grid.a.size(); ++ia) {
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv) {
      N_[ia * grid.v.size() + iv] = direct(grid.a[ia], grid.v[iv]);
      phi_[ia * grid.v.size() + iv] = adjoint(grid.a[ia], grid.v[iv]);
    }
  }
}

EigenPair eigen_pair(const AgeDivisionRate& B, const VariabilitySpec& rho, const EigenGrid& grid,
                     const Tolerance& tol) {
  if (!rho.is_density()) throw InputError("eigenvectors require a density");
  const double lambda = malthus_with_variability(B, rho, tol);
  EigenPair pair(B, rho, lambda, quadrature_for(tol));
  pair.evaluate_on(grid);
  return pair;
}

double dlambda_dalpha(const AgeDivisionRate& B, const AlphaFamily& family, const Tolerance& tol) {
  const double lambda = malthus_with_variability(B, family.realized(), tol);
  const Tolerance quad = quadrature_for(tol);
  const double v_bar = family.baseline.mean();
  double d1 = 0.0, d2 = 0.0;
  for (const auto& node : family.baseline.nodes()) {
    const double dev = node.x - v_bar;
    const double u = family.alpha * dev + v_bar;
    const double k = lambda / u;
    d1 += node.w * B.expectation([&](double a) { return a / u * std::exp(-k * a); }, quad);
    if (dev != 0.0) {
      d2 += node.w * dev * B.expectation([&](double a) { return lambda * a / (u * u) * std::exp(-k * a); }, quad);
    }
  }
  return d2 / d1;
}

double d2lambda_at_zero(const AgeDivisionRate& B, const VariabilitySpec& baseline, const Tolerance& tol) {
  const double variance = baseline.variance();
  if (variance == 0.0) return 0.0;
  const double v_bar = baseline.mean();
  const double lambda = malthus_reference(B, v_bar, tol);
  const Tolerance quad = quadrature_for(tol);
  const double k = lambda / v_bar;
  const double den = B.expectation([&](double a) { return a / v_bar * std::exp(-k * a); }, quad);
  const double num = B.expectation([&](double a) { return k * a * (k * a - 2.0) * std::exp(-k * a); }, quad);
  return variance / (v_bar * v_bar) * num / den;
}

std::string to_string(FbShape shape) {
  switch (shape) {
    case FbShape::decreasing_fB:
      return "decreasing_fB";
    case FbShape::increasing_fB:
      return "increasing_fB";
    case FbShape::mixed:
      return "mixed";
  }
  return "mixed";
}

FbShape sign_condition(const AgeDivisionRate& B) {
  std::vector<double> points;
  if (const auto* t = std::get_if<AgeDivisionRate::Tabulated>(&B.variant())) {
    for (std::size_t i = 0; i + 1 < t->a.size(); ++i) points.push_back(0.5 * (t->a[i] + t->a[i + 1]));
  } else {
    constexpr int kSamples = 10'000;
    const double lo = B.smooth_from();
    const double hi = std::min(B.support_end(), B.cutoff());
    for (int i = 1; i <= kSamples; ++i) points.push_back(lo + (hi - lo) * i / (kSamples + 1.0));
  }
  bool any_negative = false, any_positive = false, any_zero = false;
  for (double a : points) {
    const double b = B.rate(a);
    const double d = B.derivative(a) - b * b;
    if (d < 0.0) {
      any_negative = true;
    } else if (d > 0.0) {
      any_positive = true;
    } else {
      any_zero = true;
    }
  }
  if (any_negative && !any_positive && !any_zero) return FbShape::decreasing_fB;
  if (any_positive && !any_negative && !any_zero) return FbShape::increasing_fB;
  return FbShape::mixed;
}

std::vector<CurveRow> cv_curve(const AgeDivisionRate& B, const VariabilitySpec& baseline,
                               std::span<const double> alphas, const Tolerance& tol) {
  if (baseline.is_degenerate()) throw InputError("cv_curve needs a non-degenerate baseline");
  const double v_bar = baseline.mean();
  const double base_cv = baseline.cv();
  std::vector<CurveRow> rows;
  auto solve = [&](CurveRow row, auto&& fn) {
    try {
      row.lambda = fn();
      row.status = "ok";
    } catch (const std::exception& e) {
      row.lambda = std::numeric_limits<double>::quiet_NaN();
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  };
  solve(CurveRow{0.0, 0.0, 0.0, {}}, [&] { return malthus_reference(B, v_bar, tol); });
  for (double alpha : alphas) {
    if (alpha == 0.0) continue;
    CurveRow row{alpha, alpha * base_cv, 0.0, {}};
    solve(row, [&] {
      if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
      return malthus_with_variability(B, baseline.contract(alpha), tol);
    });
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& x, const CurveRow& y) { return x.cv < y.cv; });
  return rows;
}

}  // namespace malthus::age
