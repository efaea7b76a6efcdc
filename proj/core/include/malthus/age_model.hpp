#pragma once

// Age-structured population with individual aging rates: cells age at speed
// v (drawn at birth from rho, independently of the mother) and divide at rate
// v B(a) per unit of time. The Malthus parameter is the unique positive root
// of the renewal relation
//
//   H_rho(lambda) = 2 E_rho[ int exp(-lambda a / v) f_B(a) da ] = 1,
//
// and the direct / adjoint eigenvectors are explicit.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "malthus/division_rate.hpp"
#include "malthus/numerics.hpp"
#include "malthus/variability.hpp"

namespace malthus::age {

using numerics::Tolerance;

/// 2 int exp(-lambda a / v) f_B(a) da.
double renewal_at_rate(const AgeDivisionRate& B, double v, double lambda, const Tolerance& quad);
/// H_rho(lambda) = E_rho[renewal_at_rate(B, v, lambda)].
double renewal_function(const AgeDivisionRate& B, const VariabilitySpec& rho, double lambda,
                        const Tolerance& quad);

/// Quadrature tolerance used internally for a given root tolerance (ten times
/// tighter, so the root certificate is not swamped by quadrature error).
Tolerance quadrature_for(const Tolerance& root);

/// Malthus parameter when every cell ages at rate v_bar.
double malthus_reference(const AgeDivisionRate& B, double v_bar,
                         const Tolerance& tol = Tolerance::root_default());

/// Malthus parameter with aging rates drawn from rho.
double malthus_with_variability(const AgeDivisionRate& B, const VariabilitySpec& rho,
                                const Tolerance& tol = Tolerance::root_default());

using RateField = std::function<double(double a, double v)>;

/// Malthus parameter for a general per-age hazard gamma/g_a and inverse aging
/// speed 1/g_a, both functions of (a, v):
///
///   2 E_rho[ int hazard(a,v) exp(-int_0^a (lambda inv_speed + hazard)) da ] = 1.
///
/// `kinks` lists ages where hazard or inv_speed is not smooth.
double malthus_general(const RateField& hazard, const RateField& inv_speed, const VariabilitySpec& rho,
                       const Tolerance& tol = Tolerance::root_default(),
                       std::span<const double> kinks = {});

struct EigenGrid {
  std::vector<double> a;
  std::vector<double> v;
};

/// Eigenelements for g_a = v, gamma = v B(a) and a density rho.
///
/// N(a,v)   = kappa rho(v) / v * exp(-lambda a / v - Lambda(a))
/// phi(a,v) = kappa' int_a^inf B(s) exp(-lambda (s-a)/v - (Lambda(s) - Lambda(a))) ds
///
/// with kappa, kappa' fixed by int N = 1 and int N phi = 1. Grid values are
/// stored row-major by age: index ia * v.size() + iv.
class EigenPair {
 public:
  EigenPair(AgeDivisionRate B, VariabilitySpec rho, double lambda, const Tolerance& quad);

  double lambda() const { return lambda_; }
  double kappa() const { return kappa_; }
  double kappa_prime() const { return kappa_prime_; }

  double direct(double a, double v) const;
  double adjoint(double a, double v) const;

  /// Fills the gridded fields.
  void evaluate_on(const EigenGrid& grid);
  const EigenGrid& grid() const { return grid_; }
  const std::vector<double>& N() const { return N_; }
  const std::vector<double>& phi() const { return phi_; }
  double N_at(std::size_t ia, std::size_t iv) const { return N_[ia * grid_.v.size() + iv]; }
  double phi_at(std::size_t ia, std::size_t iv) const { return phi_[ia * grid_.v.size() + iv]; }

 private:
  AgeDivisionRate B_;
  VariabilitySpec rho_;
  Tolerance quad_;
  double lambda_;
  double kappa_ = 0.0;
  double kappa_prime_ = 0.0;
  EigenGrid grid_;
  std::vector<double> N_;
  std::vector<double> phi_;
};

/// Throws InputError unless rho is a density (Uniform or TruncatedGaussian).
EigenPair eigen_pair(const AgeDivisionRate& B, const VariabilitySpec& rho, const EigenGrid& grid,
                     const Tolerance& tol = Tolerance::root_default());

/// d lambda / d alpha for the contracted family rho_alpha, as the ratio
/// D2 / D1 of the implicit-function derivatives of H.
double dlambda_dalpha(const AgeDivisionRate& B, const AlphaFamily& family,
                      const Tolerance& tol = Tolerance::root_default());

/// Second derivative of alpha -> lambda_{B, rho_alpha} at alpha = 0:
///
///   sigma^2 / v_bar^2 * int (L a)(L a - 2) e^{-L a} f_B / int a e^{-L a} f_B / v_bar
///
/// with L = lambda_ref / v_bar. Zero for a degenerate baseline.
double d2lambda_at_zero(const AgeDivisionRate& B, const VariabilitySpec& baseline,
                        const Tolerance& tol = Tolerance::root_default());

enum class FbShape { decreasing_fB, increasing_fB, mixed };

std::string to_string(FbShape shape);

/// Sign of B' - B^2 (equivalently of f_B') sampled on the open interval where
/// B is differentiable: segment midpoints for tabulated rates, 10^4 uniform
/// interior points otherwise.
FbShape sign_condition(const AgeDivisionRate& B);

struct CurveRow {
  double alpha;
  double cv;
  double lambda;
  std::string status;  // "ok" or the solver error
};

/// One row per alpha (plus the CV = 0 anchor holding the reference value),
/// sorted by CV. Solver failures are recorded in the row.
std::vector<CurveRow> cv_curve(const AgeDivisionRate& B, const VariabilitySpec& baseline,
                               std::span<const double> alphas,
                               const Tolerance& tol = Tolerance::root_default());

}  // namespace malthus::age
