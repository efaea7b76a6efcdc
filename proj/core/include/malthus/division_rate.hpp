#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "malthus/numerics.hpp"

namespace malthus {

/// Division rate B(a) per unit of physiological age, with the derived
/// cumulative hazard, survival S(a) = exp(-int_0^a B) and density of the age
/// at division f_B(a) = B(a) S(a).
///
/// Tabulated rates interpolate B linearly between grid points and integrate it
/// with the trapezoidal rule. Their survival is declared zero from the last
/// grid point a_max on, so whatever mass S(a_max-) remains divides exactly at
/// a_max; `terminal_mass()` exposes that atom and `expectation()` accounts for
/// it.
class AgeDivisionRate {
 public:
  struct Constant {
    double b;
  };
  struct PowerLag {
    double beta, lag;
  };
  struct Tabulated {
    std::vector<double> a;
    std::vector<double> rate;
    std::vector<double> cumulative;  // trapezoidal int_0^{a_i} B
  };
  using Variant = std::variant<Constant, PowerLag, Tabulated>;

  static AgeDivisionRate constant(double b);
  /// B(a) = (a - lag)^beta for a >= lag, 0 before.
  static AgeDivisionRate power_lag(double beta, double lag);
  /// Grid must start at 0 and be strictly increasing; rates non-negative.
  static AgeDivisionRate tabulated(std::vector<double> a, std::vector<double> rate);

  const Variant& variant() const { return rate_; }

  double rate(double a) const;
  /// dB/da where it exists; for tabulated rates the slope of the segment that
  /// contains a (right segment at grid points).
  double derivative(double a) const;
  double cumulative(double a) const;
  double survival(double a) const;
  double density(double a) const;

  /// Points where f_B fails to be smooth (the lag, grid nodes excluded).
  const std::vector<double>& kinks() const { return kinks_; }
  /// a_max; infinity for unbounded support.
  double support_end() const;
  /// Start of the open interval where B is differentiable (the lag, or 0).
  double smooth_from() const;
  /// Mass of the atom at a_max (tabulated rates only, else 0).
  double terminal_mass() const;
  /// Upper integration limit A with S(A) <= kTailEpsilon (a_max if finite).
  double cutoff() const { return cutoff_; }

  /// int g(a) f_B(a) da over [0, cutoff()] plus g(a_max) * terminal_mass().
  template <class G>
  double expectation(G&& g, const numerics::Tolerance& tol = numerics::Tolerance::quadrature_default()) const {
    double value = numerics::integrate([&](double a) { return g(a) * density(a); }, 0.0, cutoff_,
                                       tol, kinks_);
    const double atom = terminal_mass();
    if (atom > 0.0) value += g(cutoff_) * atom;
    return value;
  }

  std::string describe() const;

 private:
  explicit AgeDivisionRate(Variant rate);

  Variant rate_;
  std::vector<double> kinks_;
  double cutoff_ = 0.0;
};

}  // namespace malthus
