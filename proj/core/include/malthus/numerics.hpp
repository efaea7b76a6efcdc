#pragma once

// Numerical kernels shared by the age model, the simulator and the tests:
// adaptive quadrature, survival-tail truncation, bracketed root finding for
// decreasing functions and a central second difference.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "malthus/error.hpp"

namespace malthus::numerics {

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  long max_iter = 500;

  /// Throws InputError unless abs_tol > 0, rel_tol >= 0, max_iter >= 1.
  void validate() const;

  static Tolerance root_default() { return {1e-10, 0.0, 500}; }
  /// For quadrature max_iter bounds the number of Simpson panels examined.
  static Tolerance quadrature_default() { return {1e-10, 0.0, 4'000'000}; }
};

/// Survival mass below which the tail of a semi-infinite integral is dropped.
inline constexpr double kTailEpsilon = 1e-13;

struct QuadNode {
  double x;
  double w;
};

/// Gauss-Legendre rule with `n` nodes mapped to [a, b]. Supported n: 8, 16,
/// 32, 64.
std::vector<QuadNode> gauss_legendre(int n, double a, double b);

namespace detail {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double flm, frm;
  double estimate;  // Richardson-corrected two-panel Simpson value
  double error;     // |refined - coarse| / 15
  int depth;

  bool operator<(const SimpsonPanel& other) const { return error < other.error; }
};

template <class F>
SimpsonPanel make_panel(F& f, double a, double b, double fa, double fm, double fb, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double refined = (m - a) / 6.0 * (fa + 4.0 * flm + fm) + (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = refined - whole;
  return {a, m, b, fa, fm, fb, flm, frm, refined + delta / 15.0, std::abs(delta) / 15.0, depth};
}

inline double neumaier_sum(const std::vector<SimpsonPanel>& panels) {
  double total = 0.0;
  double compensation = 0.0;
  for (const auto& p : panels) {
    const double t = total + p.estimate;
    if (std::abs(total) >= std::abs(p.estimate)) {
      compensation += (total - t) + p.estimate;
    } else {
      compensation += (p.estimate - t) + total;
    }
    total = t;
  }
  return total + compensation;
}

}  // namespace detail

/// Globally adaptive Simpson quadrature of f over [a, b].
///
/// `kinks` lists points where f (or a derivative) is discontinuous; the
/// interval is split there and f is evaluated one ulp inside each piece, so
/// jumps are seen as one-sided limits. The panel with the largest Richardson
/// error estimate is bisected until the summed estimate is at most
/// max(abs_tol, rel_tol |Q|). Throws ConvergenceError (carrying the current
/// value Q) when max_iter bisections or the depth limit are exhausted first.
template <class F>
double integrate(F&& f, double a, double b, const Tolerance& tol = Tolerance::quadrature_default(),
                 std::span<const double> kinks = {}) {
  tol.validate();
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw InputError("integrate: requires a < b");
  }
  std::vector<double> cuts{a};
  for (double k : kinks) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Sixteen equal starting panels in total (at least one per piece) so
  // narrow features in long intervals are not skipped by the first error
  // estimate.
  constexpr int kMaxDepth = 60;
  const int kStartPanels = std::max(1, 16 / static_cast<int>(cuts.size() - 1));
  std::vector<detail::SimpsonPanel> heap;
  heap.reserve(static_cast<std::size_t>(kStartPanels) * cuts.size() * 2);
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double h = (hi - lo) / kStartPanels;
    double x0 = lo;
    double f0 = f(i == 0 ? lo : std::nextafter(lo, hi));
    for (int j = 1; j <= kStartPanels; ++j) {
      const double x1 = (j == kStartPanels) ? hi : lo + h * j;
      const double f1 = (j < kStartPanels || i + 2 == cuts.size()) ? f(x1) : f(std::nextafter(hi, lo));
      heap.push_back(detail::make_panel(f, x0, x1, f0, f(0.5 * (x0 + x1)), f1, 0));
      error += heap.back().error;
      x0 = x1;
      f0 = f1;
    }
  }
  std::make_heap(heap.begin(), heap.end());

  double value = 0.0;
  for (const auto& p : heap) value += p.estimate;
  auto target = [&] { return std::max(tol.abs_tol, tol.rel_tol * std::abs(value)); };
  auto recount = [&] {
    error = 0.0;
    value = 0.0;
    for (const auto& p : heap) {
      error += p.error;
      value += p.estimate;
    }
  };

  long budget = tol.max_iter;
  bool converged = true;
  for (;;) {
    if (error <= target()) {
      recount();
      if (error <= target()) break;
    }
    std::pop_heap(heap.begin(), heap.end());
    const detail::SimpsonPanel p = heap.back();
    if (--budget < 0 || p.depth >= kMaxDepth || !(0.5 * (p.a + p.m) > p.a) ||
        !(0.5 * (p.m + p.b) < p.b)) {
      converged = false;
      break;
    }
    heap.pop_back();
    error -= p.error;
    value -= p.estimate;
    heap.push_back(detail::make_panel(f, p.a, p.m, p.fa, p.flm, p.fm, p.depth + 1));
    error += heap.back().error;
    value += heap.back().estimate;
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(detail::make_panel(f, p.m, p.b, p.fm, p.frm, p.fb, p.depth + 1));
    error += heap.back().error;
    value += heap.back().estimate;
    std::push_heap(heap.begin(), heap.end());
  }
  const double total = detail::neumaier_sum(heap);
  if (!converged) {
    throw ConvergenceError("integrate: tolerance not met on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "]",
                           total);
  }
  return total;
}

/// Smallest A (to bisection accuracy, from above) with survival(A) <= eps.
/// Doubling from A = 1 brackets the crossing, bisection then shrinks it; the
/// returned point always satisfies survival(A) <= eps.
template <class S>
double semi_infinite_cutoff(S&& survival, double eps = kTailEpsilon) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("semi_infinite_cutoff: eps must lie in (0, 1)");
  if (survival(0.0) <= eps) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  constexpr double kOverflowScale = 1e150;
  while (survival(hi) > eps) {
    lo = hi;
    hi *= 2.0;
    if (hi > kOverflowScale) {
      throw ConvergenceError("semi_infinite_cutoff: non-integrable tail", hi);
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    if (survival(mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Root of h(x) = target for h continuous and strictly decreasing on [0, inf).
///
/// The bracket is grown by doubling from [0, 1]; Brent's method (inverse
/// quadratic interpolation, secant, bisection fallback) then refines it until
/// the bracket is narrower than abs_tol / 4 and |h(x) - target| <= abs_tol.
template <class H>
double find_root_decreasing(H&& h, double target, const Tolerance& tol = Tolerance::root_default()) {
  tol.validate();
  auto g = [&](double x) { return h(x) - target; };
  double a = 0.0;
  double fa = g(a);
  if (!(fa > 0.0)) throw InputError("find_root_decreasing: no positive root (h(0) <= target)");
  double b = 1.0;
  double fb = g(b);
  int doublings = 0;
  while (fb > 0.0) {
    a = b;
    fa = fb;
    b *= 2.0;
    fb = g(b);
    if (++doublings > 200) {
      throw ConvergenceError("find_root_decreasing: bracket not found", b);
    }
  }
  if (fb == 0.0) return b;

  const double xtol = 0.25 * tol.abs_tol;
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (long it = 0; it < tol.max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double eps_x = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double half = 0.5 * (c - b);
    if (fb == 0.0 || (std::abs(half) <= eps_x && std::abs(fb) <= tol.abs_tol)) return b;
    if (std::abs(half) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b)) {
      // Bracket collapsed to adjacent doubles; the residual is what it is.
      if (std::abs(fb) <= tol.abs_tol) return b;
      throw ConvergenceError("find_root_decreasing: residual above tolerance at machine resolution", b);
    }
    if (std::abs(e) >= eps_x && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * half * q - std::abs(eps_x * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > eps_x) ? d : (half > 0.0 ? eps_x : -eps_x);
    fb = g(b);
  }
  throw ConvergenceError("find_root_decreasing: max_iter exceeded", b);
}

/// (f(x0 + h) - 2 f(x0) + f(x0 - h)) / h^2. For one-sided use at the origin
/// the caller passes the even extension x -> f(|x|).
template <class F>
double second_central_difference(F&& f, double x0, double h) {
  if (!(h > 0.0)) throw InputError("second_central_difference: h must be positive");
  return (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
}

}  // namespace malthus::numerics
