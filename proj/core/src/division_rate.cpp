#include "malthus/division_rate.hpp"

#include <algorithm>
#include <cmath>
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

// Segment index i with a[i] <= x < a[i+1], clamped to the last segment.
std::size_t segment_of(const std::vector<double>& grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = (it == grid.begin()) ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

}  // namespace

AgeDivisionRate::AgeDivisionRate(Variant rate) : rate_(std::move(rate)) {
  std::visit(Overloaded{
                 [this](const Constant& c) {
                   cutoff_ = numerics::semi_infinite_cutoff([&](double a) { return std::exp(-c.b * a); });
                 },
                 [this](const PowerLag& p) {
                   if (p.lag > 0.0) kinks_.push_back(p.lag);
                   cutoff_ = numerics::semi_infinite_cutoff([this](double a) { return survival(a); });
                 },
                 [this](const Tabulated& t) {
                   kinks_.assign(t.a.begin() + 1, t.a.end() - 1);
                   cutoff_ = t.a.back();
                 },
             },
             rate_);
}

AgeDivisionRate AgeDivisionRate::constant(double b) {
  if (!(b > 0.0)) throw InputError("constant division rate must be positive");
  return AgeDivisionRate(Constant{b});
}

AgeDivisionRate AgeDivisionRate::power_lag(double beta, double lag) {
  if (!(beta >= 0.0)) throw InputError("power-lag exponent must be >= 0");
  if (!(lag >= 0.0)) throw InputError("power-lag lag must be >= 0");
  return AgeDivisionRate(PowerLag{beta, lag});
}

AgeDivisionRate AgeDivisionRate::tabulated(std::vector<double> a, std::vector<double> rate) {
  if (a.size() < 2 || a.size() != rate.size()) {
    throw InputError("tabulated rate needs matching grids with at least two points");
  }
  if (a.front() != 0.0) throw InputError("tabulated rate grid must start at 0");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0 && !(a[i] > a[i - 1])) throw InputError("tabulated rate grid must increase strictly");
    if (!(rate[i] >= 0.0) || !std::isfinite(rate[i])) {
      throw InputError("tabulated rates must be finite and non-negative");
    }
  }
  std::vector<double> cum(a.size(), 0.0);
  for (std::size_t i = 1; i < a.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * (rate[i] + rate[i - 1]) * (a[i] - a[i - 1]);
  }
  return AgeDivisionRate(Tabulated{std::move(a), std::move(rate), std::move(cum)});
}

double AgeDivisionRate::rate(double a) const {
  if (a < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.b; },
                        [a](const PowerLag& p) {
                          if (a < p.lag) return 0.0;
                          return p.beta == 0.0 ? 1.0 : std::pow(a - p.lag, p.beta);
                        },
                        [a](const Tabulated& t) {
                          if (a > t.a.back()) return 0.0;
                          const std::size_t i = segment_of(t.a, a);
                          const double s = (a - t.a[i]) / (t.a[i + 1] - t.a[i]);
                          return t.rate[i] + s * (t.rate[i + 1] - t.rate[i]);
                        },
                    },
                    rate_);
}

double AgeDivisionRate::derivative(double a) const {
  return std::visit(Overloaded{
                        [](const Constant&) { return 0.0; },
                        [a](const PowerLag& p) {
                          if (a <= p.lag || p.beta == 0.0) return 0.0;
                          return p.beta * std::pow(a - p.lag, p.beta - 1.0);
                        },
                        [a](const Tabulated& t) {
                          const std::size_t i = segment_of(t.a, a);
                          return (t.rate[i + 1] - t.rate[i]) / (t.a[i + 1] - t.a[i]);
                        },
                    },
                    rate_);
}

double AgeDivisionRate::cumulative(double a) const {
  if (a <= 0.0) return 0.0;
  return std::visit(Overloaded{
                        [a](const Constant& c) { return c.b * a; },
                        [a](const PowerLag& p) {
                          if (a <= p.lag) return 0.0;
                          return std::pow(a - p.lag, p.beta + 1.0) / (p.beta + 1.0);
                        },
                        [a](const Tabulated& t) {
                          const double x = std::min(a, t.a.back());
                          const std::size_t i = segment_of(t.a, x);
                          const double h = x - t.a[i];
                          const double slope = (t.rate[i + 1] - t.rate[i]) / (t.a[i + 1] - t.a[i]);
                          return t.cumulative[i] + h * (t.rate[i] + 0.5 * slope * h);
                        },
                    },
                    rate_);
}

double AgeDivisionRate::survival(double a) const {
  if (const auto* t = std::get_if<Tabulated>(&rate_); t && a > t->a.back()) return 0.0;
  return std::exp(-cumulative(a));
}

double AgeDivisionRate::density(double a) const {
  const double b = rate(a);
  return b == 0.0 ? 0.0 : b * survival(a);
}

double AgeDivisionRate::support_end() const {
  if (const auto* t = std::get_if<Tabulated>(&rate_)) return t->a.back();
  return std::numeric_limits<double>::infinity();
}

double AgeDivisionRate::smooth_from() const {
  if (const auto* p = std::get_if<PowerLag>(&rate_)) return p->lag;
  return 0.0;
}

double AgeDivisionRate::terminal_mass() const {
  if (const auto* t = std::get_if<Tabulated>(&rate_)) return std::exp(-t->cumulative.back());
  return 0.0;
}

std::string AgeDivisionRate::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Constant& c) { os << "constant(" << c.b << ")"; },
                 [&](const PowerLag& p) { os << "power_lag(beta=" << p.beta << ",lag=" << p.lag << ")"; },
                 [&](const Tabulated& t) { os << "tabulated(n=" << t.a.size() << ",a_max=" << t.a.back() << ")"; },
             },
             rate_);
  return os.str();
}

}  // namespace malthus
