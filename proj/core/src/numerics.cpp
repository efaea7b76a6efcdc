#include "malthus/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace malthus::numerics {

void Tolerance::validate() const {
  if (!(abs_tol > 0.0)) throw InputError("Tolerance: abs_tol must be > 0");
  if (!(rel_tol >= 0.0)) throw InputError("Tolerance: rel_tol must be >= 0");
  if (max_iter < 1) throw InputError("Tolerance: max_iter must be >= 1");
}

namespace {

template <unsigned N>
std::vector<QuadNode> mapped_rule(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::vector<QuadNode> nodes;
  nodes.reserve(N);
  // Boost stores the non-negative half of the symmetric rule.
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    nodes.push_back({mid - half * x[i], half * w[i]});
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back({mid + half * x[i], half * w[i]});
  }
  return nodes;
}

}  // namespace

std::vector<QuadNode> gauss_legendre(int n, double a, double b) {
  switch (n) {
    case 8:
      return mapped_rule<8>(a, b);
    case 16:
      return mapped_rule<16>(a, b);
    case 32:
      return mapped_rule<32>(a, b);
    case 64:
      return mapped_rule<64>(a, b);
    default:
      throw InputError("gauss_legendre: supported orders are 8, 16, 32, 64");
  }
}

}  // namespace malthus::numerics
