#include "tdscat/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <stdexcept>

namespace tdscat {
namespace {

// Boost stores only the non-negative half of each symmetric rule.
template <unsigned N>
void append_rule(double a, double b, QuadratureRule& out) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const bool odd = (N % 2) == 1;
  // Ascending order: negative half reversed, then (centre), then positive half.
  for (std::size_t j = abscissa.size(); j-- > (odd ? 1u : 0u);) {
    out.x.push_back(mid - half * abscissa[j]);
    out.w.push_back(half * weights[j]);
  }
  for (std::size_t j = 0; j < abscissa.size(); ++j) {
    if (odd && j == 0) {
      out.x.push_back(mid);
      out.w.push_back(half * weights[0]);
      continue;
    }
    out.x.push_back(mid + half * abscissa[j]);
    out.w.push_back(half * weights[j]);
  }
}

void append(double a, double b, int nodes, QuadratureRule& out) {
  switch (nodes) {
    case 8: append_rule<8>(a, b, out); break;
    case 15: append_rule<15>(a, b, out); break;
    case 16: append_rule<16>(a, b, out); break;
    case 17: append_rule<17>(a, b, out); break;
    case 32: append_rule<32>(a, b, out); break;
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
  }
}

}  // namespace

QuadratureRule gauss_legendre(double a, double b, int nodes) {
  QuadratureRule r;
  append(a, b, nodes, r);
  return r;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int nodes) {
  if (panels < 1) throw std::invalid_argument("panel count must be positive");
  QuadratureRule r;
  r.x.reserve(static_cast<std::size_t>(panels * nodes));
  r.w.reserve(static_cast<std::size_t>(panels * nodes));
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    append(lo, hi, nodes, r);
  }
  return r;
}

}  // namespace tdscat
