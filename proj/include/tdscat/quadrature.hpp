#pragma once

#include <vector>

namespace tdscat {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre rule mapped to [a, b]. Supported orders: 8, 15, 16, 17, 32.
QuadratureRule gauss_legendre(double a, double b, int nodes);

/// Composite rule: `panels` equal panels of `nodes` points on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int nodes = 16);

}  // namespace tdscat
