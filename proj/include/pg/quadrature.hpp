#pragma once

#include <vector>

namespace pg {

struct QuadratureRule {
  std::vector<double> nodes;  // increasing, in (a, b)
  std::vector<double> weights;
};

// Gauss-Legendre rule on [a, b]. Supported n: 2, 4, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64.
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

// n Chebyshev points of the first kind on [a, b], increasing.
std::vector<double> chebyshev_nodes(int n, double a, double b);

}  // namespace pg
