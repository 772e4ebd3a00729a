#include "pg/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pg {

namespace {

template <unsigned N>
QuadratureRule make_rule(double a, double b) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  std::vector<std::pair<double, double>> pts;
  for (size_t k = 0; k < x.size(); ++k) {
    pts.emplace_back(x[k], w[k]);
    if (x[k] != 0.0) pts.emplace_back(-x[k], w[k]);
  }
  std::sort(pts.begin(), pts.end());
  QuadratureRule r;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (auto [t, wt] : pts) {
    r.nodes.push_back(mid + half * t);
    r.weights.push_back(half * wt);
  }
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  switch (n) {
    case 2: return make_rule<2>(a, b);
    case 4: return make_rule<4>(a, b);
    case 6: return make_rule<6>(a, b);
    case 8: return make_rule<8>(a, b);
    case 10: return make_rule<10>(a, b);
    case 12: return make_rule<12>(a, b);
    case 16: return make_rule<16>(a, b);
    case 20: return make_rule<20>(a, b);
    case 24: return make_rule<24>(a, b);
    case 32: return make_rule<32>(a, b);
    case 40: return make_rule<40>(a, b);
    case 48: return make_rule<48>(a, b);
    case 64: return make_rule<64>(a, b);
    default: throw std::invalid_argument("gauss_legendre: unsupported point count " + std::to_string(n));
  }
}

std::vector<double> chebyshev_nodes(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("chebyshev_nodes: n must be positive");
  const double pi = boost::math::constants::pi<double>();
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) {
    const double c = -std::cos(pi * (2.0 * k + 1.0) / (2.0 * n));
    t[k] = 0.5 * (a + b) + 0.5 * (b - a) * c;
  }
  return t;
}

}  // namespace pg
