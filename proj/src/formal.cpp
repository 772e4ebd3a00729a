#include "pg/formal.hpp"

#include "pg/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pg {

TaylorFit taylor_coeffs_S(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x, int N,
                          const TaylorConfig& tc, const GenfunConfig& cfg) {
  if (N < 0 || N > 4) throw std::invalid_argument("taylor_coeffs_S: N must be in [0, 4]");
  if (!(tc.t_radius > 0.0)) throw std::invalid_argument("taylor_coeffs_S: t radius must be positive");
  const int n_nodes = 2 * N + 4;
  const int deg = N + 2;
  const std::vector<double> t = chebyshev_nodes(n_nodes, -tc.t_radius, tc.t_radius);
  std::vector<double> S(n_nodes);
  for_each_index(n_nodes, tc.policy, [&](int k) { S[k] = genfun_S(P.scaled(t[k]), {p1, p2, x}, cfg); });

  // Fit in u = t / t0 for conditioning, then rescale.
  Eigen::MatrixXd A(n_nodes, deg + 1);
  Eigen::VectorXd b(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const double u = t[k] / tc.t_radius;
    double pw = 1.0;
    for (int j = 0; j <= deg; ++j, pw *= u) A(k, j) = pw;
    b[k] = S[k];
  }
  const Eigen::VectorXd a = A.colPivHouseholderQr().solve(b);
  TaylorFit fit;
  fit.t_radius = tc.t_radius;
  fit.nodes = n_nodes;
  fit.residual = (A * a - b).cwiseAbs().maxCoeff();
  for (int j = 0; j <= deg; ++j) {
    const double c = a[j] / std::pow(tc.t_radius, j);
    (j <= N ? fit.coefficients : fit.diagnostics).push_back(c);
  }
  fit.reliable = fit.residual < tc.threshold;
  if (!fit.reliable) {
    std::ostringstream os;
    os << "taylor_coeffs_S: fit residual " << fit.residual << " above threshold " << tc.threshold;
    throw OutsideLocalDomain(os.str(), fit.residual);
  }
  return fit;
}

namespace {

Eigen::MatrixXd ad_matrix(const StructureConstants& c, const Vec& p) {
  const int d = c.dim;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) A(k, j) += c(i, j, k) * p[i];
  return A;
}

Vec bch_rhs(const StructureConstants& c, const Vec& k, const Vec& p1, int K) {
  const int d = c.dim;
  const Eigen::MatrixXd ad = ad_matrix(c, k);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(d, d);
  double fact = 1.0;
  for (int j = 1; j <= K; ++j) {
    pw = pw * ad;
    fact *= (j + 1);
    theta += pw / fact;
  }
  const auto lu = theta.fullPivLu();
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12)
    throw std::domain_error("bch_numeric: theta matrix singular, outside the convergence domain");
  return lu.solve(Eigen::VectorXd(p1)).eval();
}

}  // namespace

Vec bch_numeric(const StructureConstants& c, const Vec& p1, const Vec& p2, int K, int steps) {
  const int d = c.dim;
  if (p1.size() != d || p2.size() != d) throw std::invalid_argument("bch_numeric: dimension mismatch");
  if (K < 8) throw std::invalid_argument("bch_numeric: truncation K must be at least 8");
  if (steps < 8) throw std::invalid_argument("bch_numeric: steps must be at least 8");
  Vec k = p2;
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    const Vec k1 = bch_rhs(c, k, p1, K);
    const Vec k2 = bch_rhs(c, k + 0.5 * h * k1, p1, K);
    const Vec k3 = bch_rhs(c, k + 0.5 * h * k2, p1, K);
    const Vec k4 = bch_rhs(c, k + h * k3, p1, K);
    k += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return k;
}

LinearComparison compare_linear_case(const StructureConstants& c, const Vec& p1, const Vec& p2, const Vec& x,
                                     double t, const GenfunConfig& cfg) {
  const PoissonStructure P = make_linear(c, +1, "linear").scaled(t);
  LinearComparison out;
  out.S_numeric = genfun_S(P, {p1, p2, x}, cfg);
  out.S_bch = t == 0.0 ? (p1 + p2).dot(x) : bch_numeric(c, t * p1, t * p2).dot(x) / t;
  out.diff = std::abs(out.S_numeric - out.S_bch);
  return out;
}

}  // namespace pg
