#include "pg/psm.hpp"

#include "pg/flow.hpp"
#include "pg/quadrature.hpp"
#include "pg/realization.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pg {

ChebCurve::ChebCurve(const std::vector<Vec>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("ChebCurve: need at least two samples");
  const int d = static_cast<int>(values[0].size());
  const double pi = boost::math::constants::pi<double>();
  coef_.assign(n, Vec::Zero(d));
  // Sample k sits at cos(theta_j), j = n-1-k, theta_j = pi (j + 1/2) / n.
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const double theta = pi * ((n - 1 - k) + 0.5) / n;
      coef_[m] += values[k] * std::cos(m * theta);
    }
    coef_[m] *= (m == 0 ? 1.0 : 2.0) / n;
  }
  // d/dxi coefficients by the backward recurrence, then d/ds = 2 d/dxi.
  dcoef_.assign(n, Vec::Zero(d));
  Vec next = Vec::Zero(d), next2 = Vec::Zero(d);
  for (int m = n - 1; m >= 1; --m) {
    const Vec cur = next2 + 2.0 * m * coef_[m];
    dcoef_[m - 1] = cur;
    next2 = next;
    next = cur;
  }
  dcoef_[0] *= 0.5;
  for (Vec& c : dcoef_) c *= 2.0;
}

namespace {

Vec clenshaw(const std::vector<Vec>& c, double xi) {
  const int d = static_cast<int>(c[0].size());
  Vec b1 = Vec::Zero(d), b2 = Vec::Zero(d);
  for (int m = static_cast<int>(c.size()) - 1; m >= 1; --m) {
    const Vec b0 = 2.0 * xi * b1 - b2 + c[m];
    b2 = b1;
    b1 = b0;
  }
  return xi * b1 - b2 + c[0];
}

}  // namespace

Vec ChebCurve::operator()(double s) const {
  if (coef_.empty()) throw std::logic_error("ChebCurve: empty curve");
  return clenshaw(coef_, 2.0 * s - 1.0);
}

Vec ChebCurve::derivative(double s) const {
  if (dcoef_.empty()) throw std::logic_error("ChebCurve: empty curve");
  return clenshaw(dcoef_, 2.0 * s - 1.0);
}

namespace {

double dist(const PhasePoint& a, const PhasePoint& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff());
}

PhasePoint beta_flow(const PoissonStructure& P, const Vec& c, const PhasePoint& z0, double u,
                     const RealizationConfig& rc) {
  return ham_flow(beta_pullback(P, c, rc), z0, u, rc.ode);
}

Vec y_residual(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x, const Vec& y,
               const RealizationConfig& rc) {
  const PhasePoint z2 = beta_flow(P, p2, {y, zeros(P.dim())}, 1.0, rc);
  return beta_flow(P, p1, z2, 1.0, rc).x - x;
}

// Minimum-norm eta with pi(X) eta = -v.
struct LsqSlot {
  Vec eta;
  double residual = 0.0;
};

LsqSlot solve_eta(const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>& cod, const Mat& Pi, const Vec& v) {
  LsqSlot out;
  out.eta = cod.solve(Eigen::VectorXd(-v));
  out.residual = (Pi * out.eta + v).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

Triangle build_triangle(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x,
                        const TriangleConfig& cfg) {
  const int d = P.dim();
  if (p1.size() != d || p2.size() != d || x.size() != d)
    throw std::invalid_argument("build_triangle: dimension mismatch");
  if (cfg.samples < 4) throw std::invalid_argument("build_triangle: need at least 4 samples");
  const RealizationConfig& rc = cfg.genfun.real;

  Triangle T;
  T.generator = {p1, p2, x};
  T.sample_s = chebyshev_nodes(cfg.samples, 0.0, 1.0);
  const GenfunSolution gs = genfun_solve(P, T.generator, cfg.genfun);
  T.p3 = gs.d.dx;

  if (p1.isZero(0.0) && p2.isZero(0.0)) {
    T.y = x;
    T.sample_p.assign(cfg.samples, zeros(d));
    T.p_tilde = ChebCurve(T.sample_p);
    return T;
  }

  // The corner g(0,1) is (x, p3) and alpha is constant along beta-pullback
  // flows, so alpha(x, p3) is y up to discretization; Broyden polishes it.
  Vec y = alpha(P, x, T.p3, rc);
  Vec F = y_residual(P, p1, p2, x, y, rc);
  Mat J = Mat::Identity(d, d);
  const NewtonConfig& nc = cfg.genfun.outer;
  for (int it = 0; it < nc.max_iters && F.norm() > nc.tol; ++it) {
    const Vec step = -J.fullPivLu().solve(Eigen::VectorXd(F));
    const Vec y_new = y + step;
    const Vec F_new = y_residual(P, p1, p2, x, y_new, rc);
    if (F_new.norm() >= F.norm()) break;  // at the discretization floor
    J += (F_new - F - J * step) * step.transpose() / step.squaredNorm();
    y = y_new;
    F = F_new;
  }
  T.y = y;
  T.y_residual = F.cwiseAbs().maxCoeff();
  if (T.y_residual > 1e-8) {
    std::ostringstream os;
    os << "build_triangle: base point solve stalled at residual " << T.y_residual;
    throw OutsideLocalDomain(os.str(), T.y_residual);
  }

  const PhasePoint z2 = beta_flow(P, p2, {y, zeros(d)}, 1.0, rc);
  const std::vector<PhasePoint> pts = ham_flow_nodes(beta_pullback(P, p1, rc), z2, T.sample_s, rc.ode);
  for (const PhasePoint& z : pts) T.sample_p.push_back(z.p);
  T.p_tilde = ChebCurve(T.sample_p);
  return T;
}

PhasePoint triangle_point(const PoissonStructure& P, const Triangle& T, double t, double s,
                          const GenfunConfig& cfg) {
  if (t < 0.0 || s < 0.0 || t + s > 1.0 + 1e-14) throw std::invalid_argument("triangle_point: outside the simplex");
  const double tau = 1.0 - t;
  const PhasePoint base{T.y, zeros(P.dim())};
  if (tau <= 0.0) return base;
  const double sigma = std::clamp(s / tau, 0.0, 1.0);
  return beta_flow(P, T.p_tilde(sigma), base, tau, cfg.real);
}

BoundaryReport triangle_boundary_check(const PoissonStructure& P, const Triangle& T, const GenfunConfig& cfg,
                                       int samples) {
  if (samples < 2) throw std::invalid_argument("triangle_boundary_check: need at least 2 samples");
  const RealizationConfig& rc = cfg.real;
  const int d = P.dim();
  const PhasePoint base{T.y, zeros(d)};
  std::vector<double> u(samples);
  for (int k = 0; k < samples; ++k) u[k] = static_cast<double>(k) / (samples - 1);

  BoundaryReport r;
  r.identity = triangle_point(P, T, 1.0, 0.0, cfg).p.cwiseAbs().maxCoeff();

  // Edges t + s = 1 and s = 0 are single flows of the triangle's own covector.
  auto edge_vs = [&](const Vec& own, const Vec& ref) {
    const auto a = ham_flow_nodes(beta_pullback(P, own, rc), base, u, rc.ode);
    const auto b = ham_flow_nodes(beta_pullback(P, ref, rc), base, u, rc.ode);
    double m = 0.0;
    for (int k = 0; k < samples; ++k) m = std::max(m, dist(a[k], b[k]));
    return m;
  };
  r.edge2 = edge_vs(T.p_tilde(0.0), T.generator.p2);
  r.edge3 = edge_vs(T.p_tilde(1.0), T.p3);

  const PhasePoint z2 = beta_flow(P, T.generator.p2, base, 1.0, rc);
  const auto ref1 = ham_flow_nodes(beta_pullback(P, T.generator.p1, rc), z2, u, rc.ode);
  for (int k = 0; k < samples; ++k) r.edge1 = std::max(r.edge1, dist(triangle_point(P, T, 0.0, u[k], cfg), ref1[k]));

  r.corner = (triangle_point(P, T, 0.0, 1.0, cfg).x - T.generator.x).cwiseAbs().maxCoeff();
  r.max = std::max({r.identity, r.edge1, r.edge2, r.edge3, r.corner});
  return r;
}

void PsmField::write_csv(std::ostream& os) const {
  if (nodes.empty()) return;
  const int d = static_cast<int>(nodes[0].X.size());
  os << "t,s";
  for (int i = 0; i < d; ++i) os << ",X" << i;
  for (int i = 0; i < d; ++i) os << ",eta_t" << i;
  for (int i = 0; i < d; ++i) os << ",eta_s" << i;
  os << '\n';
  const auto old = os.precision(15);
  for (const PsmNode& n : nodes) {
    os << n.t << ',' << n.s;
    for (int i = 0; i < d; ++i) os << ',' << n.X[i];
    for (int i = 0; i < d; ++i) os << ',' << n.eta_t[i];
    for (int i = 0; i < d; ++i) os << ',' << n.eta_s[i];
    os << '\n';
  }
  os.precision(old);
}

PsmField triangle_field(const PoissonStructure& P, const Triangle& T, int grid_n, const GenfunConfig& cfg,
                        ExecPolicy policy) {
  if (grid_n < 16) throw std::invalid_argument("triangle_field: grid_n must be at least 16");
  PsmField F;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; i + j < grid_n; ++j) F.nodes.push_back({(i + 0.5) / grid_n, (j + 0.5) / grid_n, {}, {}, {}});
  std::vector<double> res(F.nodes.size(), 0.0);
  for_each_index(static_cast<int>(F.nodes.size()), policy, [&](int k) {
    PsmNode& n = F.nodes[k];
    const double tau = 1.0 - n.t;
    const double sigma = std::min(n.s / tau, 1.0);
    const Vec p = T.p_tilde(sigma);
    const SprayJet jet = spray_jet(P, p, T.y, tau, true, cfg.real.ode);
    n.X = jet.end;
    const Mat Pi = P.pi(n.X);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod{Eigen::MatrixXd(Pi)};
    const LsqSlot a = solve_eta(cod, Pi, Pi * p);                              // d/dtau
    const LsqSlot b = solve_eta(cod, Pi, jet.end_dp * T.p_tilde.derivative(sigma));  // d/dsigma
    // d/ds = (1/tau) d/dsigma, d/dt = -d/dtau + (sigma/tau) d/dsigma.
    n.eta_s = b.eta / tau;
    n.eta_t = -a.eta + sigma * n.eta_s;
    res[k] = std::max(a.residual, b.residual);
  });
  F.lsq_residual = *std::max_element(res.begin(), res.end());
  if (F.lsq_residual > 1e-4) {
    std::ostringstream os;
    os << "triangle_field: not a solution, least-squares misfit " << F.lsq_residual;
    throw OutsideLocalDomain(os.str(), F.lsq_residual);
  }
  return F;
}

namespace {

struct EdgeIntegrals {
  Vec e1, e2, e3;
};

EdgeIntegrals edge_integrals(const PoissonStructure& P, const Triangle& T, const GenfunConfig& cfg) {
  const OdeConfig& ode = cfg.real.ode;
  EdgeIntegrals E;
  E.e2 = spray_flow_average(P, T.generator.p2, T.y, ode);
  E.e3 = spray_flow_average(P, T.p3, T.y, ode);
  E.e1 = T.y;
  if (std::all_of(T.sample_p.begin(), T.sample_p.end(), [](const Vec& v) { return v.isZero(0.0); })) return E;
  const QuadratureRule q = gauss_legendre(32);
  E.e1 = zeros(P.dim());
  for (size_t k = 0; k < q.nodes.size(); ++k)
    E.e1 += q.weights[k] * spray_flow(P, T.p_tilde(q.nodes[k]), T.y, 1.0, ode);
  return E;
}

}  // namespace

PsmActionReport psm_action_report(const PoissonStructure& P, const Triangle& T, int grid_n,
                                  const GenfunConfig& cfg, ExecPolicy policy) {
  const QuadratureRule q = gauss_legendre(grid_n);
  const int n = grid_n;
  std::vector<double> bulk(n, 0.0), bulk_pi(n, 0.0), res(n, 0.0);
  // Coordinates tau = 1 - t, sigma = s / tau: dt ^ ds = -tau dtau ^ dsigma,
  // so the oriented simplex integral is minus the square integral of B(d/dtau, d/dsigma).
  for_each_index(n, policy, [&](int j) {
    const double sigma = q.nodes[j];
    const Vec p = T.p_tilde(sigma);
    const Vec dp = T.p_tilde.derivative(sigma);
    const std::vector<SprayJet> jets = spray_jet_nodes(P, p, T.y, q.nodes, true, cfg.real.ode);
    for (int i = 0; i < n; ++i) {
      const Vec& X = jets[i].end;
      const Mat Pi = P.pi(X);
      const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod{Eigen::MatrixXd(Pi)};
      const Vec Xu = Pi * p;
      const Vec Xv = jets[i].end_dp * dp;
      const LsqSlot a = solve_eta(cod, Pi, Xu);
      const LsqSlot b = solve_eta(cod, Pi, Xv);
      const double piab = a.eta.dot(Pi * b.eta);
      const double w = q.weights[i] * q.weights[j];
      bulk[j] += w * (a.eta.dot(Xv) - b.eta.dot(Xu) + piab);
      bulk_pi[j] += w * (-piab);
      res[j] = std::max({res[j], a.residual, b.residual});
    }
  });
  PsmActionReport r;
  for (int j = 0; j < n; ++j) {
    r.bulk -= bulk[j];
    r.bulk_pi_form -= bulk_pi[j];
    r.lsq_residual = std::max(r.lsq_residual, res[j]);
  }
  const EdgeIntegrals E = edge_integrals(P, T, cfg);
  const GenfunPoint& g = T.generator;
  r.boundary = g.p1.dot(E.e1) + g.p2.dot(E.e2) - T.p3.dot(E.e3 - g.x);
  r.action = r.bulk + r.boundary;
  return r;
}

double psm_action(const PoissonStructure& P, const Triangle& T, int grid_n, const GenfunConfig& cfg) {
  return psm_action_report(P, T, grid_n, cfg).action;
}

EdgeElements edge_elements(const PoissonStructure& P, const Triangle& T, const GenfunConfig& cfg) {
  const EdgeIntegrals E = edge_integrals(P, T, cfg);
  return {{E.e1, T.generator.p1}, {E.e2, T.generator.p2}, {E.e3, T.p3}};
}

}  // namespace pg
