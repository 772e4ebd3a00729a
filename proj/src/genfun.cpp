#include "pg/genfun.hpp"

#include "pg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

void check_point(const PoissonStructure& P, const GenfunPoint& g) {
  const int d = P.dim();
  if (g.p1.size() != d || g.p2.size() != d || g.x.size() != d)
    throw std::invalid_argument("genfun: dimension mismatch");
}

void check_radius(const Vec& p, double radius, const char* name) {
  if (radius > 0.0 && p.norm() > radius) {
    std::ostringstream os;
    os << name << " norm " << p.norm() << " exceeds the germ radius " << radius;
    throw OutsideLocalDomain(os.str(), p.norm());
  }
}

double euler_integrand(const Vec&, const Vec& p, const HamGrad& g) { return euler_derivative(p, g); }

// d/dx0 of x0 + pi(x0) q / 2: the constant-coefficient part of the flow map.
Mat predictor_jacobian(const PoissonStructure& P, const Vec& x, const Vec& q) {
  const int d = P.dim();
  const PiDerivative D = P.dpi(x);
  Mat J = Mat::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += D(i, j, k) * q[j];
      J(i, k) += 0.5 * s;
    }
  return J;
}

template <class F>
double diff4(F&& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

}  // namespace

GenfunSolution genfun_solve(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg,
                            const std::optional<Vec>& x0_guess) {
  check_point(P, g);
  check_radius(g.p1, cfg.real.germ_radius, "p1");
  check_radius(g.p2, cfg.real.germ_radius, "p2");
  const int d = P.dim();
  GenfunSolution s;
  if (g.p1.isZero(0.0) && g.p2.isZero(0.0)) {
    s.x0 = g.x;
    s.end = {g.x, zeros(d)};
    s.d = {g.x, g.x, zeros(d)};
    return s;
  }

  const Hamiltonian H = darboux_hamiltonian(P, g.p1, g.p2, cfg.real);
  const PhaseIntegrand LE = euler_integrand;
  auto eval = [&](const Vec& x0) { return ham_flow_with_integral(H, LE, {x0, zeros(d)}, 1.0, cfg.real.ode); };

  const Vec q = g.p1 - g.p2;
  Vec x0 = x0_guess ? *x0_guess : Vec(g.x - 0.5 * P.pi(g.x) * q);
  Mat J = predictor_jacobian(P, g.x, q);
  auto cur = eval(x0);
  Vec F = cur.first.x - g.x;
  double fn = F.norm();

  auto fd_jacobian = [&](const Vec& at, const Vec& Fat) {
    Mat Jf(d, d);
    const double h = cfg.outer.jacobian_step * (1.0 + at.norm());
    for (int k = 0; k < d; ++k) {
      Vec xs = at;
      xs[k] += h;
      Jf.col(k) = (eval(xs).first.x - g.x - Fat) / h;
    }
    return Jf;
  };

  int it = 0;
  while (fn >= cfg.outer.tol) {
    if (it >= cfg.outer.max_iters) {
      std::ostringstream os;
      os << "genfun: solve for x0 did not converge, residual " << fn;
      throw OutsideLocalDomain(os.str(), fn);
    }
    ++it;
    Vec step = -J.partialPivLu().solve(F);
    auto next = eval(x0 + step);
    Vec Fn = next.first.x - g.x;
    if (Fn.norm() >= fn) {
      J = fd_jacobian(x0, F);
      step = -J.partialPivLu().solve(F);
      double lambda = cfg.outer.damping;
      for (int h = 0; h < 30; ++h) {
        next = eval(x0 + lambda * step);
        Fn = next.first.x - g.x;
        if (Fn.norm() < fn) break;
        lambda *= 0.5;
      }
      step *= lambda;
    }
    const Vec dF = Fn - F;
    J += ((dF - J * step) * step.transpose()) / step.squaredNorm();
    x0 += step;
    cur = std::move(next);
    F = Fn;
    fn = F.norm();
  }

  s.x0 = x0;
  s.end = cur.first;
  s.S = (g.p1 + g.p2).dot(x0) - cur.second;
  s.iterations = it;
  s.residual = fn;
  s.d.dp1 = spray_flow_average(P, g.p1, x0, cfg.real.ode);
  s.d.dp2 = spray_flow_average(P, -g.p2, x0, cfg.real.ode);
  s.d.dx = s.end.p;
  return s;
}

double genfun_S(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg) {
  return genfun_solve(P, g, cfg).S;
}

Route2Result genfun_S_route2(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x1,
                             const GenfunConfig& cfg) {
  check_point(P, {p1, p2, x1});
  check_radius(p1, cfg.real.germ_radius, "p1");
  check_radius(p2, cfg.real.germ_radius, "p2");
  const int d = P.dim();
  const Hamiltonian H2 = alpha_pullback(P, p2, cfg.real);
  const PhaseIntegrand LE = euler_integrand;
  const Vec a = alpha(P, x1, p1, cfg.real);
  const auto [z2, I2] = ham_flow_with_integral(H2, LE, {a, zeros(d)}, 1.0, cfg.real.ode);
  const auto [z3, I3] = ham_flow_with_integral(H2, LE, {x1, p1}, 1.0, cfg.real.ode);
  Route2Result r;
  r.point = {p1, z2.p, z3.x};
  r.value = p1.dot(x1) + z2.p.dot(z2.x) + I2 - I3;
  return r;
}

SDerivatives dS(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg) {
  return genfun_solve(P, g, cfg).d;
}

SDerivatives dS_fd(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg) {
  check_point(P, g);
  const int d = P.dim();
  SDerivatives out{zeros(d), zeros(d), zeros(d)};
  auto slot = [&](int which, Vec& target) {
    const Vec& base = which == 0 ? g.p1 : which == 1 ? g.p2 : g.x;
    const double h = cfg.fd_step * (1.0 + base.norm());
    for (int k = 0; k < d; ++k) {
      target[k] = diff4(
          [&](double e) {
            GenfunPoint q = g;
            Vec& v = which == 0 ? q.p1 : which == 1 ? q.p2 : q.x;
            v[k] += e;
            return genfun_S(P, q, cfg);
          },
          h);
    }
  };
  slot(0, out.dp1);
  slot(1, out.dp2);
  slot(2, out.dx);
  return out;
}

Mat pi_from_S(const PoissonStructure& P, const Vec& x, const GenfunConfig& cfg, double h) {
  const int d = P.dim();
  Mat out = Mat::Zero(d, d);
  auto S = [&](int i, double a, int j, double b) {
    GenfunPoint g{zeros(d), zeros(d), x};
    g.p1[i] = a;
    g.p2[j] = b;
    return genfun_S(P, g, cfg);
  };
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double m = (S(i, h, j, h) - S(i, h, j, -h) - S(i, -h, j, h) + S(i, -h, j, -h)) / (4 * h * h);
      out(i, j) = 2 * m;
      out(j, i) = -2 * m;
    }
  return out;
}

MultiplyReport multiply_report(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2,
                               const GenfunConfig& cfg, double composable_tol) {
  const int d = P.dim();
  if (z1.x.size() != d || z1.p.size() != d || z2.x.size() != d || z2.p.size() != d)
    throw std::invalid_argument("multiply: dimension mismatch");
  check_radius(z1.p, cfg.real.germ_radius, "r z1");
  check_radius(z2.p, cfg.real.germ_radius, "r z2");
  const Vec a1 = alpha(P, z1.x, z1.p, cfg.real);
  const Vec b2 = beta(P, z2.x, z2.p, cfg.real);
  MultiplyReport rep;
  rep.composability = (a1 - b2).norm();
  if (!(rep.composability < composable_tol)) {
    std::ostringstream os;
    os << "multiply: elements not composable, |alpha(z1) - beta(z2)| = " << rep.composability;
    throw OutsideLocalDomain(os.str(), rep.composability);
  }
  // With x0 = alpha(z1) the p1-slot condition holds by construction; the
  // product is the endpoint of the Hamiltonian flow.
  const Hamiltonian H = darboux_hamiltonian(P, z1.p, z2.p, cfg.real);
  rep.product = ham_flow(H, {a1, zeros(d)}, 1.0, cfg.real.ode);
  rep.p2_slot_residual = (spray_flow_average(P, -z2.p, a1, cfg.real.ode) - z2.x).norm();
  return rep;
}

PhasePoint multiply(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2,
                    const GenfunConfig& cfg) {
  return multiply_report(P, z1, z2, cfg).product;
}

SgaSolveReport sga_residual(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& p3, const Vec& x,
                            const GenfunConfig& cfg, int max_iters, double tol) {
  const double half = 0.5 * cfg.real.germ_radius;
  check_radius(p1, half, "p1");
  check_radius(p2, half, "p2");
  check_radius(p3, half, "p3");
  SgaSolveReport rep;
  rep.xbar = x;
  rep.pbar = p1 + p2;
  rep.xtilde = x;
  rep.ptilde = p2 + p3;
  std::optional<Vec> wa, wb, wc, wd;  // warm starts for the four x0 solves
  GenfunSolution sa, sb, sc, sd;
  double lhs_pbar = 0.0, rhs_ptilde = 0.0;
  for (int it = 1;; ++it) {
    sa = genfun_solve(P, {rep.pbar, p3, x}, cfg, wa);
    const Vec xbar = sa.d.dp1;
    sb = genfun_solve(P, {p1, p2, xbar}, cfg, wb);
    const Vec pbar = sb.d.dx;
    sc = genfun_solve(P, {p1, rep.ptilde, x}, cfg, wc);
    const Vec xtilde = sc.d.dp2;
    sd = genfun_solve(P, {p2, p3, xtilde}, cfg, wd);
    const Vec ptilde = sd.d.dx;
    wa = sa.x0;
    wb = sb.x0;
    wc = sc.x0;
    wd = sd.x0;
    const double change = std::max({(xbar - rep.xbar).norm(), (pbar - rep.pbar).norm(),
                                    (xtilde - rep.xtilde).norm(), (ptilde - rep.ptilde).norm()});
    // Both sides are stationary in (xbar, pbar) and (xtilde, ptilde), so the
    // pairing below (new x, covector used for this sweep) is accurate to
    // second order in the last change.
    lhs_pbar = rep.pbar.dot(xbar);
    rhs_ptilde = rep.ptilde.dot(xtilde);
    rep.xbar = xbar;
    rep.pbar = pbar;
    rep.xtilde = xtilde;
    rep.ptilde = ptilde;
    rep.iterations = it;
    if (change < tol) break;
    if (it >= max_iters) {
      std::ostringstream os;
      os << "sga: fixed point did not converge, last change " << change;
      throw OutsideLocalDomain(os.str(), change);
    }
  }
  rep.lhs = sb.S + sa.S - lhs_pbar;
  rep.rhs = sc.S + sd.S - rhs_ptilde;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

double euler_defect(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg) {
  const GenfunSolution s = genfun_solve(P, g, cfg);
  return g.p1.dot(s.d.dp1) + g.p2.dot(s.d.dp2) - s.S;
}

double euler_defect_fd(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg) {
  const double S0 = genfun_S(P, g, cfg);
  const double h = cfg.fd_step * 10.0;
  const double LS = diff4(
      [&](double e) {
        GenfunPoint q{(1.0 + e) * g.p1, (1.0 + e) * g.p2, g.x};
        return genfun_S(P, q, cfg);
      },
      h);
  return LS - S0;
}

double cocycle_C(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2, const GenfunConfig& cfg) {
  const PhasePoint m = multiply(P, z1, z2, cfg);
  return euler_defect(P, {z1.p, z2.p, m.x}, cfg);
}

CocycleIntegralReport cocycle_integral(const PoissonStructure& P, const GenfunPoint& g, double t,
                                       const GenfunConfig& cfg, int gauss_points) {
  CocycleIntegralReport rep;
  rep.direct = genfun_S(P.scaled(t), g, cfg);
  rep.integral = (g.p1 + g.p2).dot(g.x);
  if (t != 0.0) {
    const QuadratureRule q = gauss_legendre(gauss_points, 0.0, t);
    for (size_t k = 0; k < q.nodes.size(); ++k) {
      const double s = q.nodes[k];
      rep.integral += q.weights[k] * euler_defect(P.scaled(s), g, cfg) / s;
    }
  }
  rep.diff = std::abs(rep.direct - rep.integral);
  return rep;
}

}  // namespace pg
