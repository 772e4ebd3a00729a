#include "pg/realization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

void check_radius(const Vec& p, const RealizationConfig& cfg) {
  if (cfg.germ_radius > 0.0 && p.norm() > cfg.germ_radius) {
    std::ostringstream os;
    os << "covector norm " << p.norm() << " exceeds the germ radius " << cfg.germ_radius;
    throw OutsideLocalDomain(os.str(), p.norm());
  }
}

// x - V/2 + (V.grad V)/12 with V = pi(x) p: inverts the average to second order.
Vec predictor(const PoissonStructure& P, const Vec& x, const Vec& p) {
  const int d = P.dim();
  double pi[kMaxDim * kMaxDim], dpi[kMaxDim * kMaxDim * kMaxDim];
  P.eval_raw(x.data(), pi, dpi);
  Vec V = Vec::Zero(d), W = Vec::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) V[i] += pi[i * d + j] * p[j];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) W[i] += dpi[(i * d + j) * d + k] * p[j] * V[k];
  return x - 0.5 * V + W / 12.0;
}

RealizationConfig relaxed(const RealizationConfig& cfg) {
  RealizationConfig r = cfg;
  r.germ_radius *= 2.0;
  return r;
}

}  // namespace

AlphaJet alpha_jet(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg,
                   bool with_dp) {
  const int d = P.dim();
  if (x.size() != d || p.size() != d) throw std::invalid_argument("alpha: dimension mismatch");
  if (!(cfg.newton.tol > 0.0)) throw std::invalid_argument("alpha: newton tol must be positive");
  check_radius(p, cfg);

  AlphaJet out;
  // Unit section: alpha(x, 0) = x exactly; the averaged flow only reproduces it to rounding.
  const bool unit = p.isZero(0.0);
  Vec y = unit ? x : predictor(P, x, p);
  SprayJet jet = spray_jet(P, p, y, 1.0, false, cfg.ode);
  Vec r = jet.avg - x;
  double rn = r.norm();
  int it = 0;
  while (!unit && rn >= cfg.newton.tol) {
    if (it >= cfg.newton.max_iters) {
      std::ostringstream os;
      os << "alpha: Newton did not converge, residual " << rn;
      throw OutsideLocalDomain(os.str(), rn);
    }
    ++it;
    const Vec step = -jet.avg_dy.partialPivLu().solve(r);
    double lambda = cfg.newton.damping;
    for (int h = 0;; ++h) {
      const Vec yt = y + lambda * step;
      SprayJet jt = spray_jet(P, p, yt, 1.0, false, cfg.ode);
      const Vec rt = jt.avg - x;
      if (rt.norm() < rn || h >= 30) {
        y = yt;
        jet = std::move(jt);
        r = rt;
        rn = r.norm();
        break;
      }
      lambda *= 0.5;
    }
  }
  if (with_dp && it == 0 && (rn == 0.0 || unit)) {
    jet = spray_jet(P, p, y, 1.0, true, cfg.ode);
  } else if (with_dp) {
    // Polish with the final Jacobian, then one more jet carrying d/dp.
    if (rn > 0.0) y -= jet.avg_dy.partialPivLu().solve(r);
    jet = spray_jet(P, p, y, 1.0, true, cfg.ode);
    r = jet.avg - x;
    rn = r.norm();
  } else if (rn > 0.0 && !unit) {
    y -= jet.avg_dy.partialPivLu().solve(r);
  }
  const auto lu = jet.avg_dy.partialPivLu();
  out.value = y;
  out.dx = lu.inverse();
  if (with_dp) out.dp = -lu.solve(jet.avg_dp);
  out.iterations = it;
  out.residual = rn;
  return out;
}

Vec alpha(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg) {
  return alpha_jet(P, x, p, cfg, false).value;
}

Vec beta(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg) {
  return alpha(P, x, -p, cfg);
}

double realization_poisson_residual(const PoissonStructure& P, const Vec& x, const Vec& p, const Vec& f,
                                    const Vec& g, const RealizationConfig& cfg) {
  const int d = P.dim();
  RealizationConfig inner = relaxed(cfg);
  check_radius(p, cfg);
  const double h = 1e-3 * (1.0 + std::sqrt(x.squaredNorm() + p.squaredNorm()));
  // Columns: d alpha / d x_k and d alpha / d p_k.
  Mat Ax(d, d), Ap(d, d);
  auto stencil = [&](const Vec& xa, const Vec& pa) { return alpha(P, xa, pa, inner); };
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e[k] = h;
    Ax.col(k) = (-stencil(x + 2 * e, p) + 8 * stencil(x + e, p) - 8 * stencil(x - e, p) + stencil(x - 2 * e, p)) /
                (12 * h);
    Ap.col(k) = (-stencil(x, p + 2 * e) + 8 * stencil(x, p + e) - 8 * stencil(x, p - e) + stencil(x, p - 2 * e)) /
                (12 * h);
  }
  const Vec fx = Ax.transpose() * f, fp = Ap.transpose() * f;
  const Vec gx = Ax.transpose() * g, gp = Ap.transpose() * g;
  const double bracket = fx.dot(gp) - fp.dot(gx);
  const Mat pi = P.pi(alpha(P, x, p, cfg));
  return std::abs(bracket - f.dot(pi * g));
}

Hamiltonian alpha_pullback(const PoissonStructure& P, const Vec& c, const RealizationConfig& cfg) {
  const RealizationConfig inner = relaxed(cfg);
  return [P, c, inner](const Vec& x, const Vec& p) {
    const AlphaJet j = alpha_jet(P, x, p, inner, true);
    return HamGrad{c.dot(j.value), j.dx.transpose() * c, j.dp.transpose() * c};
  };
}

Hamiltonian beta_pullback(const PoissonStructure& P, const Vec& c, const RealizationConfig& cfg) {
  const RealizationConfig inner = relaxed(cfg);
  return [P, c, inner](const Vec& x, const Vec& p) {
    const AlphaJet j = alpha_jet(P, x, -p, inner, true);
    return HamGrad{c.dot(j.value), j.dx.transpose() * c, -(j.dp.transpose() * c)};
  };
}

Hamiltonian darboux_hamiltonian(const PoissonStructure& P, const Vec& p1, const Vec& p2,
                                const RealizationConfig& cfg) {
  const RealizationConfig inner = relaxed(cfg);
  return [P, p1, p2, inner](const Vec& x, const Vec& p) {
    const AlphaJet b = alpha_jet(P, x, -p, inner, true);
    const AlphaJet a = alpha_jet(P, x, p, inner, true);
    HamGrad g;
    g.value = p1.dot(b.value) + p2.dot(a.value);
    g.dx = b.dx.transpose() * p1 + a.dx.transpose() * p2;
    g.dp = -(b.dp.transpose() * p1) + a.dp.transpose() * p2;
    return g;
  };
}

Hamiltonian darboux_hamiltonian_fd(const PoissonStructure& P, const Vec& p1, const Vec& p2,
                                   const RealizationConfig& cfg) {
  const RealizationConfig inner = relaxed(cfg);
  return fd_hamiltonian([P, p1, p2, inner](const Vec& x, const Vec& p) {
    return p1.dot(alpha(P, x, -p, inner)) + p2.dot(alpha(P, x, p, inner));
  });
}

}  // namespace pg
