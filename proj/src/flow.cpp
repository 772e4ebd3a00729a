#include "pg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

constexpr int kSprayCap = 2 * kMaxDim + 4 * kMaxDim * kMaxDim;
constexpr int kHamCap = 2 * kMaxDim + 1;

template <int Cap>
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, Cap, 1>;

template <class S, class Rhs, class Check>
S rk4_run(Rhs& f, S y, double t0, double t1, int steps, Check& check) {
  const double h = (t1 - t0) / steps;
  const auto n = y.size();
  S k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    f(y, k1);
    tmp = y + (0.5 * h) * k1;
    f(tmp, k2);
    tmp = y + (0.5 * h) * k2;
    f(tmp, k3);
    tmp = y + h * k3;
    f(tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(y, t0 + (s + 1) * h);
  }
  return y;
}

template <class S, class Rhs, class Check>
S integrate(Rhs& f, const S& y0, double t0, double t1, int steps, const OdeConfig& cfg, FlowStats* st,
            Check& check) {
  if (t1 == t0) return y0;
  if (cfg.method == OdeMethod::rk4) return rk4_run(f, y0, t0, t1, steps, check);
  S coarse = rk4_run(f, y0, t0, t1, steps, check);
  S fine = rk4_run(f, y0, t0, t1, 2 * steps, check);
  S diff = fine - coarse;
  const double err = diff.cwiseAbs().maxCoeff() / 15.0;
  if (st) {
    st->error_estimate = std::max(st->error_estimate, err);
    st->within_tol = st->within_tol && err <= cfg.tol;
  }
  return fine + diff / 15.0;
}

void check_config(const OdeConfig& cfg) {
  if (cfg.steps < 8) throw std::invalid_argument("ode config: steps must be at least 8");
  if (!(cfg.box > 0.0)) throw std::invalid_argument("ode config: box must be positive");
}

int segment_steps(const OdeConfig& cfg, double length) {
  return std::max(1, static_cast<int>(std::ceil(cfg.steps * std::abs(length) - 1e-9)));
}

[[noreturn]] void domain_exit(const char* what, double t) {
  std::ostringstream os;
  os << what << " left the domain box at time " << t;
  throw DomainError(os.str(), t);
}

// Spray vector field with optional variational blocks.
// Layout: x | avg | Y | Yavg | Q | Qavg (matrices row-major, d x d).
struct SprayRhs {
  const PoissonStructure& P;
  const Vec& p;
  int d;
  int level;  // 0: x, avg; 1: + d/dy; 2: + d/dp

  int size() const { return 2 * d + (level >= 1 ? 2 * d * d : 0) + (level >= 2 ? 2 * d * d : 0); }

  void operator()(const State<kSprayCap>& y, State<kSprayCap>& dy) const {
    double pi[kMaxDim * kMaxDim];
    double dpi[kMaxDim * kMaxDim * kMaxDim];
    P.eval_raw(y.data(), pi, level >= 1 ? dpi : nullptr);
    for (int i = 0; i < d; ++i) {
      double v = 0.0;
      for (int j = 0; j < d; ++j) v += pi[i * d + j] * p[j];
      dy[i] = v;
      dy[d + i] = y[i];
    }
    if (level < 1) return;
    double K[kMaxDim * kMaxDim];
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += dpi[(i * d + j) * d + k] * p[j];
        K[i * d + k] = s;
      }
    const int dd = d * d;
    const int oY = 2 * d, oYa = oY + dd, oQ = oYa + dd, oQa = oQ + dd;
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += K[i * d + k] * y[oY + k * d + m];
        dy[oY + i * d + m] = s;
        dy[oYa + i * d + m] = y[oY + i * d + m];
      }
    if (level < 2) return;
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m) {
        double s = pi[i * d + m];
        for (int k = 0; k < d; ++k) s += K[i * d + k] * y[oQ + k * d + m];
        dy[oQ + i * d + m] = s;
        dy[oQa + i * d + m] = y[oQ + i * d + m];
      }
  }
};

struct SprayCheck {
  int d;
  double box;
  void operator()(const State<kSprayCap>& y, double t) const {
    for (int i = 0; i < d; ++i)
      if (!(std::abs(y[i]) <= box)) domain_exit("spray flow", t);
  }
};

State<kSprayCap> spray_initial(const SprayRhs& rhs, const Vec& y) {
  const int d = rhs.d;
  State<kSprayCap> s = State<kSprayCap>::Zero(rhs.size());
  s.head(d) = y;
  if (rhs.level >= 1)
    for (int i = 0; i < d; ++i) s[2 * d + i * d + i] = 1.0;
  return s;
}

SprayJet unpack_jet(const State<kSprayCap>& s, int d, int level, double u_avg_scale) {
  SprayJet j;
  j.end = s.head(d);
  j.avg = s.segment(d, d) * u_avg_scale;
  const int dd = d * d;
  auto mat = [&](int off) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) m(i, k) = s[off + i * d + k];
    return m;
  };
  if (level >= 1) {
    j.end_dy = mat(2 * d);
    j.avg_dy = mat(2 * d + dd) * u_avg_scale;
  }
  if (level >= 2) {
    j.end_dp = mat(2 * d + 2 * dd);
    j.avg_dp = mat(2 * d + 3 * dd) * u_avg_scale;
  }
  return j;
}

void check_dims(const PoissonStructure& P, const Vec& a, const Vec& b) {
  if (a.size() != P.dim() || b.size() != P.dim())
    throw std::invalid_argument("flow: vector dimension does not match the Poisson structure");
}

}  // namespace

Vec spray_flow(const PoissonStructure& P, const Vec& p, const Vec& x0, double u, const OdeConfig& cfg,
               FlowStats* stats) {
  check_config(cfg);
  check_dims(P, p, x0);
  SprayRhs rhs{P, p, P.dim(), 0};
  SprayCheck chk{P.dim(), cfg.box};
  auto s = integrate(rhs, spray_initial(rhs, x0), 0.0, u, cfg.steps, cfg, stats, chk);
  return s.head(P.dim());
}

Vec spray_flow_average(const PoissonStructure& P, const Vec& p, const Vec& y, const OdeConfig& cfg,
                       FlowStats* stats) {
  check_config(cfg);
  check_dims(P, p, y);
  if (p.isZero(0.0)) return y;  // stationary flow
  SprayRhs rhs{P, p, P.dim(), 0};
  SprayCheck chk{P.dim(), cfg.box};
  auto s = integrate(rhs, spray_initial(rhs, y), 0.0, 1.0, cfg.steps, cfg, stats, chk);
  return s.segment(P.dim(), P.dim());
}

SprayJet spray_jet(const PoissonStructure& P, const Vec& p, const Vec& y, double u, bool with_dp,
                   const OdeConfig& cfg, FlowStats* stats) {
  check_config(cfg);
  check_dims(P, p, y);
  SprayRhs rhs{P, p, P.dim(), with_dp ? 2 : 1};
  SprayCheck chk{P.dim(), cfg.box};
  auto s = integrate(rhs, spray_initial(rhs, y), 0.0, u, segment_steps(cfg, u), cfg, stats, chk);
  return unpack_jet(s, P.dim(), rhs.level, 1.0);
}

std::vector<SprayJet> spray_jet_nodes(const PoissonStructure& P, const Vec& p, const Vec& y,
                                      const std::vector<double>& nodes, bool with_dp, const OdeConfig& cfg) {
  check_config(cfg);
  check_dims(P, p, y);
  SprayRhs rhs{P, p, P.dim(), with_dp ? 2 : 1};
  SprayCheck chk{P.dim(), cfg.box};
  std::vector<SprayJet> out;
  out.reserve(nodes.size());
  auto s = spray_initial(rhs, y);
  double t = 0.0;
  for (double tn : nodes) {
    if (tn < t) throw std::invalid_argument("spray_jet_nodes: nodes must be nondecreasing from 0");
    s = integrate(rhs, s, t, tn, segment_steps(cfg, tn - t), cfg, nullptr, chk);
    t = tn;
    out.push_back(unpack_jet(s, P.dim(), rhs.level, 1.0));
  }
  return out;
}

namespace {

struct HamRhs {
  const Hamiltonian& H;
  const PhaseIntegrand* F;
  int d;

  void operator()(const State<kHamCap>& y, State<kHamCap>& dy) const {
    const Vec x = y.head(d);
    const Vec p = y.segment(d, d);
    const HamGrad g = H(x, p);
    dy.head(d) = -g.dp;
    dy.segment(d, d) = g.dx;
    dy[2 * d] = F ? (*F)(x, p, g) : 0.0;
  }
};

struct HamCheck {
  int d;
  double box;
  void operator()(const State<kHamCap>& y, double t) const {
    for (int i = 0; i < 2 * d; ++i)
      if (!(std::abs(y[i]) <= box)) domain_exit("hamiltonian flow", t);
  }
};

State<kHamCap> ham_initial(const PhasePoint& z0) {
  const int d = static_cast<int>(z0.x.size());
  if (z0.p.size() != d) throw std::invalid_argument("ham_flow: x and p dimensions differ");
  State<kHamCap> s(2 * d + 1);
  s.head(d) = z0.x;
  s.segment(d, d) = z0.p;
  s[2 * d] = 0.0;
  return s;
}

PhasePoint unpack_phase(const State<kHamCap>& s, int d) { return {s.head(d), s.segment(d, d)}; }

}  // namespace

PhasePoint ham_flow(const Hamiltonian& H, const PhasePoint& z0, double u, const OdeConfig& cfg,
                    FlowStats* stats) {
  check_config(cfg);
  const int d = static_cast<int>(z0.x.size());
  HamRhs rhs{H, nullptr, d};
  HamCheck chk{d, cfg.box};
  auto s = integrate(rhs, ham_initial(z0), 0.0, u, segment_steps(cfg, u), cfg, stats, chk);
  return unpack_phase(s, d);
}

std::pair<PhasePoint, double> ham_flow_with_integral(const Hamiltonian& H, const PhaseIntegrand& F,
                                                     const PhasePoint& z0, double u, const OdeConfig& cfg,
                                                     FlowStats* stats) {
  check_config(cfg);
  const int d = static_cast<int>(z0.x.size());
  HamRhs rhs{H, &F, d};
  HamCheck chk{d, cfg.box};
  auto s = integrate(rhs, ham_initial(z0), 0.0, u, segment_steps(cfg, u), cfg, stats, chk);
  return {unpack_phase(s, d), s[2 * d]};
}

std::vector<PhasePoint> ham_flow_nodes(const Hamiltonian& H, const PhasePoint& z0,
                                       const std::vector<double>& nodes, const OdeConfig& cfg) {
  check_config(cfg);
  const int d = static_cast<int>(z0.x.size());
  HamRhs rhs{H, nullptr, d};
  HamCheck chk{d, cfg.box};
  std::vector<PhasePoint> out;
  out.reserve(nodes.size());
  auto s = ham_initial(z0);
  double t = 0.0;
  for (double tn : nodes) {
    if (tn < t) throw std::invalid_argument("ham_flow_nodes: nodes must be nondecreasing from 0");
    s = integrate(rhs, s, t, tn, segment_steps(cfg, tn - t), cfg, nullptr, chk);
    t = tn;
    out.push_back(unpack_phase(s, d));
  }
  return out;
}

Hamiltonian fd_hamiltonian(std::function<double(const Vec&, const Vec&)> h, double rel) {
  return [h = std::move(h), rel](const Vec& x, const Vec& p) {
    const int d = static_cast<int>(x.size());
    const double step = rel * (1.0 + std::sqrt(x.squaredNorm() + p.squaredNorm()));
    HamGrad g;
    g.value = h(x, p);
    g.dx = Vec::Zero(d);
    g.dp = Vec::Zero(d);
    auto diff = [&](auto shift) {
      return (-shift(2.0 * step) + 8.0 * shift(step) - 8.0 * shift(-step) + shift(-2.0 * step)) / (12.0 * step);
    };
    for (int k = 0; k < d; ++k) {
      g.dx[k] = diff([&](double e) {
        Vec xs = x;
        xs[k] += e;
        return h(xs, p);
      });
      g.dp[k] = diff([&](double e) {
        Vec ps = p;
        ps[k] += e;
        return h(x, ps);
      });
    }
    return g;
  };
}

}  // namespace pg
