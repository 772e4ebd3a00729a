#pragma once

#include "pg/exec.hpp"
#include "pg/genfun.hpp"
#include "pg/poisson.hpp"

#include <vector>

namespace pg {

struct TaylorFit {
  std::vector<double> coefficients;  // S_0 .. S_N
  std::vector<double> diagnostics;   // fitted S_{N+1}, S_{N+2}
  double residual = 0.0;             // max |fit - value| over the nodes
  double t_radius = 0.3;
  int nodes = 0;
  bool reliable = true;              // residual below the threshold
};

struct TaylorConfig {
  double t_radius = 0.3;
  double threshold = 1e-8;
  ExecPolicy policy = ExecPolicy::serial;
};

// Least-squares fit of t -> S_{t pi}(p1,p2,x) on 2N+4 Chebyshev nodes in
// [-t0, t0] with a polynomial of degree N+2. Throws OutsideLocalDomain if the
// fit residual exceeds the threshold.
TaylorFit taylor_coeffs_S(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x, int N,
                          const TaylorConfig& tc = {}, const GenfunConfig& cfg = {});

// k(1) for theta^R_{k(t)}(k') = p1, k(0) = p2, theta^R_k = sum_{j<=K} ad_k^j/(j+1)!;
// RK4 with the given step count. Equals log(exp(p1) exp(p2)).
Vec bch_numeric(const StructureConstants& c, const Vec& p1, const Vec& p2, int K = 12, int steps = 64);

struct LinearComparison {
  double S_numeric = 0.0;
  double S_bch = 0.0;
  double diff = 0.0;
};

// genfun_S for t * make_linear(c, +1) against (1/t) BCH(t p1, t p2) . x.
LinearComparison compare_linear_case(const StructureConstants& c, const Vec& p1, const Vec& p2, const Vec& x,
                                     double t = 1.0, const GenfunConfig& cfg = {});

}  // namespace pg
