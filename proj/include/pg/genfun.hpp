#pragma once

#include "pg/flow.hpp"
#include "pg/poisson.hpp"
#include "pg/realization.hpp"
#include "pg/types.hpp"

#include <optional>

namespace pg {

// A point (p1, p2, x) of M* x M* x M.
struct GenfunPoint {
  Vec p1;
  Vec p2;
  Vec x;
};

struct GenfunConfig {
  RealizationConfig real;
  NewtonConfig outer{50, 1e-12, 1e-6, 1.0};  // solve for x0 in x = q phi^H_1(x0, 0)
  double fd_step = 1e-4;                    // relative step for finite-difference derivatives
};

// Partial derivatives of S at a point: d/dp1 and d/dp2 are points, d/dx a covector.
struct SDerivatives {
  Vec dp1;
  Vec dp2;
  Vec dx;
};

// Everything one solve for x0 produces.
struct GenfunSolution {
  double S = 0.0;
  Vec x0;
  PhasePoint end;  // phi^H_1(x0, 0)
  SDerivatives d;
  int iterations = 0;
  double residual = 0.0;
};

// H = p1.beta + p2.alpha, x0 from x = q phi^H_1(x0,0), then
// S = (p1+p2)(x0) - int_0^1 L_E H(phi^H_u(x0,0)) du. The derivatives come from
// the generating condition: d/dp1 S averages the p1-spray from x0, d/dp2 S the
// (-p2)-spray, d/dx S = r phi^H_1(x0,0).
GenfunSolution genfun_solve(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {},
                            const std::optional<Vec>& x0_guess = std::nullopt);

double genfun_S(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {});

struct Route2Result {
  GenfunPoint point;  // (p1, r z2(1), q z3(1))
  double value = 0.0;
};

// Independent evaluation from the alpha-pullback flows of p2 started at
// (alpha(x1,p1), 0) and at (x1, p1).
Route2Result genfun_S_route2(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x1,
                             const GenfunConfig& cfg = {});

SDerivatives dS(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {});
// 4th-order central differences of genfun_S, step fd_step * (1 + |argument|).
SDerivatives dS_fd(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {});

// 2 d_{p1,i} d_{p2,j} S(0,0,x) by a mixed central stencil of width h.
Mat pi_from_S(const PoissonStructure& P, const Vec& x, const GenfunConfig& cfg = {}, double h = 1e-3);

struct MultiplyReport {
  PhasePoint product;
  double composability = 0.0;     // |alpha(z1) - beta(z2)|
  double p2_slot_residual = 0.0;  // |d/dp2 S(p1,p2,x) - q z2|
};

// Groupoid product. Throws OutsideLocalDomain when |alpha(z1) - beta(z2)| >= tol.
MultiplyReport multiply_report(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2,
                               const GenfunConfig& cfg = {}, double composable_tol = 1e-8);
PhasePoint multiply(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2,
                    const GenfunConfig& cfg = {});

struct SgaSolveReport {
  Vec xbar;
  Vec pbar;
  Vec xtilde;
  Vec ptilde;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

SgaSolveReport sga_residual(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& p3, const Vec& x,
                            const GenfunConfig& cfg = {}, int max_iters = 40, double tol = 1e-12);

// (L_E S - S)(p1, p2, x) with E = p1 d/dp1 + p2 d/dp2, from the flow derivatives.
double euler_defect(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {});
// Same quantity with L_E S from a 4th-order difference in the scaling direction.
double euler_defect_fd(const PoissonStructure& P, const GenfunPoint& g, const GenfunConfig& cfg = {});

// C(z1, z2) = (L_E S - S)(r z1, r z2, q(z1 z2)).
double cocycle_C(const PoissonStructure& P, const PhasePoint& z1, const PhasePoint& z2,
                 const GenfunConfig& cfg = {});

struct CocycleIntegralReport {
  double direct = 0.0;    // S_t(p1,p2,x)
  double integral = 0.0;  // (p1+p2)x + int_0^t s^-1 (L_E S_s - S_s) ds
  double diff = 0.0;
};

// S_t with t.pi compared with the integrated cocycle, Gauss-Legendre in s.
CocycleIntegralReport cocycle_integral(const PoissonStructure& P, const GenfunPoint& g, double t,
                                       const GenfunConfig& cfg = {}, int gauss_points = 8);

}  // namespace pg
