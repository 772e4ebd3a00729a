#pragma once

#include "pg/exec.hpp"
#include "pg/genfun.hpp"
#include "pg/poisson.hpp"
#include "pg/types.hpp"

#include <iosfwd>
#include <vector>

namespace pg {

// Chebyshev series of a covector-valued curve on [0, 1].
class ChebCurve {
 public:
  ChebCurve() = default;
  // values[k] sampled at chebyshev_nodes(n, 0, 1)[k].
  explicit ChebCurve(const std::vector<Vec>& values);
  Vec operator()(double s) const;
  Vec derivative(double s) const;
  int samples() const { return static_cast<int>(coef_.size()); }

 private:
  std::vector<Vec> coef_;   // T_0 .. T_{n-1} in the variable 2s - 1
  std::vector<Vec> dcoef_;  // same for the derivative in s
};

// g(t, s) = phi_{1-t}^{ptilde(s/(1-t)) beta}(y, 0) on the simplex t, s >= 0, t + s <= 1.
struct Triangle {
  GenfunPoint generator;
  Vec y;            // identity base point: g(1, 0) = (y, 0)
  ChebCurve p_tilde;
  std::vector<double> sample_s;
  std::vector<Vec> sample_p;
  Vec p3;           // d/dx S(p1, p2, x)
  double y_residual = 0.0;  // |q phi^{p1 beta}_1 phi^{p2 beta}_1 (y,0) - x|
};

struct TriangleConfig {
  GenfunConfig genfun;
  int samples = 16;  // Chebyshev samples of ptilde
  ExecPolicy policy = ExecPolicy::serial;
};

// y from q phi_1^{p1 beta} phi_1^{p2 beta}(y, 0) = x (predictor alpha(x, p3),
// Newton polish), ptilde(s) as the fiber component of phi_s^{p1 beta} phi_1^{p2 beta}(y, 0).
Triangle build_triangle(const PoissonStructure& P, const Vec& p1, const Vec& p2, const Vec& x,
                        const TriangleConfig& cfg = {});

// The map itself, with (t, s) in the simplex; the collapsed edge t = 1 gives (y, 0).
PhasePoint triangle_point(const PoissonStructure& P, const Triangle& T, double t, double s,
                          const GenfunConfig& cfg = {});

struct BoundaryReport {
  double identity = 0.0;  // |r g(1,0)|
  double edge2 = 0.0;     // g(1-u, 0) against phi_u^{p2 beta}(y,0)
  double edge1 = 0.0;     // g(0, u) against phi_u^{p1 beta} phi_1^{p2 beta}(y,0)
  double edge3 = 0.0;     // g(1-u, u) against phi_u^{p3 beta}(y,0)
  double corner = 0.0;    // |q g(0,1) - x|
  double max = 0.0;
};

BoundaryReport triangle_boundary_check(const PoissonStructure& P, const Triangle& T,
                                       const GenfunConfig& cfg = {}, int samples = 16);

// Field X = beta o g, eta from pi(X) eta = -dX by minimum-norm least squares
// (kernel components zero). Nodes are cell midpoints of the n x n grid on the
// simplex, so the collapsed corner is never sampled.
struct PsmNode {
  double t = 0.0;
  double s = 0.0;
  Vec X;
  Vec eta_t;  // eta(d/dt)
  Vec eta_s;  // eta(d/ds)
};

struct PsmField {
  std::vector<PsmNode> nodes;
  double lsq_residual = 0.0;  // max |pi(X) eta + dX| over nodes and slots

  void write_csv(std::ostream& os) const;
};

// Throws OutsideLocalDomain when lsq_residual > 1e-4.
PsmField triangle_field(const PoissonStructure& P, const Triangle& T, int grid_n = 16,
                        const GenfunConfig& cfg = {}, ExecPolicy policy = ExecPolicy::serial);

struct PsmActionReport {
  double action = 0.0;
  double bulk = 0.0;         // int [eta ^ dX + 1/2 pi(eta, eta)]
  double bulk_pi_form = 0.0; // -1/2 int pi(eta, eta), equal on solutions
  double boundary = 0.0;
  double lsq_residual = 0.0;
};

// Modified action with the three edge insertions. Bulk by a grid_n x grid_n
// Gauss rule in (1 - t, s / (1 - t)); edges by 32-point Gauss.
PsmActionReport psm_action_report(const PoissonStructure& P, const Triangle& T, int grid_n = 16,
                                  const GenfunConfig& cfg = {}, ExecPolicy policy = ExecPolicy::serial);
double psm_action(const PoissonStructure& P, const Triangle& T, int grid_n = 16, const GenfunConfig& cfg = {});

struct EdgeElements {
  PhasePoint g1;
  PhasePoint g2;
  PhasePoint g3;
};

// g_k = (int_0^1 X(edge_k(u)) du, p_k).
EdgeElements edge_elements(const PoissonStructure& P, const Triangle& T, const GenfunConfig& cfg = {});

}  // namespace pg
