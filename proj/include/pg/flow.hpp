#pragma once

#include "pg/poisson.hpp"
#include "pg/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace pg {

enum class OdeMethod { rk4, rk4_richardson };

struct OdeConfig {
  int steps = 64;
  OdeMethod method = OdeMethod::rk4;
  double tol = 1e-10;  // threshold for the Richardson estimate (reported, not enforced)
  double box = 10.0;   // domain box [-box, box]^{2d}
};

struct FlowStats {
  double error_estimate = 0.0;  // Richardson step-halving estimate (rk4_richardson only)
  bool within_tol = true;
};

// phi^u_{pi,p}(x0): the spray flow x' = pi(x) p.
Vec spray_flow(const PoissonStructure& P, const Vec& p, const Vec& x0, double u,
               const OdeConfig& cfg = {}, FlowStats* stats = nullptr);

// int_0^1 phi^u_{pi,p}(y) du, carried as d extra state components.
Vec spray_flow_average(const PoissonStructure& P, const Vec& p, const Vec& y,
                       const OdeConfig& cfg = {}, FlowStats* stats = nullptr);

// Spray flow plus first variations with respect to the start point y and the
// covector p, for the endpoint and for the running average.
struct SprayJet {
  Vec end;
  Vec avg;     // int_0^u phi^s ds
  Mat end_dy;  // d end / d y
  Mat avg_dy;
  Mat end_dp;  // d end / d p (only when requested)
  Mat avg_dp;
};

SprayJet spray_jet(const PoissonStructure& P, const Vec& p, const Vec& y, double u, bool with_dp,
                   const OdeConfig& cfg = {}, FlowStats* stats = nullptr);

// Jets at increasing times 0 <= nodes[0] < nodes[1] < ...; step count per
// segment is proportional to its length.
std::vector<SprayJet> spray_jet_nodes(const PoissonStructure& P, const Vec& p, const Vec& y,
                                      const std::vector<double>& nodes, bool with_dp,
                                      const OdeConfig& cfg = {});

// Value and gradient of a Hamiltonian on T*M.
struct HamGrad {
  double value = 0.0;
  Vec dx;
  Vec dp;
};

using Hamiltonian = std::function<HamGrad(const Vec& x, const Vec& p)>;
using PhaseIntegrand = std::function<double(const Vec& x, const Vec& p, const HamGrad& g)>;

// Hamiltonian flow with x' = -dH/dp, p' = dH/dx.
PhasePoint ham_flow(const Hamiltonian& H, const PhasePoint& z0, double u, const OdeConfig& cfg = {},
                    FlowStats* stats = nullptr);

// Flow plus int_0^u F(z(s)) ds as an augmented component.
std::pair<PhasePoint, double> ham_flow_with_integral(const Hamiltonian& H, const PhaseIntegrand& F,
                                                     const PhasePoint& z0, double u,
                                                     const OdeConfig& cfg = {}, FlowStats* stats = nullptr);

// Points of the flow at increasing times (nodes may start at 0).
std::vector<PhasePoint> ham_flow_nodes(const Hamiltonian& H, const PhasePoint& z0,
                                       const std::vector<double>& nodes, const OdeConfig& cfg = {});

// Gradient oracle for a scalar function by 4th-order central differences with
// step rel * (1 + |z|).
Hamiltonian fd_hamiltonian(std::function<double(const Vec& x, const Vec& p)> h, double rel = 1e-4);

// Euler vector field: L_E H = p . dH/dp.
inline double euler_derivative(const Vec& p, const HamGrad& g) { return p.dot(g.dp); }

}  // namespace pg
