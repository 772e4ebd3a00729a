#pragma once

#include "pg/flow.hpp"
#include "pg/poisson.hpp"
#include "pg/types.hpp"

namespace pg {

struct NewtonConfig {
  int max_iters = 50;
  double tol = 1e-11;
  double jacobian_step = 1e-6;  // used by the finite-difference Jacobian fallbacks
  double damping = 1.0;
};

struct RealizationConfig {
  OdeConfig ode;
  NewtonConfig newton;
  double germ_radius = 0.5;  // <= 0 disables the check
};

// alpha(x, p) together with its first derivatives (implicit function theorem
// on the flow-average map).
struct AlphaJet {
  Vec value;
  Mat dx;  // d alpha / d x
  Mat dp;  // d alpha / d p (only when requested)
  int iterations = 0;
  double residual = 0.0;
};

AlphaJet alpha_jet(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg = {},
                   bool with_dp = false);

// Karasev realization: the y with int_0^1 phi^u_{pi,p}(y) du = x.
Vec alpha(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg = {});
// beta(x, p) = alpha(x, -p).
Vec beta(const PoissonStructure& P, const Vec& x, const Vec& p, const RealizationConfig& cfg = {});

inline PhasePoint inversion(const PhasePoint& z) { return {z.x, -z.p}; }

// |{f.alpha, g.alpha}_c - pi(alpha)(f, g)| for linear f, g, with the canonical
// bracket built from central-difference gradients of alpha.
double realization_poisson_residual(const PoissonStructure& P, const Vec& x, const Vec& p, const Vec& f,
                                    const Vec& g, const RealizationConfig& cfg = {});

// Hamiltonians c.alpha and c.beta with implicit-function gradients. Flows of
// these leave the caller-facing germ ball, so the radius check is relaxed 2x.
Hamiltonian alpha_pullback(const PoissonStructure& P, const Vec& c, const RealizationConfig& cfg = {});
Hamiltonian beta_pullback(const PoissonStructure& P, const Vec& c, const RealizationConfig& cfg = {});

// H = p1.beta + p2.alpha.
Hamiltonian darboux_hamiltonian(const PoissonStructure& P, const Vec& p1, const Vec& p2,
                                const RealizationConfig& cfg = {});

// Same Hamiltonians with gradients by 4th-order central differences of the
// Newton-defined values (reference oracle).
Hamiltonian darboux_hamiltonian_fd(const PoissonStructure& P, const Vec& p1, const Vec& p2,
                                   const RealizationConfig& cfg = {});

}  // namespace pg
