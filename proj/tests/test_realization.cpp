#include "pg/realization.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace pg;
using pg::testing::maxabs;
using pg::testing::vec;

TEST(Realization, ZeroStructure) {
  const Vec x = vec({0.3, -0.2});
  EXPECT_LT(maxabs(alpha(zero_structure(2), x, vec({0.2, 0.1})) - x), 1e-15);
  EXPECT_LT(maxabs(beta(zero_structure(2), x, vec({0.2, 0.1})) - x), 1e-15);
}

TEST(Realization, ConstantClosedForm) {
  RealizationConfig cfg;
  cfg.germ_radius = 0.0;
  const Vec a = alpha(moyal2d(), vec({0, 0}), vec({1, 0}), cfg);
  EXPECT_NEAR(a[0], 0.0, 1e-12);
  EXPECT_NEAR(a[1], 0.5, 1e-12);
  const Vec x = vec({0.4, -1.0}), p = vec({0.2, 0.3});
  const Mat Pi = eval_pi(moyal2d(), x);
  EXPECT_LT(maxabs(beta(moyal2d(), x, p) - (x + 0.5 * Pi * p)), 1e-12);
}

TEST(Realization, ZeroCovectorIsExact) {
  const Vec x = vec({0.3, -0.7, 0.2});
  const AlphaJet j = alpha_jet(quadratic3d(), x, zeros(3));
  EXPECT_EQ(j.value, x);
  EXPECT_EQ(j.iterations, 0);
}

TEST(Realization, BetaIsAlphaOfMinusP) {
  const PoissonStructure P = quadratic2d();
  const Vec x = vec({0.6, 0.4}), p = vec({0.2, -0.1});
  EXPECT_EQ(beta(P, x, p), alpha(P, x, Vec(-p)));
  const PhasePoint z{x, p};
  const PhasePoint iz = inversion(z);
  EXPECT_LT(maxabs(beta(P, iz.x, iz.p) - alpha(P, z.x, z.p)), 1e-10);
  EXPECT_EQ(inversion(iz).p, p);
}

TEST(Realization, ResidualBelowTolerance) {
  const PoissonStructure P = quadratic3d();
  const Vec x = vec({0.5, 0.4, -0.6}), p = vec({0.2, -0.1, 0.3});
  const Vec y = alpha(P, x, p);
  EXPECT_LT(maxabs(spray_flow_average(P, p, y) - x), 1e-11);
}

TEST(Realization, OutsideGermRadiusThrows) {
  EXPECT_THROW(alpha(quadratic2d(), vec({0.1, 0.1}), vec({0.6, 0.0})), OutsideLocalDomain);
}

TEST(Realization, PoissonMapResidual) {
  EXPECT_LT(realization_poisson_residual(zero_structure(2), vec({0.1, 0.2}), vec({0.1, 0.1}), vec({1, 0}), vec({0, 1})), 1e-9);
  EXPECT_LT(realization_poisson_residual(moyal2d(), vec({0.1, 0.2}), vec({0.1, -0.2}), vec({0.3, 1}), vec({-1, 0.5})), 1e-6);
  for (const Vec& q : probe_grid(2, 4, 21)) {
    const Vec p = 0.2 * q / std::max(1.0, q.norm());
    EXPECT_LT(realization_poisson_residual(quadratic2d(), vec({0.6, -0.4}), p, vec({1, 0.3}), vec({-0.2, 1})), 1e-5);
  }
}

TEST(Realization, FiberInvarianceAndRescaling) {
  const PoissonStructure P = so3_structure();
  const Vec x = vec({0.3, -0.4, 0.5}), p = vec({0.2, 0.1, -0.25});
  for (double t : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(p.dot(alpha(P, x, t * p)), p.dot(x), 1e-9);
    EXPECT_LT(maxabs(alpha(P.scaled(t), x, p) - alpha(P, x, t * p)), 1e-9);
  }
}

TEST(Realization, ImplicitGradientMatchesFd) {
  const PoissonStructure P = quadratic2d();
  const Vec p1 = vec({0.1, -0.05}), p2 = vec({0.04, 0.08});
  const Hamiltonian H = darboux_hamiltonian(P, p1, p2), Hfd = darboux_hamiltonian_fd(P, p1, p2);
  const Vec x = vec({0.6, -0.4}), p = vec({0.1, 0.15});
  const HamGrad a = H(x, p), b = Hfd(x, p);
  EXPECT_NEAR(a.value, b.value, 1e-12);
  EXPECT_LT(maxabs(a.dx - b.dx), 1e-8);
  EXPECT_LT(maxabs(a.dp - b.dp), 1e-8);
}
