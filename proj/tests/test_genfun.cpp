#include "pg/genfun.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace pg;
using pg::testing::maxabs;
using pg::testing::vec;

namespace {
double closed_form(const Vec& p1, const Vec& p2, const Vec& x, const Mat& Pi) {
  return (p1 + p2).dot(x) + 0.5 * p1.dot(Pi * p2);
}
}  // namespace

TEST(Genfun, ConstantExample) {
  GenfunConfig cfg;
  cfg.real.germ_radius = 0.0;
  EXPECT_NEAR(genfun_S(moyal2d(), {vec({1, 0}), vec({0, 1}), vec({1, 2})}, cfg), 3.5, 1e-10);
}

TEST(Genfun, UnitsAndSlots) {
  const PoissonStructure P = quadratic2d();
  const Vec x = vec({0.6, -0.4}), p = vec({0.12, 0.07});
  EXPECT_EQ(genfun_S(P, {zeros(2), zeros(2), x}), 0.0);
  EXPECT_NEAR(genfun_S(P, {p, zeros(2), x}), p.dot(x), 1e-10);
  EXPECT_NEAR(genfun_S(P, {zeros(2), p, x}), p.dot(x), 1e-10);
}

TEST(Genfun, ZeroStructure) {
  const Vec p1 = vec({0.1, 0.2}), p2 = vec({-0.3, 0.1}), x = vec({0.5, 0.5});
  EXPECT_NEAR(genfun_S(zero_structure(2), {p1, p2, x}), (p1 + p2).dot(x), 1e-10);
}

TEST(Genfun, ConstantRandom) {
  const PoissonStructure P = moyal2d();
  for (const Vec& q : probe_grid(2, 5, 3)) {
    const Vec p1 = 0.2 * q, p2 = vec({0.1, -0.15}), x = vec({q[1], 0.3});
    EXPECT_NEAR(genfun_S(P, {p1, p2, x}), closed_form(p1, p2, x, eval_pi(P, x)), 1e-9);
  }
}

TEST(Genfun, InversionSymmetryAndDiagonal) {
  const PoissonStructure P = quadratic3d();
  const Vec p = vec({0.1, -0.08, 0.05}), x = vec({0.5, 0.4, -0.6});
  EXPECT_NEAR(genfun_S(P, {p, Vec(-p), x}), 0.0, 1e-7);
  EXPECT_NEAR(genfun_S(P, {p, p, x}), 2 * p.dot(x), 1e-7);
}

TEST(Genfun, DerivativesFromFlowsMatchFd) {
  const PoissonStructure P = quadratic2d();
  const GenfunPoint g{vec({0.1, -0.06}), vec({0.05, 0.09}), vec({0.7, -0.3})};
  const SDerivatives a = dS(P, g), b = dS_fd(P, g);
  EXPECT_LT(maxabs(a.dp1 - b.dp1), 1e-8);
  EXPECT_LT(maxabs(a.dp2 - b.dp2), 1e-8);
  EXPECT_LT(maxabs(a.dx - b.dx), 1e-8);
}

TEST(Genfun, SlotsGiveAlphaAndBeta) {
  const PoissonStructure P = so3_structure();
  const Vec p = vec({0.15, -0.1, 0.2}), x = vec({0.3, 0.5, -0.4});
  EXPECT_LT(maxabs(dS(P, {p, zeros(3), x}).dp2 - alpha(P, x, p)), 1e-6);
  EXPECT_LT(maxabs(dS(P, {zeros(3), p, x}).dp1 - beta(P, x, p)), 1e-6);
}

TEST(Genfun, PiExtraction) {
  const PoissonStructure P = quadratic2d();
  const Vec x = vec({0.6, -0.8});
  EXPECT_LT((pi_from_S(P, x) - eval_pi(P, x)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Genfun, SourceTargetCompatibility) {
  const PoissonStructure P = quadratic2d();
  const GenfunPoint g{vec({0.1, -0.06}), vec({0.05, 0.09}), vec({0.7, -0.3})};
  const SDerivatives d = dS(P, g);
  EXPECT_LT(maxabs(alpha(P, g.x, d.dx) - alpha(P, d.dp2, g.p2)), 1e-6);
  EXPECT_LT(maxabs(beta(P, g.x, d.dx) - beta(P, d.dp1, g.p1)), 1e-6);
}

TEST(Genfun, Route2) {
  const PoissonStructure P = quadratic2d();
  const Vec p = vec({0.1, 0.05}), x1 = vec({0.6, 0.4});
  const Route2Result a = genfun_S_route2(P, p, zeros(2), x1);
  EXPECT_NEAR(a.value, p.dot(x1), 1e-10);
  const Route2Result b = genfun_S_route2(P, zeros(2), p, x1);
  EXPECT_NEAR(b.value, p.dot(x1), 1e-10);
  const Route2Result c = genfun_S_route2(P, vec({0.08, -0.04}), vec({-0.03, 0.09}), x1);
  EXPECT_NEAR(c.value, genfun_S(P, c.point), 1e-7);
}

TEST(Genfun, MultiplyLaws) {
  const PoissonStructure P = quadratic2d();
  const PhasePoint z1{vec({0.6, -0.4}), vec({0.1, 0.07})};
  const PhasePoint unit{alpha(P, z1.x, z1.p), zeros(2)};
  const PhasePoint r = multiply(P, z1, unit);
  EXPECT_LT(std::max(maxabs(r.x - z1.x), maxabs(r.p - z1.p)), 1e-6);
  const PhasePoint inv = multiply(P, z1, inversion(z1));
  EXPECT_LT(maxabs(inv.x - beta(P, z1.x, z1.p)), 1e-6);
  EXPECT_LT(maxabs(inv.p), 1e-6);
}

TEST(Genfun, MultiplyConstant) {
  const PoissonStructure P = moyal2d();
  const PhasePoint z1{vec({0.3, 0.2}), vec({0.1, -0.2})};
  const Vec p2 = vec({0.05, 0.15});
  // z2 composable: beta(z2) = alpha(z1).
  const Mat Pi = eval_pi(P, z1.x);
  const Vec x2 = z1.x - 0.5 * Pi * z1.p - 0.5 * Pi * p2;
  const MultiplyReport r = multiply_report(P, z1, {x2, p2});
  EXPECT_LT(maxabs(r.product.x - (z1.x - 0.5 * Pi * p2)), 1e-10);
  EXPECT_LT(maxabs(r.product.p - (z1.p + p2)), 1e-10);
  EXPECT_LT(r.p2_slot_residual, 1e-6);
}

TEST(Genfun, MultiplyRejectsNonComposable) {
  EXPECT_THROW(multiply(quadratic2d(), {vec({0.6, -0.4}), vec({0.1, 0.0})}, {vec({0.0, 0.0}), vec({0.1, 0.0})}),
               OutsideLocalDomain);
}

TEST(Genfun, SgaTrivialAndConstant) {
  const Vec x = vec({0.5, 0.2});
  const SgaSolveReport t = sga_residual(quadratic2d(), zeros(2), zeros(2), zeros(2), x);
  EXPECT_EQ(t.residual, 0.0);
  EXPECT_EQ(t.xbar, x);
  const SgaSolveReport c = sga_residual(moyal2d(), vec({0.2, -0.1}), vec({0.05, 0.15}), vec({-0.1, 0.1}), x);
  EXPECT_LT(c.residual, 1e-8);
}

TEST(Genfun, EulerDefectAndCocycle) {
  const PoissonStructure P = moyal2d();
  const GenfunPoint g{vec({0.2, -0.1}), vec({0.05, 0.15}), vec({0.3, 0.4})};
  const double half_pi = 0.5 * g.p1.dot(eval_pi(P, g.x) * g.p2);
  EXPECT_NEAR(euler_defect(P, g), half_pi, 1e-10);
  EXPECT_NEAR(euler_defect_fd(P, g), half_pi, 1e-7);
  const PoissonStructure Q = quadratic2d();
  const GenfunPoint h{vec({0.1, -0.06}), vec({0.05, 0.09}), vec({0.7, -0.3})};
  EXPECT_NEAR(euler_defect(Q, h), euler_defect_fd(Q, h), 1e-7);
  const PhasePoint z{vec({0.4, 0.1}), vec({0.1, 0.1})};
  EXPECT_NEAR(cocycle_C(Q, z, {alpha(Q, z.x, z.p), zeros(2)}), 0.0, 1e-9);
}

TEST(Genfun, CocycleIntegral) {
  const CocycleIntegralReport r =
      cocycle_integral(quadratic2d(), {vec({0.1, -0.06}), vec({0.05, 0.09}), vec({0.7, -0.3})}, 1.0);
  EXPECT_LT(r.diff, 1e-5);
}
