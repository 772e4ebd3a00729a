#include "pg/psm.hpp"
#include "pg/quadrature.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pg;
using pg::testing::maxabs;
using pg::testing::vec;

TEST(Psm, ChebCurveInterpolatesPolynomial) {
  const std::vector<double> s = chebyshev_nodes(8, 0.0, 1.0);
  std::vector<Vec> v;
  for (double t : s) v.push_back(vec({t * t * t - t, 2.0 - t}));
  const ChebCurve c(v);
  for (double t : {0.0, 0.37, 1.0}) {
    EXPECT_LT(maxabs(c(t) - vec({t * t * t - t, 2.0 - t})), 1e-13);
    EXPECT_LT(maxabs(c.derivative(t) - vec({3 * t * t - 1, -1.0})), 1e-12);
  }
}

TEST(Psm, TrivialTriangle) {
  const PoissonStructure P = quadratic2d();
  const Vec x = vec({0.5, -0.3});
  const Triangle T = build_triangle(P, zeros(2), zeros(2), x);
  EXPECT_EQ(T.y, x);
  EXPECT_EQ(T.p3, zeros(2));
  EXPECT_EQ(triangle_boundary_check(P, T).max, 0.0);
  const PsmField F = triangle_field(P, T);
  for (const PsmNode& n : F.nodes) {
    EXPECT_EQ(n.X, x);
    EXPECT_EQ(maxabs(n.eta_t) + maxabs(n.eta_s), 0.0);
  }
  EXPECT_EQ(psm_action(P, T), 0.0);
  const EdgeElements e = edge_elements(P, T);
  for (const PhasePoint* g : {&e.g1, &e.g2, &e.g3}) {
    EXPECT_EQ(g->x, x);
    EXPECT_EQ(g->p, zeros(2));
  }
}

TEST(Psm, ConstantExample) {
  TriangleConfig tc;
  tc.genfun.real.germ_radius = 0.0;
  const PoissonStructure P = moyal2d();
  const Vec p1 = vec({1, 0}), p2 = vec({0, 1}), x = vec({1, 2});
  const Triangle T = build_triangle(P, p1, p2, x, tc);
  EXPECT_NEAR(psm_action(P, T, 16, tc.genfun), 3.5, 1e-10);
  // Vertices: y, the p2-edge end, the corner.
  const Mat Pi = eval_pi(P, x);
  EXPECT_LT(maxabs(T.y - (x - 0.5 * Pi * (p1 + p2))), 1e-12);
  const PsmActionReport r = psm_action_report(P, T, 16, tc.genfun);
  EXPECT_NEAR(r.bulk, -0.5 * p1.dot(Pi * p2), 1e-12);
  const EdgeElements e = edge_elements(P, T, tc.genfun);
  EXPECT_LT(maxabs(e.g3.x - x), 1e-12);
  EXPECT_LT(maxabs(e.g3.p - (p1 + p2)), 1e-12);
  const PsmField F = triangle_field(P, T, 16, tc.genfun);
  EXPECT_LT(F.lsq_residual, 1e-7);
}

TEST(Psm, QuadraticReproducesGenfun) {
  const PoissonStructure P = quadratic2d();
  const Vec p1 = vec({0.08, -0.05}), p2 = vec({-0.03, 0.09}), x = vec({0.7, -0.4});
  const Triangle T = build_triangle(P, p1, p2, x);
  const BoundaryReport b = triangle_boundary_check(P, T);
  EXPECT_LT(b.max, 1e-6);
  const PsmActionReport r = psm_action_report(P, T);
  EXPECT_LT(std::abs(r.action - genfun_S(P, {p1, p2, x})), 1e-4);
  EXPECT_NEAR(r.bulk, r.bulk_pi_form, 1e-6);
  EXPECT_LT(r.lsq_residual, 1e-5);
}

TEST(Psm, EdgeCovectorsAndElements) {
  const PoissonStructure P = so3_structure();
  const Vec p1 = vec({0.1, -0.05, 0.07}), p2 = vec({-0.04, 0.08, 0.02}), x = vec({0.3, -0.5, 0.8});
  const Triangle T = build_triangle(P, p1, p2, x);
  // r g(1 - u, 0) = u p2.
  for (double u : {0.25, 0.5, 1.0}) EXPECT_LT(maxabs(triangle_point(P, T, 1.0 - u, 0.0).p - u * p2), 1e-7);
  const EdgeElements e = edge_elements(P, T);
  EXPECT_EQ(e.g1.p, p1);
  EXPECT_EQ(e.g2.p, p2);
  EXPECT_EQ(e.g3.p, T.p3);
  EXPECT_LT(maxabs(alpha(P, e.g1.x, e.g1.p) - beta(P, e.g2.x, e.g2.p)), 1e-6);
  const PhasePoint m = multiply(P, e.g1, e.g2);
  EXPECT_LT(std::max(maxabs(m.x - e.g3.x), maxabs(m.p - e.g3.p)), 1e-5);
}

TEST(Psm, GaugeProxySampleCount) {
  const PoissonStructure P = quadratic3d();
  const Vec p1 = vec({0.1, -0.05, 0.07}), p2 = vec({-0.04, 0.08, 0.02}), x = vec({0.3, -0.5, 0.8});
  TriangleConfig a, b;
  b.samples = 32;
  EXPECT_NEAR(psm_action(P, build_triangle(P, p1, p2, x, a)), psm_action(P, build_triangle(P, p1, p2, x, b)), 1e-5);
}

TEST(Psm, FieldInImageAndCsv) {
  const PoissonStructure P = quadratic2d();
  const Triangle T = build_triangle(P, vec({0.08, -0.05}), vec({-0.03, 0.09}), vec({0.7, -0.4}));
  const PsmField F = triangle_field(P, T, 16);
  EXPECT_EQ(F.nodes.size(), 136u);
  EXPECT_LT(F.lsq_residual, 1e-5);
  std::ostringstream os;
  F.write_csv(os);
  EXPECT_EQ(os.str().substr(0, 24), "t,s,X0,X1,eta_t0,eta_t1,");
  EXPECT_THROW(triangle_field(P, T, 8), std::invalid_argument);
}

TEST(Psm, ParallelMatchesSerial) {
  const PoissonStructure P = quadratic2d();
  const Triangle T = build_triangle(P, vec({0.08, -0.05}), vec({-0.03, 0.09}), vec({0.7, -0.4}));
  const PsmActionReport a = psm_action_report(P, T, 16, {}, ExecPolicy::serial);
  const PsmActionReport b = psm_action_report(P, T, 16, {}, ExecPolicy::parallel);
  EXPECT_EQ(a.action, b.action);
  const PsmField f = triangle_field(P, T, 16, {}, ExecPolicy::serial), g = triangle_field(P, T, 16, {}, ExecPolicy::parallel);
  ASSERT_EQ(f.nodes.size(), g.nodes.size());
  for (size_t k = 0; k < f.nodes.size(); ++k) EXPECT_EQ(f.nodes[k].eta_s, g.nodes[k].eta_s);
}
