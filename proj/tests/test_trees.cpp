#include "pg/trees.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace pg;

namespace {
RootedTree T(const char* s) { return RootedTree::parse(s); }

PolyVectorField random_quadratic_field(int m, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  PolyVectorField X{m, {}};
  for (int u = 0; u < m; ++u) {
    Polynomial p(m);
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; i + j <= 2; ++j) p.add_term(m == 2 ? Exponents{i, j} : Exponents{i + j}, c(gen));
    X.comps.push_back(p);
  }
  return X;
}
}  // namespace

TEST(Trees, Counts) {
  const int expected[] = {1, 1, 2, 4, 9, 20, 48, 115};
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(static_cast<int>(enumerate_trees(n).size()), expected[n - 1]);
  EXPECT_THROW(enumerate_trees(0), std::invalid_argument);
  EXPECT_THROW(enumerate_trees(9), std::invalid_argument);
}

TEST(Trees, NoDuplicatesAndCanonicalRoundTrip) {
  for (int n = 1; n <= 7; ++n) {
    const auto ts = enumerate_trees(n);
    const std::set<RootedTree> uniq(ts.begin(), ts.end());
    EXPECT_EQ(uniq.size(), ts.size());
    for (const RootedTree& t : ts) {
      EXPECT_EQ(t.size(), n);
      EXPECT_EQ(RootedTree::parse(t.to_string()), t);
      std::vector<RootedTree> rev(t.children().rbegin(), t.children().rend());
      EXPECT_EQ(RootedTree(rev), t);
    }
  }
  const auto t3 = enumerate_trees(3);
  EXPECT_TRUE(std::find(t3.begin(), t3.end(), T("[[[]]]")) != t3.end());
  EXPECT_TRUE(std::find(t3.begin(), t3.end(), T("[[],[]]")) != t3.end());
}

TEST(Trees, SymmetryAndFactorial) {
  EXPECT_EQ(sigma(T("[]")), 1);
  EXPECT_EQ(tree_factorial(T("[]")), 1);
  EXPECT_EQ(sigma(T("[[],[]]")), 2);
  EXPECT_EQ(tree_factorial(T("[[],[]]")), 3);
  EXPECT_EQ(sigma(T("[[[]]]")), 1);
  EXPECT_EQ(tree_factorial(T("[[[]]]")), 6);
  EXPECT_EQ(sigma(T("[[[]],[[]]]")), 2);
}

TEST(Trees, AprimeCoefficient) {
  EXPECT_EQ(aprime_coefficient(T("[]")), Rational(1));
  EXPECT_EQ(aprime_coefficient(T("[[],[]]")), Rational(1, 4));
  EXPECT_EQ(aprime_coefficient(T("[[[]]]")), Rational(1, 6));
}

TEST(Trees, ElementaryDifferentialsOneDim) {
  PolyVectorField X{1, {}};
  Polynomial x2(1);
  x2.add_term({2}, 1.0);
  X.comps.push_back(x2);
  const std::vector<double> x{1.5};
  EXPECT_NEAR(elementary_differential(X, T("[]"), x)[0], 2.25, 1e-14);
  EXPECT_NEAR(elementary_differential(X, T("[[]]"), x)[0], 2 * std::pow(1.5, 3), 1e-13);
  EXPECT_NEAR(elementary_differential(X, T("[[],[]]"), x)[0], 2 * std::pow(1.5, 4), 1e-13);
  Polynomial H(1);
  H.add_term({3}, 1.0);
  EXPECT_NEAR(f_symbol(H, X, T("[]"), x), std::pow(1.5, 3), 1e-14);
}

TEST(Trees, LinearFieldChainsOnly) {
  // X = A x on R^2.
  PolyVectorField X{2, {}};
  const double A[2][2] = {{0.3, -1.2}, {0.7, 0.4}};
  for (int u = 0; u < 2; ++u) {
    Polynomial p(2);
    p.add_term({1, 0}, A[u][0]);
    p.add_term({0, 1}, A[u][1]);
    X.comps.push_back(p);
  }
  const std::vector<double> x{0.5, -0.8};
  const auto chain = elementary_differential(X, T("[[[]]]"), x);
  // A^3 x.
  double v[2] = {x[0], x[1]};
  for (int r = 0; r < 3; ++r) {
    const double a = A[0][0] * v[0] + A[0][1] * v[1], b = A[1][0] * v[0] + A[1][1] * v[1];
    v[0] = a;
    v[1] = b;
  }
  EXPECT_NEAR(chain[0], v[0], 1e-13);
  EXPECT_NEAR(chain[1], v[1], 1e-13);
  const auto branch = elementary_differential(X, T("[[],[]]"), x);
  EXPECT_EQ(branch[0], 0.0);
  EXPECT_EQ(branch[1], 0.0);
}

TEST(Trees, IteratedLieDerivative) {
  for (unsigned seed : {1u, 2u, 3u}) {
    const PolyVectorField X = random_quadratic_field(2, seed);
    for (int n = 1; n <= 5; ++n)
      for (int i = 0; i < 2; ++i) {
        const LieCheck c = iterated_lie_check(X, n, {0.3, -0.6}, i);
        EXPECT_NEAR(c.lhs, c.rhs, 1e-9 * std::max(1.0, std::abs(c.lhs)));
      }
  }
  const PolyVectorField X = random_quadratic_field(2, 9);
  EXPECT_NEAR(iterated_lie_check(X, 1, {0.2, 0.1}, 0).lhs, X.eval(std::vector<double>{0.2, 0.1}.data())[0], 1e-14);
}

TEST(Trees, SprayFieldIdentity) {
  const PolyVectorField V = spray_vector_field(quadratic2d());
  EXPECT_EQ(V.dim, 4);
  for (int n = 1; n <= 4; ++n) {
    const LieCheck c = iterated_lie_check(V, n, {0.4, -0.3, 0.2, 0.5}, 0);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-9);
  }
}

TEST(Trees, ButcherSeries) {
  const PolyVectorField X = random_quadratic_field(2, 4);
  std::map<RootedTree, double> zero;
  for (int n = 1; n <= 3; ++n)
    for (const RootedTree& t : enumerate_trees(n)) zero[t] = 0.0;
  const auto y = butcher_eval(zero, X, {0.1, 0.2}, 0.5, 3);
  EXPECT_EQ(y[0], 0.1);
  EXPECT_EQ(y[1], 0.2);
  std::map<RootedTree, double> missing{{T("[]"), 1.0}};
  EXPECT_THROW(butcher_eval(missing, X, {0.1, 0.2}, 0.5, 2), std::invalid_argument);
}
