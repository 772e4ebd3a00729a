// Acceptance suite: one PASS/FAIL line per criterion with the worst observed
// error against its threshold. Optional argument: criterion numbers to run.
#include "pg/formal.hpp"
#include "pg/genfun.hpp"
#include "pg/graphs.hpp"
#include "pg/psm.hpp"
#include "pg/realization.hpp"
#include "pg/trees.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace pg;

namespace {

struct Outcome {
  double worst = 0.0;     // max observed error
  double threshold = 0.0;
  std::string note;
  bool extra_ok = true;   // structural checks beyond the error bound
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<PoissonStructure>& probe_structures() {
  static const std::vector<PoissonStructure> s{moyal2d(), quadratic2d(), quadratic3d(), so3_structure(),
                                               affine2_structure()};
  return s;
}

// Covector with norm at most r from a probe point in [-1,1]^d.
Vec in_ball(const Vec& q, double r) { return r * q / std::sqrt(double(q.size())); }

std::vector<GenfunPoint> generators(int d, int n, double r, std::uint64_t seed) {
  const auto a = probe_grid(d, n, seed), b = probe_grid(d, n, seed + n), c = probe_grid(d, n, seed + 2 * n);
  std::vector<GenfunPoint> out;
  for (int k = 0; k < n; ++k) out.push_back({in_ball(a[k], r), in_ball(b[k], r), c[k]});
  return out;
}

double maxabs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void track(Outcome& o, double e) { o.worst = std::max(o.worst, std::isfinite(e) ? e : INFINITY); }

const std::uint64_t kSeed = seed_from_env(kDefaultSeed);

Outcome c1_constant() {
  Outcome o{0, 1e-7, "20 probes, |p| <= 0.3"};
  const PoissonStructure P = moyal2d();
  for (const GenfunPoint& g : generators(2, 20, 0.3, kSeed)) {
    const double exact = (g.p1 + g.p2).dot(g.x) + 0.5 * g.p1.dot(eval_pi(P, g.x) * g.p2);
    track(o, std::abs(genfun_S(P, g) - exact));
  }
  return o;
}

Outcome c2_bch() {
  Outcome o{0, 1e-6, "so(3) and aff(2), 20 probes each, |p| <= 0.2"};
  for (const StructureConstants& c : {StructureConstants::so3(), StructureConstants::affine2()})
    for (const GenfunPoint& g : generators(c.dim, 20, 0.2, kSeed + 100))
      track(o, compare_linear_case(c, g.p1, g.p2, g.x).diff);
  return o;
}

Outcome c3_sga() {
  Outcome o{0, 1e-6, "pi^12 = x1 x2, 20 probes, |p| <= 0.1"};
  const PoissonStructure P = quadratic2d();
  const auto gs = generators(2, 20, 0.1, kSeed + 200);
  const auto p3 = probe_grid(2, 20, kSeed + 260);
  for (int k = 0; k < 20; ++k) track(o, sga_residual(P, gs[k].p1, gs[k].p2, in_ball(p3[k], 0.1), gs[k].x).residual);
  return o;
}

Outcome c4_pi_extraction() {
  Outcome o{0, 1e-5, "5 structures x 3 points"};
  for (const PoissonStructure& P : probe_structures())
    for (const Vec& x : probe_grid(P.dim(), 3, kSeed + 300))
      track(o, (pi_from_S(P, x) - eval_pi(P, x)).cwiseAbs().maxCoeff());
  return o;
}

Outcome c5_naturality() {
  Outcome o{0, 1e-7, "5 structures, t, lambda in {0.25, 0.5, 1}"};
  const double vals[] = {0.25, 0.5, 1.0};
  for (const PoissonStructure& P : probe_structures()) {
    const GenfunPoint g = generators(P.dim(), 1, 0.3, kSeed + 400)[0];
    for (double t : vals) {
      const PoissonStructure Pt = P.scaled(t);
      for (double lam : vals) {
        const double lhs = genfun_S(Pt, {lam * g.p1, lam * g.p2, g.x});
        const double rhs = lam * genfun_S(P.scaled(lam * t), g);
        track(o, std::abs(lhs - rhs));
      }
      track(o, std::abs(genfun_S(Pt, {g.p1, g.p1, g.x}) - 2 * g.p1.dot(g.x)));
    }
  }
  return o;
}

Outcome c6_cross_route() {
  Outcome o{0, 1e-7, "5 structures x 4 points"};
  for (const PoissonStructure& P : probe_structures())
    for (const GenfunPoint& g : generators(P.dim(), 4, 0.3, kSeed + 500)) {
      const Route2Result r = genfun_S_route2(P, g.p1, g.p2, g.x);
      track(o, std::abs(genfun_S(P, r.point) - r.value));
    }
  return o;
}

Outcome c7_taylor() {
  Outcome o{0, 1e-5, "5 structures x 2 points, fit order 4"};
  for (const PoissonStructure& P : probe_structures())
    for (const GenfunPoint& g : generators(P.dim(), 2, 0.3, kSeed + 600)) {
      const TaylorFit f = taylor_coeffs_S(P, g.p1, g.p2, g.x, 4);
      track(o, std::abs(f.coefficients[1] - 0.5 * g.p1.dot(eval_pi(P, g.x) * g.p2)));
    }
  return o;
}

Outcome c8_trees() {
  Outcome o{0, 1e-9, "n <= 5, 3 random quadratic fields on R^2 and R^3, 4 points each"};
  const int expected[] = {1, 1, 2, 4, 9};
  for (int n = 1; n <= 5; ++n) o.extra_ok &= static_cast<int>(enumerate_trees(n).size()) == expected[n - 1];
  std::mt19937 gen(static_cast<unsigned>(kSeed));
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int m : {2, 3})
    for (int f = 0; f < 3; ++f) {
      PolyVectorField X{m, {}};
      for (int u = 0; u < m; ++u) {
        Polynomial p(m);
        for (int a = 0; a < m; ++a)
          for (int b = a; b < m; ++b) {
            Exponents e(m, 0);
            ++e[a];
            ++e[b];
            p.add_term(e, coef(gen));
          }
        for (int a = 0; a < m; ++a) {
          Exponents e(m, 0);
          e[a] = 1;
          p.add_term(e, coef(gen));
        }
        p.add_term(Exponents(m, 0), coef(gen));
        X.comps.push_back(p);
      }
      for (const Vec& x : probe_grid(m, 4, kSeed + 700 + f)) {
        const std::vector<double> xs(x.data(), x.data() + m);
        for (int n = 1; n <= 5; ++n)
          for (int i = 0; i < m; ++i) {
            const LieCheck c = iterated_lie_check(X, n, xs, i);
            track(o, std::abs(c.lhs - c.rhs) / std::max(1.0, std::abs(c.lhs)));
          }
      }
    }
  o.note += o.extra_ok ? "; counts 1,1,2,4,9" : "; tree counts WRONG";
  return o;
}

Outcome c9_graphs() {
  Outcome o{0, 1e-9, ""};
  const Network rho = example_network();
  o.extra_ok &= network_graph(rho).canonical() == example_graph().canonical();
  const NetworkGraph fig = network_to_kgraph(rho);
  o.extra_ok &= fig.sign == -1 && fig.rule_sign == -1;
  track(o, fig.max_abs_mismatch);
  int checked = 0, degenerate = 0;
  for (const Network& r : enumerate_networks(3)) {
    try {
      const NetworkGraph ng = network_to_kgraph(r);
      track(o, ng.max_abs_mismatch);
      o.extra_ok &= ng.graph.interior_is_tree() && ng.sign == ng.rule_sign;
      ++checked;
    } catch (const std::domain_error&) {
      ++degenerate;
    }
  }
  o.note = "worked example sign " + std::to_string(fig.sign) + "; " + std::to_string(checked) +
           " networks |rho| <= 3 match the rule sign, " + std::to_string(degenerate) + " degenerate skipped";
  if (!o.extra_ok) o.note += "; graph or sign mismatch";
  return o;
}

Outcome c10_psm() {
  Outcome o{0, 1e-4, "5 structures x 20 probes, |p| <= 0.1"};
  double worst_exact = 0.0;
  for (const PoissonStructure& P : probe_structures())
    for (const GenfunPoint& g : generators(P.dim(), 20, 0.1, kSeed + 1000)) {
      const Triangle T = build_triangle(P, g.p1, g.p2, g.x);
      const double A = psm_action(P, T);
      track(o, std::abs(A - genfun_S(P, g)));
      if (P.kind() == StructureKind::constant)
        worst_exact = std::max(worst_exact, std::abs(A - (g.p1 + g.p2).dot(g.x) - 0.5 * g.p1.dot(eval_pi(P, g.x) * g.p2)));
    }
  // The constant-pi example of the closed form, outside the small-p regime.
  TriangleConfig tc;
  tc.genfun.real.germ_radius = 0.0;
  Vec p1(2), p2(2), x(2);
  p1 << 1, 0;
  p2 << 0, 1;
  x << 1, 2;
  worst_exact = std::max(worst_exact, std::abs(psm_action(moyal2d(), build_triangle(moyal2d(), p1, p2, x, tc), 16, tc.genfun) - 3.5));
  o.extra_ok = worst_exact < 1e-6;
  char buf[96];
  std::snprintf(buf, sizeof buf, "; constant-pi closed form err %.2e (< 1e-06)", worst_exact);
  o.note += buf;
  return o;
}

Outcome c11_cocycle() {
  Outcome o{0, 1e-5, "constant and quadratic, 3 points, t in {0.5, 1}"};
  for (const PoissonStructure& P : {moyal2d(), quadratic2d(), quadratic3d()})
    for (const GenfunPoint& g : generators(P.dim(), 3, 0.3, kSeed + 1100))
      for (double t : {0.5, 1.0}) track(o, cocycle_integral(P, g, t).diff);
  return o;
}

Outcome c12_realization() {
  Outcome o{0, 1e-5, ""};
  double poisson = 0.0, invariance = 0.0, laws = 0.0;
  for (const PoissonStructure& P : probe_structures()) {
    const int d = P.dim();
    for (const GenfunPoint& g : generators(d, 4, 0.2, kSeed + 1200)) {
      Vec f = Vec::Zero(d), h = Vec::Zero(d);
      f[0] = 1.0;
      h[d - 1] = 1.0;
      f += 0.3 * g.p2;
      poisson = std::max(poisson, realization_poisson_residual(P, g.x, g.p1, f, h));
      for (double t : {0.0, 0.5, 1.0}) {
        const Vec a = alpha(P, g.x, t * g.p1);
        invariance = std::max(invariance, std::abs(g.p1.dot(a) - g.p1.dot(g.x)));
        invariance = std::max(invariance, maxabs(alpha(P.scaled(t), g.x, g.p1) - a));
      }
      const PhasePoint z{g.x, g.p1};
      const PhasePoint r = multiply(P, z, {alpha(P, z.x, z.p), zeros(d)});
      laws = std::max({laws, maxabs(r.x - z.x), maxabs(r.p - z.p)});
      const PhasePoint l = multiply(P, {beta(P, z.x, z.p), zeros(d)}, z);
      laws = std::max({laws, maxabs(l.x - z.x), maxabs(l.p - z.p)});
      const PhasePoint i = multiply(P, z, inversion(z));
      laws = std::max({laws, maxabs(i.x - beta(P, z.x, z.p)), maxabs(i.p)});
    }
  }
  o.worst = poisson;
  o.extra_ok = invariance < 1e-9 && laws < 1e-6;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Poisson map (bound 1e-05); invariance/rescaling %.2e (< 1e-09); unit/inverse laws %.2e (< 1e-06)",
                invariance, laws);
  o.note = buf;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "constant-pi closed form", c1_constant},
      {2, "BCH oracle (linear pi)", c2_bch},
      {3, "SGA residual (quadratic pi)", c3_sga},
      {4, "pi extraction from S", c4_pi_extraction},
      {5, "naturality identities", c5_naturality},
      {6, "cross-route evaluation", c6_cross_route},
      {7, "Taylor order 1", c7_taylor},
      {8, "tree calculus", c8_trees},
      {9, "graph symbols", c9_graphs},
      {10, "sigma-model action reproduces S", c10_psm},
      {11, "cocycle integral", c11_cocycle},
      {12, "realization properties", c12_realization},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::string error;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = error.empty() && o.worst < o.threshold && o.extra_ok;
    failed += !pass;
    if (!error.empty())
      std::printf("[FAIL] criterion %2d  %-34s exception: %s (%.1fs)\n", c.id, c.name, error.c_str(), secs);
    else
      std::printf("[%s] criterion %2d  %-34s max err %.2e (< %.0e)  %s (%.1fs)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                  o.worst, o.threshold, o.note.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
