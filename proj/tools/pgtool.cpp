// Command-line front end: one subcommand per module, JSON-lines output.
#include "pg/exec.hpp"
#include "pg/formal.hpp"
#include "pg/genfun.hpp"
#include "pg/graphs.hpp"
#include "pg/io.hpp"
#include "pg/psm.hpp"
#include "pg/realization.hpp"
#include "pg/trees.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#ifndef PG_DATA_DIR
#define PG_DATA_DIR "data"
#endif

using nlohmann::json;
using namespace pg;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Doubles are cut to 15 significant digits before serialization so that the
// text is stable across platforms.
double round15(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json rounded(const json& j) {
  if (j.is_number_float()) return round15(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const PhasePoint& z) { return {{"x", to_json(z.x)}, {"p", to_json(z.p)}}; }

Vec parse_vec(const std::string& text, int dim, const char* name) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + name + ": cannot parse '" + item + "'");
    }
  }
  if (dim > 0 && static_cast<int>(v.size()) != dim)
    throw UsageError(std::string("--") + name + ": expected " + std::to_string(dim) + " components");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

// Record sink: JSON lines, or CSV with a header per distinct key set.
class Emitter {
 public:
  Emitter(std::ostream& os, std::string format) : os_(os), format_(std::move(format)) {}

  void emit(const json& record) {
    const json r = rounded(record);
    if (format_ == "json") {
      os_ << r.dump() << '\n';
      return;
    }
    std::vector<std::pair<std::string, std::string>> cells;
    flatten("", r, cells);
    std::string header;
    for (size_t k = 0; k < cells.size(); ++k) header += (k ? "," : "") + cells[k].first;
    if (header != last_header_) os_ << header << '\n';
    last_header_ = header;
    for (size_t k = 0; k < cells.size(); ++k) os_ << (k ? "," : "") << cells[k].second;
    os_ << '\n';
  }

 private:
  static void flatten(const std::string& key, const json& j, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) flatten(key.empty() ? it.key() : key + "." + it.key(), *it, out);
    } else if (j.is_array()) {
      for (size_t i = 0; i < j.size(); ++i) flatten(key + "_" + std::to_string(i), j[i], out);
    } else if (j.is_string()) {
      out.emplace_back(key, j.get<std::string>());
    } else {
      out.emplace_back(key, j.dump());
    }
  }

  std::ostream& os_;
  std::string format_;
  std::string last_header_;
};

struct Globals {
  std::string structure;
  std::optional<double> germ_radius;  // default 0.5; unbounded for constant structures
  int steps = 64;
  double newton_tol = 1e-11;
  std::string output;
  std::string format = "json";
  bool parallel = false;
  std::uint64_t seed = kDefaultSeed;
};

PoissonStructure require_structure(const Globals& g) {
  if (g.structure.empty()) throw UsageError("--structure is required");
  std::filesystem::path p(g.structure);
  if (!std::filesystem::exists(p)) {
    const std::filesystem::path shipped = std::filesystem::path(PG_DATA_DIR) / "structures" / p.filename();
    if (std::filesystem::exists(shipped)) p = shipped;
    else if (std::filesystem::exists(shipped.string() + ".json")) p = shipped.string() + ".json";
  }
  try {
    return load_structure(p.string());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

GenfunConfig genfun_config(const Globals& g) {
  GenfunConfig c;
  // Constant pi has a global groupoid, so the germ bound only applies when asked for.
  if (g.germ_radius) c.real.germ_radius = *g.germ_radius;
  else if (!g.structure.empty() && require_structure(g).kind() == StructureKind::constant) c.real.germ_radius = 0.0;
  else c.real.germ_radius = 0.5;
  c.real.ode.steps = g.steps;
  c.real.newton.tol = g.newton_tol;
  return c;
}

ExecPolicy policy(const Globals& g) { return g.parallel ? ExecPolicy::parallel : ExecPolicy::serial; }

// Points for --random mode: three disjoint runs of the seeded probe sequence, covectors scaled into the ball.
std::vector<GenfunPoint> random_points(int d, int n, double scale, std::uint64_t seed) {
  const std::vector<Vec> a = probe_grid(d, n, seed), b = probe_grid(d, n, seed + n), c = probe_grid(d, n, seed + 2 * n);
  const double f = scale / std::sqrt(double(d));
  std::vector<GenfunPoint> out;
  for (int k = 0; k < n; ++k) out.push_back({f * a[k], f * b[k], c[k]});
  return out;
}

StructureConstants algebra_by_name(const std::string& name) {
  if (name == "so3") return StructureConstants::so3();
  if (name == "affine2") return StructureConstants::affine2();
  throw UsageError("--algebra must be so3 or affine2");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson groupoid generating functions: numerical tools"};
  app.require_subcommand(1);
  Globals g;
  g.seed = seed_from_env(kDefaultSeed);
  app.fallthrough();
  app.add_option("--structure", g.structure, "structure JSON file (shipped names resolve to data/structures)");
  app.add_option("--germ-radius", g.germ_radius, "covector radius bound, <= 0 disables (default 0.5, none for constant pi)");
  app.add_option("--steps", g.steps, "RK4 steps per unit time")->check(CLI::Range(8, 100000));
  app.add_option("--newton-tol", g.newton_tol, "realization Newton tolerance");
  app.add_option("--output,-o", g.output, "output file (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--parallel", g.parallel, "OpenMP worker pool over independent points");
  app.add_option("--seed", g.seed, "probe seed (default from GENFUN_SEED)");

  std::string x_s, p_s, p1_s, p2_s, p3_s, graph_s, network_s, algebra = "so3";
  int n = 5, order = 2, K = 12, grid = 16, samples = 16, random = 0, enumerate = 0;
  double scale = 0.2, t_radius = 0.3, tol = 1e-6;
  bool list = false, beta_flag = false, derivatives = false, route2 = false, use_example = false;
  std::string csv_path;

  auto* alpha_cmd = app.add_subcommand("alpha", "Karasev realization alpha(x, p)");
  alpha_cmd->add_option("--x", x_s)->required();
  alpha_cmd->add_option("--p", p_s)->required();
  alpha_cmd->add_flag("--beta", beta_flag, "evaluate beta(x, p) = alpha(x, -p)");

  auto* genfun_cmd = app.add_subcommand("genfun", "generating function S(p1, p2, x)");
  genfun_cmd->add_option("--p1", p1_s);
  genfun_cmd->add_option("--p2", p2_s);
  genfun_cmd->add_option("--x", x_s);
  genfun_cmd->add_flag("--derivatives", derivatives, "also emit dS");
  genfun_cmd->add_flag("--route2", route2, "independent evaluation; --x is read as x1");
  genfun_cmd->add_option("--random", random, "evaluate at N seeded random points instead");
  genfun_cmd->add_option("--scale", scale, "covector scale for --random");

  auto* sga_cmd = app.add_subcommand("sga", "associativity residual");
  sga_cmd->add_option("--p1", p1_s)->required();
  sga_cmd->add_option("--p2", p2_s)->required();
  sga_cmd->add_option("--p3", p3_s)->required();
  sga_cmd->add_option("--x", x_s)->required();
  sga_cmd->add_option("--tol", tol, "exit 2 when the residual is not below this");

  auto* taylor_cmd = app.add_subcommand("taylor", "Taylor coefficients of t -> S_{t pi}");
  taylor_cmd->add_option("--p1", p1_s)->required();
  taylor_cmd->add_option("--p2", p2_s)->required();
  taylor_cmd->add_option("--x", x_s)->required();
  taylor_cmd->add_option("--order", order)->check(CLI::Range(0, 4));
  taylor_cmd->add_option("--t-radius", t_radius);

  auto* trees_cmd = app.add_subcommand("trees", "rooted trees with n vertices");
  trees_cmd->add_option("--n", n)->check(CLI::Range(1, 8));
  trees_cmd->add_flag("--list", list, "one record per tree");

  auto* kgraph_cmd = app.add_subcommand("kgraph", "Kontsevich graph symbol");
  kgraph_cmd->alias("kgraph-symbol");
  kgraph_cmd->add_option("--graph", graph_s, "graph JSON file");
  kgraph_cmd->add_flag("--example", use_example, "use the worked-example graph");
  kgraph_cmd->add_option("--p1", p1_s);
  kgraph_cmd->add_option("--p2", p2_s);
  kgraph_cmd->add_option("--x", x_s);
  kgraph_cmd->add_option("--enumerate", enumerate, "list T_{n,2} instead");

  auto* network_cmd = app.add_subcommand("network", "network of rooted trees to Kontsevich graph");
  network_cmd->alias("network-map");
  network_cmd->add_option("--network", network_s, "network JSON file");
  network_cmd->add_flag("--example", use_example, "use the worked-example network");
  network_cmd->add_option("--enumerate", enumerate, "map every network with |rho| <= N")->check(CLI::Range(1, 4));

  auto* bch_cmd = app.add_subcommand("bch", "log(exp(p1) exp(p2)) and the linear-case comparison");
  bch_cmd->add_option("--algebra", algebra, "so3 or affine2");
  bch_cmd->add_option("--p1", p1_s)->required();
  bch_cmd->add_option("--p2", p2_s)->required();
  bch_cmd->add_option("--x", x_s, "also compare S_pi(p1,p2,x) with BCH . x");
  bch_cmd->add_option("--K", K, "ad-series truncation")->check(CLI::Range(8, 40));

  auto* triangle_cmd = app.add_subcommand("triangle", "build a triangle and check its boundary");
  triangle_cmd->add_option("--p1", p1_s)->required();
  triangle_cmd->add_option("--p2", p2_s)->required();
  triangle_cmd->add_option("--x", x_s)->required();
  triangle_cmd->add_option("--samples", samples)->check(CLI::Range(4, 64));
  triangle_cmd->add_option("--grid", grid)->check(CLI::Range(16, 256));
  triangle_cmd->add_option("--csv", csv_path, "write the (t, s, X, eta) grid here");

  auto* psm_cmd = app.add_subcommand("psm", "modified sigma-model action on the triangle");
  psm_cmd->add_option("--p1", p1_s)->required();
  psm_cmd->add_option("--p2", p2_s)->required();
  psm_cmd->add_option("--x", x_s)->required();
  psm_cmd->add_option("--samples", samples)->check(CLI::Range(4, 64));
  psm_cmd->add_option("--grid", grid)->check(CLI::IsMember({2, 4, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::unique_ptr<std::ofstream> file;
  if (!g.output.empty()) {
    file = std::make_unique<std::ofstream>(g.output);
    if (!*file) {
      std::cerr << "cannot open " << g.output << "\n";
      return 1;
    }
  }
  std::ostream& os = file ? *file : std::cout;
  Emitter out(os, g.format);

  try {
    const GenfunConfig cfg = genfun_config(g);

    if (*alpha_cmd) {
      const PoissonStructure P = require_structure(g);
      const Vec x = parse_vec(x_s, P.dim(), "x");
      const Vec p = parse_vec(p_s, P.dim(), "p");
      const AlphaJet j = alpha_jet(P, x, beta_flag ? Vec(-p) : p, cfg.real);
      out.emit({{beta_flag ? "beta" : "alpha", to_json(j.value)}, {"iterations", j.iterations}, {"residual", j.residual}});
    } else if (*genfun_cmd) {
      const PoissonStructure P = require_structure(g);
      const int d = P.dim();
      if (random > 0) {
        const std::vector<GenfunPoint> pts = random_points(d, random, scale, g.seed);
        std::vector<double> S(pts.size());
        for_each_index(random, policy(g), [&](int k) { S[k] = genfun_S(P, pts[k], cfg); });
        for (int k = 0; k < random; ++k)
          out.emit({{"index", k}, {"p1", to_json(pts[k].p1)}, {"p2", to_json(pts[k].p2)}, {"x", to_json(pts[k].x)}, {"S", S[k]}});
      } else {
        if (p1_s.empty() || p2_s.empty() || x_s.empty()) throw UsageError("genfun needs --p1, --p2 and --x (or --random)");
        const Vec p1 = parse_vec(p1_s, d, "p1"), p2 = parse_vec(p2_s, d, "p2"), x = parse_vec(x_s, d, "x");
        if (route2) {
          const Route2Result r = genfun_S_route2(P, p1, p2, x, cfg);
          const double S = genfun_S(P, r.point, cfg);
          out.emit({{"point", {{"p1", to_json(r.point.p1)}, {"p2", to_json(r.point.p2)}, {"x", to_json(r.point.x)}}},
                    {"S_route2", r.value}, {"S", S}, {"diff", std::abs(S - r.value)}});
        } else {
          const GenfunSolution s = genfun_solve(P, {p1, p2, x}, cfg);
          json rec{{"S", s.S}};
          if (derivatives)
            rec["dS"] = {{"dp1", to_json(s.d.dp1)}, {"dp2", to_json(s.d.dp2)}, {"dx", to_json(s.d.dx)}};
          out.emit(rec);
        }
      }
    } else if (*sga_cmd) {
      const PoissonStructure P = require_structure(g);
      const int d = P.dim();
      const SgaSolveReport r = sga_residual(P, parse_vec(p1_s, d, "p1"), parse_vec(p2_s, d, "p2"),
                                            parse_vec(p3_s, d, "p3"), parse_vec(x_s, d, "x"), cfg);
      out.emit({{"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}, {"iterations", r.iterations},
                {"xbar", to_json(r.xbar)}, {"pbar", to_json(r.pbar)}, {"xtilde", to_json(r.xtilde)},
                {"ptilde", to_json(r.ptilde)}, {"pass", r.residual < tol}});
      if (!(r.residual < tol)) return 2;
    } else if (*taylor_cmd) {
      const PoissonStructure P = require_structure(g);
      const int d = P.dim();
      TaylorConfig tc;
      tc.t_radius = t_radius;
      tc.policy = policy(g);
      const TaylorFit f = taylor_coeffs_S(P, parse_vec(p1_s, d, "p1"), parse_vec(p2_s, d, "p2"),
                                          parse_vec(x_s, d, "x"), order, tc, cfg);
      out.emit({{"coefficients", f.coefficients}, {"diagnostics", f.diagnostics}, {"residual", f.residual},
                {"t_radius", f.t_radius}, {"nodes", f.nodes}});
    } else if (*trees_cmd) {
      const std::vector<RootedTree> ts = enumerate_trees(n);
      if (list) {
        for (const RootedTree& t : ts) {
          const Rational a = aprime_coefficient(t);
          out.emit({{"tree", t.to_string()}, {"sigma", sigma(t)}, {"factorial", tree_factorial(t)},
                    {"aprime", std::to_string(a.numerator()) + "/" + std::to_string(a.denominator())}});
        }
      } else {
        out.emit({{"n", n}, {"count", ts.size()}});
      }
    } else if (*kgraph_cmd) {
      if (enumerate > 0) {
        for (const KontsevichGraph& G : enumerate_kontsevich_trees(enumerate)) out.emit(kgraph_to_json(G));
        return 0;
      }
      const PoissonStructure P = require_structure(g);
      const int d = P.dim();
      KontsevichGraph G;
      if (use_example) G = example_graph();
      else if (!graph_s.empty()) {
        std::ifstream in(graph_s);
        if (!in) throw UsageError("cannot open " + graph_s);
        G = kgraph_from_json(json::parse(in));
      } else throw UsageError("kgraph needs --graph or --example");
      if (p1_s.empty() || p2_s.empty() || x_s.empty()) throw UsageError("kgraph needs --p1, --p2 and --x");
      const double B = kgraph_symbol(G, P, {parse_vec(p1_s, d, "p1"), parse_vec(p2_s, d, "p2")}, parse_vec(x_s, d, "x"));
      out.emit({{"graph", G.to_string()}, {"symbol", B}});
    } else if (*network_cmd) {
      auto record = [&](const Network& rho) {
        json rec{{"network", rho.to_string()}, {"size", rho.size()}};
        try {
          const NetworkGraph ng = network_to_kgraph(rho);
          rec["graph"] = kgraph_to_json(ng.graph);
          rec["sign"] = ng.sign;
          rec["rule_sign"] = ng.rule_sign;
          rec["max_abs_mismatch"] = ng.max_abs_mismatch;
          rec["degenerate"] = false;
        } catch (const std::domain_error&) {
          rec["degenerate"] = true;
        }
        return rec;
      };
      if (enumerate > 0) {
        const std::vector<Network> all = enumerate_networks(enumerate);
        std::vector<json> recs(all.size());
        for_each_index(static_cast<int>(all.size()), policy(g), [&](int k) { recs[k] = record(all[k]); });
        for (const json& r : recs) out.emit(r);
      } else {
        Network rho;
        if (use_example) rho = example_network();
        else if (!network_s.empty()) {
          std::ifstream in(network_s);
          if (!in) throw UsageError("cannot open " + network_s);
          rho = network_from_json(json::parse(in));
        } else throw UsageError("network needs --network, --example or --enumerate");
        out.emit(record(rho));
      }
    } else if (*bch_cmd) {
      const StructureConstants c = algebra_by_name(algebra);
      const Vec p1 = parse_vec(p1_s, c.dim, "p1"), p2 = parse_vec(p2_s, c.dim, "p2");
      json rec{{"bch", to_json(bch_numeric(c, p1, p2, K))}};
      if (!x_s.empty()) {
        const LinearComparison lc = compare_linear_case(c, p1, p2, parse_vec(x_s, c.dim, "x"), 1.0, cfg);
        rec["S"] = lc.S_numeric;
        rec["S_bch"] = lc.S_bch;
        rec["diff"] = lc.diff;
      }
      out.emit(rec);
    } else if (*triangle_cmd || *psm_cmd) {
      const PoissonStructure P = require_structure(g);
      const int d = P.dim();
      const Vec p1 = parse_vec(p1_s, d, "p1"), p2 = parse_vec(p2_s, d, "p2"), x = parse_vec(x_s, d, "x");
      TriangleConfig tc;
      tc.genfun = cfg;
      tc.samples = samples;
      tc.policy = policy(g);
      const Triangle T = build_triangle(P, p1, p2, x, tc);
      if (*triangle_cmd) {
        const BoundaryReport b = triangle_boundary_check(P, T, cfg);
        const EdgeElements e = edge_elements(P, T, cfg);
        json rec{{"y", to_json(T.y)}, {"p3", to_json(T.p3)}, {"y_residual", T.y_residual},
                 {"boundary", {{"identity", b.identity}, {"edge1", b.edge1}, {"edge2", b.edge2}, {"edge3", b.edge3},
                               {"corner", b.corner}, {"max", b.max}}},
                 {"g1", to_json(e.g1)}, {"g2", to_json(e.g2)}, {"g3", to_json(e.g3)}};
        if (!csv_path.empty()) {
          const PsmField F = triangle_field(P, T, grid, cfg, policy(g));
          std::ofstream csv(csv_path);
          if (!csv) throw UsageError("cannot open " + csv_path);
          F.write_csv(csv);
          rec["lsq_residual"] = F.lsq_residual;
        }
        out.emit(rec);
      } else {
        const PsmActionReport r = psm_action_report(P, T, grid, cfg, policy(g));
        const double S = genfun_S(P, {p1, p2, x}, cfg);
        out.emit({{"action", r.action}, {"bulk", r.bulk}, {"bulk_pi_form", r.bulk_pi_form}, {"boundary", r.boundary},
                  {"lsq_residual", r.lsq_residual}, {"S", S}, {"diff", std::abs(r.action - S)}});
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const OutsideLocalDomain& e) {
    out.emit({{"error", e.what()}, {"residual", e.residual()}});
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    out.emit({{"error", e.what()}, {"exit_time", e.exit_time()}});
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    out.emit({{"error", e.what()}});
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
