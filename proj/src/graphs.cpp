#include "pg/graphs.hpp"

#include "pg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pg {

// ---------------------------------------------------------------- graphs

void KontsevichGraph::validate() const {
  if (n_aerial < 1) throw std::invalid_argument("kgraph: need at least one aerial vertex");
  if (m_terrestrial < 0) throw std::invalid_argument("kgraph: negative terrestrial count");
  if (static_cast<int>(out.size()) != n_aerial) throw std::invalid_argument("kgraph: one edge pair per aerial vertex");
  const int total = n_aerial + m_terrestrial;
  for (int k = 0; k < n_aerial; ++k)
    for (int t : out[k]) {
      if (t < 0 || t >= total) throw std::invalid_argument("kgraph: edge target out of range");
      if (t == k) throw std::invalid_argument("kgraph: loop at aerial vertex " + std::to_string(k));
    }
}

bool KontsevichGraph::interior_is_tree() const {
  const int n = n_aerial;
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int a) { return comp[a] == a ? a : comp[a] = find(comp[a]); };
  int edges = 0;
  for (int k = 0; k < n; ++k)
    for (int t : out[k]) {
      if (t >= n) continue;
      ++edges;
      const int a = find(k), b = find(t);
      if (a == b) return false;  // cycle or doubled edge
      comp[a] = b;
    }
  return edges == n - 1;
}

KontsevichGraph KontsevichGraph::canonical() const {
  const int n = n_aerial;
  std::vector<int> perm(n);  // perm[old] = new
  std::iota(perm.begin(), perm.end(), 0);
  KontsevichGraph best = *this;
  bool first = true;
  do {
    KontsevichGraph g{n, m_terrestrial, std::vector<std::array<int, 2>>(n)};
    for (int k = 0; k < n; ++k)
      for (int s = 0; s < 2; ++s) {
        const int t = out[k][s];
        g.out[perm[k]][s] = t < n ? perm[t] : t;
      }
    if (first || g.out < best.out) best = g;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::string KontsevichGraph::to_string() const {
  std::ostringstream os;
  os << "{n=" << n_aerial << ",m=" << m_terrestrial << ":";
  for (int k = 0; k < n_aerial; ++k) os << (k ? " " : "") << k << "->(" << out[k][0] << "," << out[k][1] << ")";
  os << "}";
  return os.str();
}

std::vector<KontsevichGraph> enumerate_kontsevich_trees(int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("enumerate_kontsevich_trees: n must be in [1, 4]");
  const int total = n + 2;
  std::set<KontsevichGraph> seen;
  KontsevichGraph g{n, 2, std::vector<std::array<int, 2>>(n)};
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      if (g.interior_is_tree()) seen.insert(g.canonical());
      return;
    }
    for (int a = 0; a < total; ++a)
      for (int b = 0; b < total; ++b) {
        if (a == k || b == k || a == b) continue;
        g.out[k] = {a, b};
        rec(k + 1);
      }
  };
  rec(0);
  return {seen.begin(), seen.end()};
}

namespace {

// Index-sum evaluator shared by both symbols: variables take values in
// [0, d), factors read them. Derivative polynomials are cached per call.
class PiDerivCache {
 public:
  PiDerivCache(const PoissonStructure& P, const Vec& x) : P_(P), x_(x) {}

  double value(int i, int j, const Exponents& e) {
    auto key = std::make_tuple(i, j, e);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = P_.component(i, j).derivative(e).eval(x_.data());
    cache_.emplace(key, v);
    return v;
  }

 private:
  const PoissonStructure& P_;
  const Vec& x_;
  std::map<std::tuple<int, int, Exponents>, double> cache_;
};

template <class F>
double sum_over_assignments(int nvars, int d, F&& term) {
  std::vector<int> idx(nvars, 0);
  double total = 0.0;
  for (;;) {
    total += term(idx);
    int k = 0;
    while (k < nvars && ++idx[k] == d) idx[k++] = 0;
    if (k == nvars) break;
  }
  return total;
}

}  // namespace

double kgraph_symbol(const KontsevichGraph& G, const PoissonStructure& P, const std::vector<Vec>& p_list,
                     const Vec& x) {
  G.validate();
  const int d = P.dim();
  if (static_cast<int>(p_list.size()) != G.m_terrestrial)
    throw std::invalid_argument("kgraph_symbol: need one covector per terrestrial vertex");
  for (const auto& p : p_list)
    if (p.size() != d) throw std::invalid_argument("kgraph_symbol: covector dimension mismatch");
  const int n = G.n_aerial;
  // Edge 2k + s is out[k][s]; incoming lists per vertex.
  std::vector<std::vector<int>> incoming(n + G.m_terrestrial);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < 2; ++s) incoming[G.out[k][s]].push_back(2 * k + s);
  PiDerivCache cache(P, x);
  return sum_over_assignments(2 * n, d, [&](const std::vector<int>& I) {
    double w = 1.0;
    for (int t = 0; t < G.m_terrestrial && w != 0.0; ++t)
      for (int e : incoming[n + t]) w *= p_list[t][I[e]];
    for (int k = 0; k < n && w != 0.0; ++k) {
      const int a = I[2 * k], b = I[2 * k + 1];
      if (a == b) return 0.0;
      Exponents ex(d, 0);
      for (int e : incoming[k]) ex[I[e]] += 1;
      w *= cache.value(a, b, ex);
    }
    return w;
  });
}

// ---------------------------------------------------------------- networks

int Network::size() const {
  int s = 0;
  for (const auto& t : tree_parent) s += static_cast<int>(t.size());
  return s;
}

int Network::global_index(int skel, int local) const {
  int off = 0;
  for (int v = 0; v < skel; ++v) off += static_cast<int>(tree_parent[v].size());
  return off + local;
}

std::pair<int, int> Network::edge_ends(int v) const {
  const int par = skeleton_parent.at(v);
  return toward_root.at(v) ? std::make_pair(v, par) : std::make_pair(par, v);
}

void Network::validate() const {
  const int S = skeleton_size();
  if (S < 1) throw std::invalid_argument("network: empty skeleton");
  if (static_cast<int>(toward_root.size()) != S || static_cast<int>(tree_parent.size()) != S ||
      static_cast<int>(anchors.size()) != S)
    throw std::invalid_argument("network: per-vertex arrays must match the skeleton size");
  if (skeleton_parent[0] != -1) throw std::invalid_argument("network: skeleton vertex 0 must be the root");
  for (int v = 1; v < S; ++v)
    if (skeleton_parent[v] < 0 || skeleton_parent[v] >= v)
      throw std::invalid_argument("network: skeleton parents must precede children");
  for (int v = 0; v < S; ++v) {
    const auto& t = tree_parent[v];
    if (t.empty() || t[0] != -1) throw std::invalid_argument("network: every tree needs a root at local vertex 0");
    for (size_t u = 1; u < t.size(); ++u)
      if (t[u] < 0 || t[u] >= static_cast<int>(u))
        throw std::invalid_argument("network: tree parents must precede children");
  }
  for (int v = 1; v < S; ++v) {
    const auto [src, tgt] = edge_ends(v);
    if (anchors[v][0] < 0 || anchors[v][0] >= static_cast<int>(tree_parent[src].size()) || anchors[v][1] < 0 ||
        anchors[v][1] >= static_cast<int>(tree_parent[tgt].size()))
      throw std::invalid_argument("network: anchor out of range on the edge above skeleton vertex " +
                                  std::to_string(v));
  }
  if (mark && (mark->vertex < 0 || mark->vertex >= static_cast<int>(tree_parent[0].size())))
    throw std::invalid_argument("network: marked vertex must lie in the root tree");
}

std::string Network::to_string() const {
  std::ostringstream os;
  os << "{skeleton:";
  for (int v = 0; v < skeleton_size(); ++v) os << (v ? "," : "") << skeleton_parent[v];
  os << " trees:";
  for (int v = 0; v < skeleton_size(); ++v) {
    os << (v ? "|" : "");
    for (size_t u = 0; u < tree_parent[v].size(); ++u) os << (u ? "," : "") << tree_parent[v][u];
  }
  os << " edges:";
  for (int v = 1; v < skeleton_size(); ++v) {
    const auto [s, t] = edge_ends(v);
    os << (v > 1 ? "," : "") << s << "." << anchors[v][0] << "->" << t << "." << anchors[v][1];
  }
  if (mark) os << " mark:" << mark->vertex << (mark->is_x ? "x" : "p") << mark->j;
  os << "}";
  return os.str();
}

double network_symbol(const Network& rho, const PoissonStructure& P, const Vec& p2, const Vec& x, const Vec& p) {
  rho.validate();
  const int d = P.dim();
  if (p2.size() != d || x.size() != d || p.size() != d)
    throw std::invalid_argument("network_symbol: dimension mismatch");
  if (rho.mark && (rho.mark->j < 0 || rho.mark->j >= d))
    throw std::invalid_argument("network_symbol: mark index out of range");
  const int N = rho.size();
  const int S = rho.skeleton_size();
  // Variables: k_w for w < N, then j_e for skeleton edges (index N + v - 1).
  struct Slot {
    int var;      // -1 for the fixed mark index
    bool on_p;    // derivative in p (else in x)
  };
  std::vector<std::vector<Slot>> slots(N);
  std::vector<char> is_root(N, 0);
  double sign = 1.0;
  for (int v = 0; v < S; ++v)
    for (size_t u = 0; u < rho.tree_parent[v].size(); ++u) {
      const int w = rho.global_index(v, static_cast<int>(u));
      const int par = rho.tree_parent[v][u];
      if (par < 0)
        is_root[w] = 1;
      else
        slots[rho.global_index(v, par)].push_back({w, false});
    }
  for (int v = 1; v < S; ++v) {
    const auto [src, tgt] = rho.edge_ends(v);
    const int var = N + v - 1;
    slots[rho.global_index(src, rho.anchors[v][0])].push_back({var, true});
    slots[rho.global_index(tgt, rho.anchors[v][1])].push_back({var, false});
    if (rho.toward_root[v]) sign = -sign;
  }
  if (rho.mark) {
    // x^j decoration adds -d/dp_j, p_j decoration adds d/dx^j.
    slots[rho.global_index(0, rho.mark->vertex)].push_back({-1, rho.mark->is_x});
    if (rho.mark->is_x) sign = -sign;
  }

  // V^k = pi^{km}(x) p_m on (x, p); derivatives in p_m pick pi^{km}.
  std::vector<double> xp(2 * d);
  for (int i = 0; i < d; ++i) {
    xp[i] = x[i];
    xp[d + i] = p[i];
  }
  std::vector<Polynomial> V;
  {
    for (int k = 0; k < d; ++k) {
      Polynomial s(2 * d);
      for (int m = 0; m < d; ++m) {
        Polynomial c(2 * d);
        const Polynomial pkm = P.component(k, m);
        for (const auto& [e, coef] : pkm.terms()) {
          Exponents f(2 * d, 0);
          std::copy(e.begin(), e.end(), f.begin());
          c.add_term(f, coef);
        }
        s = s + c * Polynomial::variable(2 * d, d + m);
      }
      V.push_back(s);
    }
  }
  std::map<std::pair<int, Exponents>, double> cache;
  auto dV = [&](int k, const Exponents& e) {
    auto key = std::make_pair(k, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double val = V[k].derivative(e).eval(xp.data());
    cache.emplace(key, val);
    return val;
  };

  const int nvars = N + S - 1;
  const double total = sum_over_assignments(nvars, d, [&](const std::vector<int>& I) {
    double w = 1.0;
    for (int v = 0; v < N && w != 0.0; ++v) {
      Exponents e(2 * d, 0);
      for (const auto& s : slots[v]) {
        const int idx = s.var < 0 ? rho.mark->j : I[s.var];
        e[(s.on_p ? d : 0) + idx] += 1;
      }
      w *= dV(I[v], e);
      if (is_root[v]) w *= p2[I[v]];
    }
    return w;
  });
  return sign * total;
}

KontsevichGraph network_graph(const Network& rho) {
  rho.validate();
  if (rho.mark) throw std::invalid_argument("network_graph: marked networks have no associated graph");
  const int N = rho.size();
  const int S = rho.skeleton_size();
  const int T1 = N, T2 = N + 1;
  KontsevichGraph g{N, 2, std::vector<std::array<int, 2>>(N, {T1, T2})};
  std::vector<int> sources(N, 0);
  for (int v = 0; v < S; ++v)
    for (size_t u = 0; u < rho.tree_parent[v].size(); ++u) {
      const int par = rho.tree_parent[v][u];
      if (par >= 0) g.out[rho.global_index(v, static_cast<int>(u))][1] = rho.global_index(v, par);
    }
  for (int v = 1; v < S; ++v) {
    const auto [src, tgt] = rho.edge_ends(v);
    const int a = rho.global_index(src, rho.anchors[v][0]);
    g.out[a][0] = rho.global_index(tgt, rho.anchors[v][1]);
    if (++sources[a] > 1)
      throw std::domain_error("network_graph: vertex " + std::to_string(a) +
                              " is the source of two skeleton edges (zero symbol)");
  }
  return g;
}

namespace {

int rule_sign_of(const Network& rho) {
  int s = rho.size();
  for (int v = 1; v < rho.skeleton_size(); ++v) s += rho.toward_root[v] ? 1 : 0;
  return s % 2 == 0 ? 1 : -1;
}

}  // namespace

NetworkGraph network_to_kgraph(const Network& rho, const PoissonStructure& P, const std::vector<Vec>& x_probes,
                               const std::vector<Vec>& p1_probes, const std::vector<Vec>& p2_probes) {
  if (x_probes.size() != p1_probes.size() || x_probes.size() != p2_probes.size() || x_probes.empty())
    throw std::invalid_argument("network_to_kgraph: probe lists must be nonempty and of equal length");
  NetworkGraph out;
  out.graph = network_graph(rho);
  out.rule_sign = rule_sign_of(rho);
  std::vector<double> E, B;
  double scale = 0.0, dot = 0.0;
  for (size_t k = 0; k < x_probes.size(); ++k) {
    E.push_back(network_symbol(rho, P, p2_probes[k], x_probes[k], p1_probes[k]));
    B.push_back(kgraph_symbol(out.graph, P, {p1_probes[k], p2_probes[k]}, x_probes[k]));
    scale = std::max({scale, std::abs(E.back()), std::abs(B.back())});
    dot += E.back() * B.back();
  }
  if (scale < 1e-12) {
    out.degenerate = true;
    throw std::domain_error("network_to_kgraph: symbol vanishes on every probe, sign undetermined for " +
                            rho.to_string());
  }
  out.sign = dot >= 0.0 ? 1 : -1;
  for (size_t k = 0; k < E.size(); ++k)
    out.max_abs_mismatch = std::max(out.max_abs_mismatch, std::abs(E[k] - out.sign * B[k]));
  return out;
}

PoissonStructure generic_bivector(int dim, int degree, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<PiEntry> entries;
  std::function<void(int, int, Exponents&, int)> rec = [&](int i, int j, Exponents& a, int var) {
    if (var == dim) {
      int s = 0;
      for (int e : a) s += e;
      entries.push_back({i, j, a, coef(gen) / (1.0 + s)});
      return;
    }
    int used = 0;
    for (int k = 0; k < var; ++k) used += a[k];
    for (int e = 0; e + used <= degree; ++e) {
      a[var] = e;
      rec(i, j, a, var + 1);
    }
    a[var] = 0;
  };
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Exponents a(dim, 0);
      rec(i, j, a, 0);
    }
  return PoissonStructure(dim, entries, StructureKind::polynomial, "generic", std::max(4, degree));
}

NetworkGraph network_to_kgraph(const Network& rho) {
  static const PoissonStructure P = generic_bivector(3, 4, 7);
  const auto xs = probe_grid(3, 10, 11), p1 = probe_grid(3, 10, 12), p2 = probe_grid(3, 10, 13);
  return network_to_kgraph(rho, P, xs, p1, p2);
}

std::vector<Network> enumerate_networks(int max_size) {
  if (max_size < 1 || max_size > 4) throw std::invalid_argument("enumerate_networks: size must be in [1, 4]");
  std::vector<Network> out;
  // Recursive (parent precedes child) labeled trees on n vertices.
  auto labeled_trees = [](int n) {
    std::vector<std::vector<int>> res;
    std::vector<int> par(n, -1);
    std::function<void(int)> rec = [&](int u) {
      if (u == n) {
        res.push_back(par);
        return;
      }
      for (int q = 0; q < u; ++q) {
        par[u] = q;
        rec(u + 1);
      }
    };
    rec(1);
    return res;
  };
  for (int N = 1; N <= max_size; ++N)
    for (int S = 1; S <= N; ++S) {
      // Compositions of N into S positive parts.
      std::vector<std::vector<int>> comps;
      std::vector<int> cur;
      std::function<void(int, int)> comp = [&](int left, int parts) {
        if (parts == 0) {
          if (left == 0) comps.push_back(cur);
          return;
        }
        for (int a = 1; a <= left - (parts - 1); ++a) {
          cur.push_back(a);
          comp(left - a, parts - 1);
          cur.pop_back();
        }
      };
      comp(N, S);
      for (const auto& skel : labeled_trees(S))
        for (const auto& sizes : comps) {
          std::vector<std::vector<std::vector<int>>> choices(S);
          for (int v = 0; v < S; ++v) choices[v] = labeled_trees(sizes[v]);
          Network net;
          net.skeleton_parent = skel;
          net.toward_root.assign(S, 0);
          net.tree_parent.resize(S);
          net.anchors.assign(S, {0, 0});
          std::function<void(int)> pick_trees, pick_edges;
          pick_edges = [&](int v) {
            if (v == S) {
              out.push_back(net);
              return;
            }
            for (int o = 0; o < 2; ++o) {
              net.toward_root[v] = static_cast<char>(o);
              const auto [src, tgt] = net.edge_ends(v);
              for (int a = 0; a < sizes[src]; ++a)
                for (int b = 0; b < sizes[tgt]; ++b) {
                  net.anchors[v] = {a, b};
                  pick_edges(v + 1);
                }
            }
          };
          pick_trees = [&](int v) {
            if (v == S) {
              pick_edges(1);
              return;
            }
            for (const auto& t : choices[v]) {
              net.tree_parent[v] = t;
              pick_trees(v + 1);
            }
          };
          pick_trees(0);
        }
    }
  return out;
}

Network example_network() {
  Network n;
  // Skeleton: 0 = root tree {k2 <- l2}, 1 = {k1}, 2 = {k3}.
  n.skeleton_parent = {-1, 0, 0};
  n.toward_root = {0, 1, 0};
  n.tree_parent = {{-1, 0}, {-1}, {-1}};
  n.anchors = {std::array<int, 2>{0, 0}, std::array<int, 2>{0, 0}, std::array<int, 2>{1, 0}};
  return n;
}

KontsevichGraph example_graph() {
  // Read off the displayed symbol: A = pi^{k1k2} (left to D, right to C),
  // B = pi^{j1j2} (left to C, right to terrestrial 2), C and D each point to
  // both terrestrial vertices.
  const int A = 0, B = 1, C = 2, D = 3, T1 = 4, T2 = 5;
  KontsevichGraph g{4, 2, std::vector<std::array<int, 2>>(4)};
  g.out[A] = {D, C};
  g.out[B] = {C, T2};
  g.out[C] = {T1, T2};
  g.out[D] = {T1, T2};
  return g;
}

}  // namespace pg
