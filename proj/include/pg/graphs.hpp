#pragma once

#include "pg/poisson.hpp"
#include "pg/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pg {

// Aerial vertices 0..n-1, terrestrial vertices n..n+m-1. Vertex k has the
// ordered out-edges (out[k][0], out[k][1]) = (left, right).
struct KontsevichGraph {
  int n_aerial = 0;
  int m_terrestrial = 2;
  std::vector<std::array<int, 2>> out;

  bool operator==(const KontsevichGraph&) const = default;
  auto operator<=>(const KontsevichGraph&) const = default;

  // Throws std::invalid_argument on loops, bad targets or a wrong edge count.
  void validate() const;
  // Interior (aerial-aerial edges, undirected) is a tree on the aerial vertices.
  bool interior_is_tree() const;
  // Lexicographically minimal out-edge encoding over aerial relabelings.
  KontsevichGraph canonical() const;
  std::string to_string() const;
};

// T_{n,2} up to aerial relabeling, 1 <= n <= 4, sorted.
std::vector<KontsevichGraph> enumerate_kontsevich_trees(int n);

// Symbol of Gamma: sum over edge index assignments I of
// prod_k (prod_{e into k} d_{I(e)}) pi^{I(left_k) I(right_k)}(x) * prod_{e into terrestrial i} p_i[I(e)].
double kgraph_symbol(const KontsevichGraph& G, const PoissonStructure& P, const std::vector<Vec>& p_list,
                     const Vec& x);

// Network of rooted trees. Skeleton vertex 0 is the root; parents precede
// children. Each rho(v) is a rooted tree given by a parent array (local vertex
// 0 is its root, parent[u] < u). The skeleton edge from v (v >= 1) to its
// parent points from v toward the root when toward_root[v] is set. Its
// anchors are (vertex in the source tree, vertex in the target tree).
struct NetworkMark {
  int vertex = 0;     // local vertex of the skeleton root tree
  bool is_x = true;   // decoration x^j (adds -d/dp_j) or p_j (adds d/dx^j)
  int j = 0;
};

struct Network {
  std::vector<int> skeleton_parent;           // [0] = -1
  std::vector<char> toward_root;              // per skeleton vertex, [0] unused
  std::vector<std::vector<int>> tree_parent;  // per skeleton vertex, [0] = -1
  std::vector<std::array<int, 2>> anchors;    // per skeleton vertex, [0] unused
  std::optional<NetworkMark> mark;

  int skeleton_size() const { return static_cast<int>(skeleton_parent.size()); }
  int size() const;  // |rho|
  int global_index(int skel, int local) const;
  // Source and target skeleton vertices of the edge ending the path from v.
  std::pair<int, int> edge_ends(int v) const;
  void validate() const;
  std::string to_string() const;
};

// Symbol E_rho(x, p) paired with p2 at the tree roots; V^k = pi^{km}(x) p_m.
double network_symbol(const Network& rho, const PoissonStructure& P, const Vec& p2, const Vec& x, const Vec& p);

struct NetworkGraph {
  KontsevichGraph graph;       // aerial vertex numbering follows Network::global_index
  int sign = 0;                // from probe evaluation
  int rule_sign = 0;           // (-1)^(|rho| + #edges toward the root)
  bool degenerate = false;     // symbol identically zero on the probes
  double max_abs_mismatch = 0; // max | E - sign * B | over probes
};

// Kontsevich graph of a network: right edge to the parent in rho(v) or to
// terrestrial 2 at a tree root; left edge to the target anchor when the vertex
// is a skeleton-edge source, else terrestrial 1. A vertex that is the source
// of two skeleton edges gives a zero symbol and is reported as degenerate.
KontsevichGraph network_graph(const Network& rho);

// Graph plus sign fixed by evaluating both symbols at the probes. Throws
// std::domain_error when the symbol vanishes on every probe.
NetworkGraph network_to_kgraph(const Network& rho, const PoissonStructure& P, const std::vector<Vec>& x_probes,
                               const std::vector<Vec>& p1_probes, const std::vector<Vec>& p2_probes);
// Same with a fixed generic degree-4 bivector on R^3 and 10 seeded probes.
NetworkGraph network_to_kgraph(const Network& rho);

// Generic antisymmetric bivector with pseudo-random polynomial coefficients up
// to the given degree (not Poisson in general; symbol identities are algebraic).
PoissonStructure generic_bivector(int dim, int degree, unsigned seed);

// All networks with |rho| <= max_size (labeled skeletons and trees, every
// orientation and anchor choice; isomorphic copies are kept).
std::vector<Network> enumerate_networks(int max_size);

// The worked example: skeleton root {k2 <- l2}, child {k1} with the edge
// k1 -> k2 toward the root, child {k3} with the edge l2 -> k3 away from it.
Network example_network();
KontsevichGraph example_graph();

}  // namespace pg
