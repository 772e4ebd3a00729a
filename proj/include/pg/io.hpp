#pragma once

#include "pg/graphs.hpp"
#include "pg/poisson.hpp"

#include <json.hpp>

#include <string>

namespace pg {

// Structure files: {"dim": d, "kind": "...", "label": "...", "entries": [{"i", "j", "alpha", "c"}]}
// or, for the linear kind, {"dim": d, "structure_constants": [...], "sign": +-1} with the
// constants as a flat d^3 array in (i, j, k) order or nested [i][j][k]; entry (i,j,k) is c^k_{ij}.
// The Jacobi identity is checked on the probe grid; a violation throws std::invalid_argument.
PoissonStructure structure_from_json(const nlohmann::json& j);
nlohmann::json structure_to_json(const PoissonStructure& P);
PoissonStructure load_structure(const std::string& path);

// {"n_aerial": n, "out": [[l, r], ...]}, terrestrial vertices numbered n, n+1.
KontsevichGraph kgraph_from_json(const nlohmann::json& j);
nlohmann::json kgraph_to_json(const KontsevichGraph& G);

// {"skeleton_parent": [...], "toward_root": [...], "tree_parent": [[...], ...],
//  "anchors": [[src, dst], ...], "mark": {"vertex", "kind": "x"|"p", "j"}}; mark optional.
Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& rho);

}  // namespace pg
