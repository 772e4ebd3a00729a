#include "pg/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pg {

namespace {

StructureConstants constants_from_json(int d, const nlohmann::json& sc) {
  StructureConstants c(d);
  if (!sc.is_array()) throw std::invalid_argument("structure_constants must be an array");
  if (sc.size() == static_cast<size_t>(d) * d * d && (sc.empty() || sc[0].is_number())) {
    for (size_t k = 0; k < sc.size(); ++k) c.c[k] = sc[k].get<double>();
    return c;
  }
  if (sc.size() != static_cast<size_t>(d)) throw std::invalid_argument("structure_constants: wrong shape");
  for (int i = 0; i < d; ++i) {
    if (sc[i].size() != static_cast<size_t>(d)) throw std::invalid_argument("structure_constants: wrong shape");
    for (int j = 0; j < d; ++j) {
      if (sc[i][j].size() != static_cast<size_t>(d)) throw std::invalid_argument("structure_constants: wrong shape");
      for (int k = 0; k < d; ++k) c(i, j, k) = sc[i][j][k].get<double>();
    }
  }
  return c;
}

}  // namespace

PoissonStructure structure_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("dim").get<int>();
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("dim must be in [1, 4]");
    const std::string label = j.value("label", std::string("structure"));
    PoissonStructure P;
    if (j.contains("structure_constants")) {
      const int sign = j.value("sign", 1);
      if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
      P = make_linear(constants_from_json(d, j.at("structure_constants")), sign, label);
    } else {
      std::vector<PiEntry> es;
      for (const auto& e : j.at("entries"))
        es.push_back({e.at("i").get<int>(), e.at("j").get<int>(), e.at("alpha").get<Exponents>(), e.at("c").get<double>()});
      for (const auto& e : es)
        if (e.i < 0 || e.j < 0 || e.i >= d || e.j >= d) throw std::invalid_argument("entry index out of range");
      P = make_polynomial(d, es, label, j.value("max_degree", 4));
    }
    if (j.contains("kind") && j.at("kind").get<std::string>() != to_string(P.kind()))
      throw std::invalid_argument("declared kind '" + j.at("kind").get<std::string>() + "' does not match the entries ('" +
                                  to_string(P.kind()) + "')");
    double jac = 0.0;
    for (const Vec& x : probe_grid(d)) jac = std::max(jac, jacobi_residual(P, x));
    if (jac > 1e-10) {
      std::ostringstream os;
      os << "Jacobi identity violated on the probe grid (residual " << jac << ")";
      throw std::invalid_argument(os.str());
    }
    return P;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("structure file: ") + e.what());
  }
}

nlohmann::json structure_to_json(const PoissonStructure& P) {
  nlohmann::json es = nlohmann::json::array();
  for (const PiEntry& e : P.entries()) es.push_back({{"i", e.i}, {"j", e.j}, {"alpha", e.alpha}, {"c", e.c}});
  return {{"dim", P.dim()}, {"kind", to_string(P.kind())}, {"label", P.label()}, {"entries", es}};
}

PoissonStructure load_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open structure file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("structure file " + path + ": " + e.what());
  }
  return structure_from_json(j);
}

KontsevichGraph kgraph_from_json(const nlohmann::json& j) {
  try {
    KontsevichGraph G;
    G.n_aerial = j.at("n_aerial").get<int>();
    G.m_terrestrial = j.value("m_terrestrial", 2);
    for (const auto& e : j.at("out")) G.out.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    G.validate();
    return G;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("graph: ") + e.what());
  }
}

nlohmann::json kgraph_to_json(const KontsevichGraph& G) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : G.out) out.push_back({e[0], e[1]});
  return {{"n_aerial", G.n_aerial}, {"m_terrestrial", G.m_terrestrial}, {"out", out}};
}

Network network_from_json(const nlohmann::json& j) {
  try {
    Network rho;
    rho.skeleton_parent = j.at("skeleton_parent").get<std::vector<int>>();
    for (int b : j.at("toward_root").get<std::vector<int>>()) rho.toward_root.push_back(static_cast<char>(b != 0));
    rho.tree_parent = j.at("tree_parent").get<std::vector<std::vector<int>>>();
    for (const auto& a : j.at("anchors")) rho.anchors.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
    if (j.contains("mark") && !j.at("mark").is_null()) {
      const auto& m = j.at("mark");
      const std::string kind = m.at("kind").get<std::string>();
      if (kind != "x" && kind != "p") throw std::invalid_argument("mark kind must be \"x\" or \"p\"");
      rho.mark = NetworkMark{m.at("vertex").get<int>(), kind == "x", m.at("j").get<int>()};
    }
    rho.validate();
    return rho;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network: ") + e.what());
  }
}

nlohmann::json network_to_json(const Network& rho) {
  nlohmann::json j;
  j["skeleton_parent"] = rho.skeleton_parent;
  std::vector<int> tr;
  for (char c : rho.toward_root) tr.push_back(c ? 1 : 0);
  j["toward_root"] = tr;
  j["tree_parent"] = rho.tree_parent;
  nlohmann::json an = nlohmann::json::array();
  for (const auto& a : rho.anchors) an.push_back({a[0], a[1]});
  j["anchors"] = an;
  if (rho.mark) j["mark"] = {{"vertex", rho.mark->vertex}, {"kind", rho.mark->is_x ? "x" : "p"}, {"j", rho.mark->j}};
  return j;
}

}  // namespace pg
