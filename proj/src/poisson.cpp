#include "pg/poisson.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace pg {

const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::constant: return "constant";
    case StructureKind::linear: return "linear";
    case StructureKind::polynomial: return "polynomial";
  }
  return "polynomial";
}

StructureKind structure_kind_from_string(const std::string& s) {
  if (s == "constant") return StructureKind::constant;
  if (s == "linear") return StructureKind::linear;
  if (s == "polynomial") return StructureKind::polynomial;
  throw std::invalid_argument("unknown structure kind '" + s + "'");
}

StructureConstants StructureConstants::so3() {
  StructureConstants c(3);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    c(i, j, k) = 1.0;
    c(j, i, k) = -1.0;
  }
  return c;
}

StructureConstants StructureConstants::affine2() {
  StructureConstants c(2);
  c(0, 1, 1) = 1.0;
  c(1, 0, 1) = -1.0;
  return c;
}

StructureConstants StructureConstants::abelian(int d) { return StructureConstants(d); }

Vec lie_bracket(const StructureConstants& c, const Vec& a, const Vec& b) {
  const int d = c.dim;
  Vec r = Vec::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double ab = a[i] * b[j];
      if (ab == 0.0) continue;
      for (int k = 0; k < d; ++k) r[k] += c(i, j, k) * ab;
    }
  return r;
}

double lie_jacobi_residual(const StructureConstants& c) {
  const int d = c.dim;
  double worst = 0.0;
  // [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        for (int n = 0; n < d; ++n) {
          double s = 0.0;
          for (int m = 0; m < d; ++m)
            s += c(i, j, m) * c(m, l, n) + c(j, l, m) * c(m, i, n) + c(l, i, m) * c(m, j, n);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

PoissonStructure::PoissonStructure(int dim, const std::vector<PiEntry>& entries, StructureKind kind,
                                   std::string label, int max_degree)
    : dim_(dim), kind_(kind), label_(std::move(label)), max_degree_(max_degree) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("poisson: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (max_degree < 0 || max_degree > 8) throw std::invalid_argument("poisson: max_degree must be in [0, 8]");
  std::map<std::pair<int, int>, Polynomial> acc;
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim)
      throw std::invalid_argument("poisson: entry index out of range");
    if (e.i >= e.j) throw std::invalid_argument("poisson: internal entries must have i < j");
    auto [it, fresh] = acc.try_emplace({e.i, e.j}, Polynomial(dim));
    it->second.add_term(e.alpha, e.c);
  }
  for (auto& [ij, poly] : acc) {
    if (poly.is_zero()) continue;
    if (poly.degree() > max_degree_)
      throw std::invalid_argument("poisson: degree " + std::to_string(poly.degree()) +
                                  " exceeds the maximum " + std::to_string(max_degree_));
    pairs_.push_back(ij);
    upper_.push_back(poly);
    degree_ = std::max(degree_, poly.degree());
  }
  compile();
}

void PoissonStructure::compile() {
  terms_.clear();
  for (size_t q = 0; q < upper_.size(); ++q)
    for (const auto& [e, c] : upper_[q].terms()) {
      Term t;
      t.pair = static_cast<int>(q);
      t.c = c;
      for (int k = 0; k < dim_; ++k) t.e[k] = static_cast<std::uint8_t>(e[k]);
      terms_.push_back(t);
    }
}

std::vector<PiEntry> PoissonStructure::entries() const {
  std::vector<PiEntry> out;
  for (size_t q = 0; q < pairs_.size(); ++q)
    for (const auto& [e, c] : upper_[q].terms()) out.push_back({pairs_[q].first, pairs_[q].second, e, c});
  return out;
}

void PoissonStructure::eval_raw(const double* x, double* pi_out, double* dpi_out) const {
  const int d = dim_;
  const int deg = std::max(degree_, 1);
  double pw[kMaxDim][9];
  for (int k = 0; k < d; ++k) {
    pw[k][0] = 1.0;
    for (int e = 1; e <= deg; ++e) pw[k][e] = pw[k][e - 1] * x[k];
  }
  double up[kMaxDim * kMaxDim];
  double dup[kMaxDim * kMaxDim * kMaxDim];
  const int np = static_cast<int>(pairs_.size());
  std::fill(up, up + np, 0.0);
  if (dpi_out) std::fill(dup, dup + np * d, 0.0);
  for (const Term& t : terms_) {
    double m = t.c;
    for (int k = 0; k < d; ++k) m *= pw[k][t.e[k]];
    up[t.pair] += m;
    if (dpi_out) {
      for (int k = 0; k < d; ++k) {
        if (t.e[k] == 0) continue;
        double g = t.c * t.e[k];
        for (int l = 0; l < d; ++l) g *= (l == k) ? pw[l][t.e[l] - 1] : pw[l][t.e[l]];
        dup[t.pair * d + k] += g;
      }
    }
  }
  std::fill(pi_out, pi_out + d * d, 0.0);
  if (dpi_out) std::fill(dpi_out, dpi_out + d * d * d, 0.0);
  for (int q = 0; q < np; ++q) {
    const int i = pairs_[q].first, j = pairs_[q].second;
    pi_out[i * d + j] = up[q];
    pi_out[j * d + i] = -up[q];
    if (dpi_out)
      for (int k = 0; k < d; ++k) {
        dpi_out[(i * d + j) * d + k] = dup[q * d + k];
        dpi_out[(j * d + i) * d + k] = -dup[q * d + k];
      }
  }
}

Mat PoissonStructure::pi(const Vec& x) const {
  double buf[kMaxDim * kMaxDim];
  eval_raw(x.data(), buf, nullptr);
  Mat m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = buf[i * dim_ + j];
  return m;
}

PiDerivative PoissonStructure::dpi(const Vec& x) const {
  double buf[kMaxDim * kMaxDim];
  PiDerivative out;
  out.dim = dim_;
  eval_raw(x.data(), buf, out.v.data());
  return out;
}

Polynomial PoissonStructure::component(int i, int j) const {
  for (size_t q = 0; q < pairs_.size(); ++q) {
    if (pairs_[q] == std::make_pair(i, j)) return upper_[q];
    if (pairs_[q] == std::make_pair(j, i)) return upper_[q].scaled(-1.0);
  }
  return Polynomial(dim_);
}

PoissonStructure PoissonStructure::scaled(double t) const {
  std::vector<PiEntry> es = entries();
  for (auto& e : es) e.c *= t;
  return PoissonStructure(dim_, es, kind_, label_, max_degree_);
}

PoissonStructure make_constant(const Mat& m, std::string label) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d) throw std::invalid_argument("make_constant: matrix must be square");
  std::vector<PiEntry> es;
  for (int i = 0; i < d; ++i) {
    if (std::abs(m(i, i)) > 1e-12) throw std::invalid_argument("make_constant: nonzero diagonal");
    for (int j = i + 1; j < d; ++j) {
      if (std::abs(m(i, j) + m(j, i)) > 1e-12)
        throw std::invalid_argument("make_constant: matrix is not antisymmetric");
      if (m(i, j) != 0.0) es.push_back({i, j, Exponents(d, 0), m(i, j)});
    }
  }
  return PoissonStructure(d, es, StructureKind::constant, std::move(label));
}

PoissonStructure make_linear(const StructureConstants& c, int sign, std::string label) {
  const int d = c.dim;
  if (sign != 1 && sign != -1) throw std::invalid_argument("make_linear: sign must be +1 or -1");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (std::abs(c(i, j, k) + c(j, i, k)) > 1e-12)
          throw std::invalid_argument("make_linear: structure constants not antisymmetric");
  if (lie_jacobi_residual(c) > 1e-10) throw std::invalid_argument("make_linear: Jacobi identity violated");
  std::vector<PiEntry> es;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (c(i, j, k) != 0.0) {
          Exponents a(d, 0);
          a[k] = 1;
          es.push_back({i, j, a, sign * c(i, j, k)});
        }
  return PoissonStructure(d, es, StructureKind::linear, std::move(label));
}

PoissonStructure make_polynomial(int dim, const std::vector<PiEntry>& entries, std::string label,
                                 int max_degree) {
  // Collect both orientations and check antisymmetry coefficient-wise.
  std::map<std::tuple<int, int, Exponents>, double> given;
  for (const auto& e : entries) {
    if (e.i == e.j) {
      if (e.c != 0.0) throw std::invalid_argument("make_polynomial: diagonal entry");
      continue;
    }
    if (static_cast<int>(e.alpha.size()) != dim)
      throw std::invalid_argument("make_polynomial: multi-index length differs from dim");
    given[{e.i, e.j, e.alpha}] += e.c;
  }
  std::vector<PiEntry> upper;
  std::map<std::tuple<int, int, Exponents>, double> merged;
  for (const auto& [key, c] : given) {
    auto [i, j, a] = key;
    auto mirror = given.find({j, i, a});
    if (mirror != given.end() && std::abs(mirror->second + c) > 1e-12)
      throw std::invalid_argument("make_polynomial: antisymmetry violated");
    if (i < j)
      merged[{i, j, a}] = c;
    else if (mirror == given.end())
      merged[{j, i, a}] = -c;
  }
  int deg = 0;
  bool homogeneous_linear = true;
  for (const auto& [key, c] : merged) {
    auto [i, j, a] = key;
    int s = 0;
    for (int v : a) s += v;
    deg = std::max(deg, s);
    if (s != 1) homogeneous_linear = false;
    upper.push_back({i, j, a, c});
  }
  StructureKind kind = StructureKind::polynomial;
  if (deg == 0) kind = StructureKind::constant;
  else if (homogeneous_linear) kind = StructureKind::linear;
  return PoissonStructure(dim, upper, kind, std::move(label), max_degree);
}

Mat eval_pi(const PoissonStructure& P, const Vec& x) { return P.pi(x); }
PiDerivative eval_dpi(const PoissonStructure& P, const Vec& x) { return P.dpi(x); }

double jacobi_residual(const PoissonStructure& P, const Vec& x) {
  const Mat pi = P.pi(x);
  const PiDerivative dp = P.dpi(x);
  const int d = P.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += pi(i, l) * dp(j, k, l) + pi(j, l) * dp(k, i, l) + pi(k, l) * dp(i, j, l);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

PoissonStructure moyal2d() {
  Mat m(2, 2);
  m << 0, 1, -1, 0;
  return make_constant(m, "moyal2d");
}

PoissonStructure quadratic2d() { return make_polynomial(2, {{0, 1, {1, 1}, 1.0}}, "quad2d"); }

PoissonStructure quadratic3d() {
  return make_polynomial(3,
                         {{0, 1, {1, 1, 0}, 1.0}, {1, 2, {0, 1, 1}, 1.0}, {0, 2, {1, 0, 1}, -1.0}},
                         "quad3d");
}

PoissonStructure so3_structure() { return make_linear(StructureConstants::so3(), 1, "so3"); }

PoissonStructure affine2_structure() { return make_linear(StructureConstants::affine2(), 1, "affine2"); }

PoissonStructure zero_structure(int d) { return make_constant(Mat::Zero(d, d), "zero"); }

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* s = std::getenv("GENFUN_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') throw std::invalid_argument("GENFUN_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<Vec> probe_grid(int d, int n, std::uint64_t seed) {
  boost::random::sobol qrng(static_cast<std::size_t>(d));
  qrng.seed(static_cast<boost::uint_least64_t>(1 + seed % 4096));
  std::vector<Vec> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec x(d);
    for (int k = 0; k < d; ++k) x[k] = 2.0 * std::ldexp(static_cast<double>(qrng()), -64) - 1.0;
    pts.push_back(x);
  }
  return pts;
}

}  // namespace pg
