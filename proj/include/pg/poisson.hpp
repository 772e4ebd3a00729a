#pragma once

#include "pg/polynomial.hpp"
#include "pg/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pg {

enum class StructureKind { constant, linear, polynomial };

const char* to_string(StructureKind k);
StructureKind structure_kind_from_string(const std::string& s);

// One stored coefficient c^{ij}_alpha of pi^{ij}(x) = sum_alpha c^{ij}_alpha x^alpha.
struct PiEntry {
  int i = 0;
  int j = 0;
  Exponents alpha;
  double c = 0.0;
};

// Rank-3 array of first derivatives, (i, j, k) -> d_k pi^{ij}.
struct PiDerivative {
  int dim = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> v{};
  double operator()(int i, int j, int k) const { return v[(i * dim + j) * dim + k]; }
  double& operator()(int i, int j, int k) { return v[(i * dim + j) * dim + k]; }
};

// Lie algebra structure constants, c(i, j, k) = c^k_{ij} with [e_i, e_j] = c^k_{ij} e_k.
struct StructureConstants {
  int dim = 0;
  std::vector<double> c;

  explicit StructureConstants(int d = 0) : dim(d), c(static_cast<size_t>(d) * d * d, 0.0) {}
  double operator()(int i, int j, int k) const { return c[(i * dim + j) * dim + k]; }
  double& operator()(int i, int j, int k) { return c[(i * dim + j) * dim + k]; }

  static StructureConstants so3();
  static StructureConstants affine2();  // [e1, e2] = e2
  static StructureConstants abelian(int d);
};

Vec lie_bracket(const StructureConstants& c, const Vec& a, const Vec& b);
double lie_jacobi_residual(const StructureConstants& c);

// Coordinate Poisson structure with exact polynomial coefficients. Only the
// upper triangle i < j is stored; pi^{ji} = -pi^{ij} is implied.
class PoissonStructure {
 public:
  PoissonStructure() = default;
  PoissonStructure(int dim, const std::vector<PiEntry>& entries, StructureKind kind,
                   std::string label, int max_degree = 4);

  int dim() const { return dim_; }
  StructureKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  int degree() const { return degree_; }
  int max_degree() const { return max_degree_; }

  // Canonical entries (i < j, nonzero coefficients), deterministic order.
  std::vector<PiEntry> entries() const;

  Mat pi(const Vec& x) const;
  PiDerivative dpi(const Vec& x) const;

  // Raw kernels used by the flow integrators: pi_out is d*d row-major,
  // dpi_out (may be null) is d*d*d indexed ((i*d + j)*d + k).
  void eval_raw(const double* x, double* pi_out, double* dpi_out) const;

  // pi^{ij} as a polynomial in x (any i, j).
  Polynomial component(int i, int j) const;

  PoissonStructure scaled(double t) const;

 private:
  struct Term {
    int pair = 0;  // index into pairs_
    double c = 0.0;
    std::array<std::uint8_t, kMaxDim> e{};
  };
  void compile();

  int dim_ = 0;
  StructureKind kind_ = StructureKind::constant;
  std::string label_;
  int degree_ = 0;
  int max_degree_ = 4;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<Polynomial> upper_;  // parallel to pairs_
  std::vector<Term> terms_;
};

PoissonStructure make_constant(const Mat& matrix, std::string label = "constant");
PoissonStructure make_linear(const StructureConstants& c, int sign, std::string label = "linear");
// General polynomial structure; entries may be given for either (i,j) or (j,i)
// but must be consistent with antisymmetry.
PoissonStructure make_polynomial(int dim, const std::vector<PiEntry>& entries,
                                 std::string label = "polynomial", int max_degree = 4);

Mat eval_pi(const PoissonStructure& P, const Vec& x);
PiDerivative eval_dpi(const PoissonStructure& P, const Vec& x);

// max over (i,j,k) of |sum_cyclic pi^{il} d_l pi^{jk}|.
double jacobi_residual(const PoissonStructure& P, const Vec& x);

// Shipped example structures.
PoissonStructure moyal2d();        // [[0,1],[-1,0]]
PoissonStructure quadratic2d();    // pi^{12} = x1 x2
PoissonStructure quadratic3d();    // pi^{ij} = eps_{ijk} d_k(x1 x2 x3)
PoissonStructure so3_structure();  // sign +1 linear structure of so(3)
PoissonStructure affine2_structure();
PoissonStructure zero_structure(int d);

inline constexpr std::uint64_t kDefaultSeed = 1729;

// Seed from GENFUN_SEED if set, otherwise the given fallback.
std::uint64_t seed_from_env(std::uint64_t fallback = kDefaultSeed);

// n quasi-random points in [-1,1]^d (Sobol sequence, seed selects the offset).
std::vector<Vec> probe_grid(int d, int n = 32, std::uint64_t seed = kDefaultSeed);

}  // namespace pg
