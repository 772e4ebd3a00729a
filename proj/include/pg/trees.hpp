#pragma once

#include "pg/poisson.hpp"
#include "pg/polynomial.hpp"
#include "pg/types.hpp"

#include <boost/rational.hpp>

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace pg {

using Rational = boost::rational<long long>;

// Topological rooted tree; children kept sorted (by size, then
// lexicographically by child sequence), so == decides isomorphism.
class RootedTree {
 public:
  RootedTree() = default;  // the single vertex
  explicit RootedTree(std::vector<RootedTree> children);

  const std::vector<RootedTree>& children() const { return children_; }
  int size() const { return size_; }
  bool is_leaf() const { return children_.empty(); }

  // Nested brackets: "[]" is the single vertex, "[[],[]]" the cherry.
  std::string to_string() const;
  static RootedTree parse(const std::string& text);

  friend std::strong_ordering operator<=>(const RootedTree& a, const RootedTree& b);
  friend bool operator==(const RootedTree& a, const RootedTree& b) { return (a <=> b) == 0; }

 private:
  std::vector<RootedTree> children_;
  int size_ = 1;
};

// All trees with n vertices (1 <= n <= 8), each once, in canonical order.
std::vector<RootedTree> enumerate_trees(int n);

long long sigma(const RootedTree& t);           // symmetry coefficient
long long tree_factorial(const RootedTree& t);  // t! = |t| t1! ... tk!
// a'([g1..gn]) = prod 1 / (gi! (|gi| + 1)).
Rational aprime_coefficient(const RootedTree& t);

// Polynomial vector field on R^m.
struct PolyVectorField {
  int dim = 0;
  std::vector<Polynomial> comps;

  Vec eval(const double* x) const;
};

// On the 2d-dimensional (x, p) space: components pi^{ij}(x) p_j for x, zero for p.
PolyVectorField spray_vector_field(const PoissonStructure& P);

// F^{H,X}_t(x): for t = [t1..tm], sum over indices of
// D^{i1}_{t1}X ... D^{im}_{tm}X d_{i1}..d_{im} H(x); F_leaf = H(x).
double f_symbol(const Polynomial& H, const PolyVectorField& X, const RootedTree& t, const std::vector<double>& x);

// D_t X(x): F^{X^u,X}_t for each component u.
std::vector<double> elementary_differential(const PolyVectorField& X, const RootedTree& t,
                                            const std::vector<double>& x);

struct LieCheck {
  double lhs = 0.0;  // L_X^n x^i by repeated differentiation
  double rhs = 0.0;  // sum_{|t|=n} n!/(t! sigma(t)) D^i_t X
};

LieCheck iterated_lie_check(const PolyVectorField& X, int n, const std::vector<double>& x, int i);

// x + sum_{|t|<=N} eps^{|t|} a_t D_t X(x) / sigma(t). Throws if a tree is missing.
std::vector<double> butcher_eval(const std::map<RootedTree, double>& a, const PolyVectorField& X,
                                 const std::vector<double>& x, double eps, int N);

}  // namespace pg
