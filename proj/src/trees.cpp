#include "pg/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace pg {

RootedTree::RootedTree(std::vector<RootedTree> children) : children_(std::move(children)) {
  std::sort(children_.begin(), children_.end());
  size_ = 1;
  for (const auto& c : children_) size_ += c.size_;
}

std::strong_ordering operator<=>(const RootedTree& a, const RootedTree& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  const size_t n = std::min(a.children_.size(), b.children_.size());
  for (size_t k = 0; k < n; ++k)
    if (auto c = a.children_[k] <=> b.children_[k]; c != 0) return c;
  return a.children_.size() <=> b.children_.size();
}

std::string RootedTree::to_string() const {
  std::string s = "[";
  for (size_t k = 0; k < children_.size(); ++k) {
    if (k) s += ",";
    s += children_[k].to_string();
  }
  return s + "]";
}

RootedTree RootedTree::parse(const std::string& text) {
  size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  std::function<RootedTree()> node = [&]() -> RootedTree {
    skip();
    if (pos >= text.size() || text[pos] != '[')
      throw std::invalid_argument("tree parse: expected '[' at offset " + std::to_string(pos));
    ++pos;
    std::vector<RootedTree> kids;
    skip();
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      return RootedTree(std::move(kids));
    }
    for (;;) {
      kids.push_back(node());
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == ']') {
        ++pos;
        return RootedTree(std::move(kids));
      }
      throw std::invalid_argument("tree parse: expected ',' or ']' at offset " + std::to_string(pos));
    }
  };
  RootedTree t = node();
  skip();
  if (pos != text.size()) throw std::invalid_argument("tree parse: trailing characters");
  return t;
}

namespace {

// Every tree obtained by attaching one new leaf somewhere in t.
void graft_leaf(const RootedTree& t, std::set<RootedTree>& out) {
  std::vector<RootedTree> kids = t.children();
  kids.emplace_back();
  out.insert(RootedTree(kids));
  const auto& ch = t.children();
  for (size_t k = 0; k < ch.size(); ++k) {
    if (k > 0 && ch[k] == ch[k - 1]) continue;
    std::set<RootedTree> sub;
    graft_leaf(ch[k], sub);
    for (const auto& s : sub) {
      std::vector<RootedTree> next = ch;
      next[k] = s;
      out.insert(RootedTree(std::move(next)));
    }
  }
}

long long factorial(int n) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

std::vector<RootedTree> enumerate_trees(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("enumerate_trees: n must be in [1, 8]");
  std::set<RootedTree> level{RootedTree()};
  for (int k = 2; k <= n; ++k) {
    std::set<RootedTree> next;
    for (const auto& t : level) graft_leaf(t, next);
    level = std::move(next);
  }
  return {level.begin(), level.end()};
}

long long sigma(const RootedTree& t) {
  long long s = 1;
  const auto& ch = t.children();
  for (size_t k = 0; k < ch.size();) {
    size_t m = k;
    while (m < ch.size() && ch[m] == ch[k]) ++m;
    const long long sc = sigma(ch[k]);
    s *= factorial(static_cast<int>(m - k));
    for (size_t r = k; r < m; ++r) s *= sc;
    k = m;
  }
  return s;
}

long long tree_factorial(const RootedTree& t) {
  long long f = t.size();
  for (const auto& c : t.children()) f *= tree_factorial(c);
  return f;
}

Rational aprime_coefficient(const RootedTree& t) {
  Rational a(1);
  for (const auto& c : t.children()) a /= Rational(tree_factorial(c) * (c.size() + 1));
  return a;
}

Vec PolyVectorField::eval(const double* x) const {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = comps[i].eval(x);
  return v;
}

PolyVectorField spray_vector_field(const PoissonStructure& P) {
  const int d = P.dim();
  PolyVectorField V;
  V.dim = 2 * d;
  // Lift pi^{ij}(x) into the variables (x, p) and contract with p_j.
  auto lift = [&](const Polynomial& q) {
    Polynomial r(2 * d);
    for (const auto& [e, c] : q.terms()) {
      Exponents f(2 * d, 0);
      std::copy(e.begin(), e.end(), f.begin());
      r.add_term(f, c);
    }
    return r;
  };
  for (int i = 0; i < d; ++i) {
    Polynomial s(2 * d);
    for (int j = 0; j < d; ++j) s = s + lift(P.component(i, j)) * Polynomial::variable(2 * d, d + j);
    V.comps.push_back(s);
  }
  for (int i = 0; i < d; ++i) V.comps.emplace_back(2 * d);
  return V;
}

namespace {

class Evaluator {
 public:
  Evaluator(const PolyVectorField& X, const std::vector<double>& x) : X_(X), x_(x) {
    if (static_cast<int>(x.size()) != X.dim) throw std::invalid_argument("tree symbol: point dimension mismatch");
  }

  const std::vector<double>& diff(const RootedTree& t) {
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    std::vector<double> v(X_.dim);
    for (int u = 0; u < X_.dim; ++u) v[u] = symbol(X_.comps[u], t);
    return memo_.emplace(t, std::move(v)).first->second;
  }

  double symbol(const Polynomial& H, const RootedTree& t) {
    const auto& ch = t.children();
    if (ch.empty()) return H.eval(x_.data());
    std::vector<const std::vector<double>*> vs;
    for (const auto& c : ch) vs.push_back(&diff(c));
    const int m = static_cast<int>(ch.size());
    const int d = X_.dim;
    std::vector<int> idx(m, 0);
    double total = 0.0;
    for (;;) {
      double w = 1.0;
      Exponents e(d, 0);
      for (int k = 0; k < m && w != 0.0; ++k) {
        w *= (*vs[k])[idx[k]];
        e[idx[k]] += 1;
      }
      if (w != 0.0) total += w * H.derivative(e).eval(x_.data());
      int k = 0;
      while (k < m && ++idx[k] == d) idx[k++] = 0;
      if (k == m) break;
    }
    return total;
  }

 private:
  const PolyVectorField& X_;
  const std::vector<double>& x_;
  std::map<RootedTree, std::vector<double>> memo_;
};

}  // namespace

double f_symbol(const Polynomial& H, const PolyVectorField& X, const RootedTree& t, const std::vector<double>& x) {
  Evaluator ev(X, x);
  return ev.symbol(H, t);
}

std::vector<double> elementary_differential(const PolyVectorField& X, const RootedTree& t,
                                            const std::vector<double>& x) {
  Evaluator ev(X, x);
  return ev.diff(t);
}

LieCheck iterated_lie_check(const PolyVectorField& X, int n, const std::vector<double>& x, int i) {
  if (n < 1 || n > 5) throw std::invalid_argument("iterated_lie_check: n must be in [1, 5]");
  if (i < 0 || i >= X.dim) throw std::invalid_argument("iterated_lie_check: component out of range");
  Polynomial f = Polynomial::variable(X.dim, i);
  for (int k = 0; k < n; ++k) {
    Polynomial g(X.dim);
    for (int j = 0; j < X.dim; ++j) g = g + X.comps[j] * f.derivative(j);
    f = g;
  }
  LieCheck out;
  out.lhs = f.eval(x.data());
  Evaluator ev(X, x);
  const double nf = static_cast<double>(factorial(n));
  for (const auto& t : enumerate_trees(n))
    out.rhs += nf / static_cast<double>(tree_factorial(t) * sigma(t)) * ev.diff(t)[i];
  return out;
}

std::vector<double> butcher_eval(const std::map<RootedTree, double>& a, const PolyVectorField& X,
                                 const std::vector<double>& x, double eps, int N) {
  if (N < 0 || N > 8) throw std::invalid_argument("butcher_eval: N must be in [0, 8]");
  Evaluator ev(X, x);
  std::vector<double> out = x;
  for (int n = 1; n <= N; ++n) {
    const double en = std::pow(eps, n);
    for (const auto& t : enumerate_trees(n)) {
      auto it = a.find(t);
      if (it == a.end()) throw std::invalid_argument("butcher_eval: no coefficient for tree " + t.to_string());
      const auto& D = ev.diff(t);
      const double c = en * it->second / static_cast<double>(sigma(t));
      for (int u = 0; u < X.dim; ++u) out[u] += c * D[u];
    }
  }
  return out;
}

}  // namespace pg
