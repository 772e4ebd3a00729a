#include "pg/polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pg {

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial r(nvars);
  r.add_term(Exponents(nvars, 0), c);
  return r;
}

Polynomial Polynomial::variable(int nvars, int k) {
  Polynomial r(nvars);
  Exponents e(nvars, 0);
  e.at(k) = 1;
  r.add_term(e, 1.0);
  return r;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (static_cast<int>(e.size()) != nvars_)
    throw std::invalid_argument("polynomial: exponent length mismatch");
  for (int v : e)
    if (v < 0) throw std::invalid_argument("polynomial: negative exponent");
  if (c == 0.0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::eval(const double* x) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int k = 0; k < nvars_; ++k)
      for (int q = 0; q < e[k]; ++q) m *= x[k];
    s += m;
  }
  return s;
}

Polynomial Polynomial::derivative(int k) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponents f = e;
    f[k] -= 1;
    r.add_term(f, c * e[k]);
  }
  return r;
}

Polynomial Polynomial::derivative(const Exponents& a) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    double coef = c;
    Exponents f = e;
    bool zero = false;
    for (int k = 0; k < nvars_ && !zero; ++k) {
      for (int q = 0; q < a[k]; ++q) {
        if (f[k] == 0) {
          zero = true;
          break;
        }
        coef *= f[k];
        f[k] -= 1;
      }
    }
    if (!zero) r.add_term(f, coef);
  }
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  if (r.nvars_ == 0) r.nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(nvars_, o.nvars_));
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponents e(r.nvars_, 0);
      for (int k = 0; k < r.nvars_; ++k) e[k] = e1[k] + e2[k];
      r.add_term(e, c1 * c2);
    }
  return r;
}

Polynomial Polynomial::scaled(double s) const {
  Polynomial r(nvars_);
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.add_term(e, c * s);
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int k = 0; k < nvars_; ++k)
      if (e[k] > 0) {
        os << "*x" << k;
        if (e[k] > 1) os << "^" << e[k];
      }
  }
  return os.str();
}

}  // namespace pg
