#pragma once

#include <map>
#include <string>
#include <vector>

namespace pg {

using Exponents = std::vector<int>;

// Sparse multivariate polynomial with real coefficients, keyed by exponent
// multi-index. Exact differentiation and products; evaluation in double.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int k);

  int nvars() const { return nvars_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  void add_term(const Exponents& e, double c);

  double eval(const double* x) const;
  double eval(const std::vector<double>& x) const { return eval(x.data()); }

  Polynomial derivative(int k) const;
  // Mixed partial derivative d^a / dx^a for a multi-index a.
  Polynomial derivative(const Exponents& a) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double s) const;

  std::string to_string() const;

 private:
  int nvars_ = 0;
  std::map<Exponents, double> terms_;
};

}  // namespace pg
