#pragma once

#include "pg/types.hpp"

#include <initializer_list>

namespace pg::testing {

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline double maxabs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace pg::testing
