#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pg {

// Coordinate dimension is small in every use; fixed-capacity storage keeps
// the inner flow loops free of heap traffic.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// A point (x, p) of T*M = M x M*.
struct PhasePoint {
  Vec x;
  Vec p;
};

inline Vec zeros(int d) { return Vec::Zero(d); }

// Trajectory left the configured box [-box, box]^{2d}.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, double exit_time)
      : std::runtime_error(what), exit_time_(exit_time) {}
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

// A Newton or fixed-point solve did not converge: the input is outside the
// local domain where the germ-level constructions make sense.
class OutsideLocalDomain : public std::runtime_error {
 public:
  OutsideLocalDomain(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace pg
