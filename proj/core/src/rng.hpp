#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "outctrl/types.hpp"

namespace outctrl::internal {

// Deterministic Gaussian stream on top of the (fully specified) mt19937_64
// engine.  Uniform and normal variates are derived from raw 64-bit draws
// rather than std distributions, whose output is implementation-defined.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform draw in (0, 1].
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard real normal via the Box-Muller transform.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  /// Circular complex normal with unit total variance.
  Complex complex_normal() {
    constexpr double kInvSqrt2 = 0.7071067811865476;
    const double re = normal();
    const double im = normal();
    return Complex(re * kInvSqrt2, im * kInvSqrt2);
  }

  /// Integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return eng_() % bound; }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        M(i, j) = complex_normal();
      }
    }
    return M;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace outctrl::internal
