#pragma once

#include <cmath>

namespace imp {

/// Contact-interface constants of one object: F = K * dx + D * v + C.
struct OperableVector {
  double K = 0.0;  ///< spring constant, N/m
  double D = 0.0;  ///< damping coefficient, N s/m
  double C = 0.0;  ///< displacement constant, N

  bool finite() const { return std::isfinite(K) && std::isfinite(D) && std::isfinite(C); }
  friend bool operator==(const OperableVector&, const OperableVector&) = default;
};

}  // namespace imp
