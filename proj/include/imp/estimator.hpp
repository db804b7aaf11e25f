#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <utility>

#include "imp/operable_vector.hpp"

namespace imp {

/// One force-motion observation at the interaction interface.
struct PerceptionSample {
  double dx = 0.0;  ///< interface displacement, m
  double v = 0.0;   ///< interface closing speed, m/s
  double F = 0.0;   ///< normal force, N

  bool finite() const;
};

struct RegressorRow {
  std::array<double, 3> h{};  ///< [dx, v, 1]
  double y = 0.0;
};

/// FIFO window of regressor rows for Y = H theta + V.
class RegressorBuffer {
 public:
  explicit RegressorBuffer(std::size_t capacity = 256);

  /// Appends ([s.dx, s.v, 1], s.F); evicts the oldest row at capacity.
  /// Throws std::invalid_argument for non-finite samples.
  void accumulate(const PerceptionSample& s);
  void clear() { rows_.clear(); }

  std::size_t size() const { return rows_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<RegressorRow>& rows() const { return rows_; }

 private:
  std::size_t capacity_;
  std::deque<RegressorRow> rows_;
};

struct ConfidenceConfig {
  std::size_t min_samples = 30;
  double condition_ceiling = 1e6;
  double residual_bound = 0.5;  ///< N
};

struct ConfidenceReport {
  double residual_rms = 0.0;
  double condition_estimate = 0.0;
  std::size_t sample_count = 0;
  bool confident = false;
};

/// Thrown when the buffer cannot determine theta (too few rows or the
/// regressor is numerically rank deficient).
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Least-squares theta minimizing sum (y - h^T theta)^2, via SVD of H.
std::pair<OperableVector, ConfidenceReport> estimate_theta(const RegressorBuffer& buf,
                                                           const ConfidenceConfig& cfg = {});

/// Sum of squared residuals of theta over the buffer.
double least_squares_cost(const RegressorBuffer& buf, const OperableVector& theta);

struct ProbeConfig {
  int ramp_ticks = 50;   ///< 1 s at 50 Hz
  int hold_ticks = 25;   ///< per plateau
};

/// Ramp 0 -> F_max, hold 0.5 F_max, hold F_max; F_max after the profile ends.
double probe_schedule(int step, double f_max, const ProbeConfig& cfg = {});
int probe_profile_length(const ProbeConfig& cfg = {});

enum class Operability { unknown, operable, inoperable };

/// Unknown until the report is confident; then inoperable iff the object moved
/// less than move_threshold under the probe.
Operability classify_operability(const OperableVector& theta, const ConfidenceReport& report,
                                 double displacement_seen, double f_max, double move_threshold = 0.002);

}  // namespace imp
