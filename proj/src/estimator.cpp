#include "imp/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace imp {

bool PerceptionSample::finite() const { return std::isfinite(dx) && std::isfinite(v) && std::isfinite(F); }

RegressorBuffer::RegressorBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("RegressorBuffer: capacity must be positive");
}

void RegressorBuffer::accumulate(const PerceptionSample& s) {
  if (!s.finite()) throw std::invalid_argument("RegressorBuffer: non-finite sample");
  if (rows_.size() == capacity_) rows_.pop_front();
  rows_.push_back({{s.dx, s.v, 1.0}, s.F});
}

double least_squares_cost(const RegressorBuffer& buf, const OperableVector& theta) {
  double j = 0.0;
  for (const auto& r : buf.rows()) {
    const double e = r.y - (r.h[0] * theta.K + r.h[1] * theta.D + r.h[2] * theta.C);
    j += e * e;
  }
  return j;
}

std::pair<OperableVector, ConfidenceReport> estimate_theta(const RegressorBuffer& buf,
                                                           const ConfidenceConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(buf.size());
  if (n < 3) throw RankDeficientError("estimate_theta: fewer than 3 samples", std::numeric_limits<double>::infinity());

  Eigen::MatrixXd H(n, 3);
  Eigen::VectorXd Y(n);
  Eigen::Index i = 0;
  for (const auto& r : buf.rows()) {
    H.row(i) << r.h[0], r.h[1], r.h[2];
    Y(i) = r.y;
    ++i;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  // Beyond ~1e12 the third direction is numerical noise, not excitation.
  if (!(cond < 1e12)) throw RankDeficientError("estimate_theta: regressor is rank deficient", cond);

  const Eigen::Vector3d theta = svd.solve(Y);
  const OperableVector est{theta(0), theta(1), theta(2)};

  ConfidenceReport rep;
  rep.sample_count = buf.size();
  rep.condition_estimate = cond;
  rep.residual_rms = std::sqrt(least_squares_cost(buf, est) / static_cast<double>(n));
  rep.confident = rep.sample_count >= cfg.min_samples && cond <= cfg.condition_ceiling &&
                  rep.residual_rms <= cfg.residual_bound && est.finite();
  return {est, rep};
}

int probe_profile_length(const ProbeConfig& cfg) { return cfg.ramp_ticks + 2 * cfg.hold_ticks; }

double probe_schedule(int step, double f_max, const ProbeConfig& cfg) {
  if (!(f_max > 0.0)) throw std::invalid_argument("probe_schedule: F_max must be positive");
  if (step <= 0) return 0.0;
  if (step < cfg.ramp_ticks) return f_max * static_cast<double>(step) / static_cast<double>(cfg.ramp_ticks);
  if (step == cfg.ramp_ticks) return f_max;
  if (step <= cfg.ramp_ticks + cfg.hold_ticks) return 0.5 * f_max;
  return f_max;
}

Operability classify_operability(const OperableVector& theta, const ConfidenceReport& report,
                                 double displacement_seen, double /*f_max*/, double move_threshold) {
  // A negative stiffness is physically meaningless; treat it as low confidence.
  if (!report.confident || !(theta.K >= 0.0)) return Operability::unknown;
  return displacement_seen < move_threshold ? Operability::inoperable : Operability::operable;
}

}  // namespace imp
