#pragma once

#include <array>
#include <stdexcept>

#include "imp/geometry.hpp"

namespace imp {

/// Planar two-link arm with point masses at the link tips.
struct ArmModel2R {
  double l1 = 1.0;
  double l2 = 1.0;
  std::array<double, 2> q{};   ///< joint angles, rad
  double m1 = 1.0;             ///< kg, used by the dynamics helpers
  double m2 = 1.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;
using Torque2 = std::array<double, 2>;

/// Thrown for configurations where J cannot be inverted.
class SingularConfigurationError : public std::runtime_error {
 public:
  SingularConfigurationError(const std::string& what, double det) : std::runtime_error(what), det_(det) {}
  double abs_det() const { return det_; }

 private:
  double det_;
};

Point2 forward_kinematics(const ArmModel2R& arm);
/// Analytic end-effector Jacobian d(x, y)/d(q1, q2).
Mat2 jacobian(const ArmModel2R& arm);
/// |det J| = l1 l2 |sin q2|.
double jacobian_abs_det(const ArmModel2R& arm);

/// tau* = J^{-1} F*. Throws SingularConfigurationError when |sin q2| <= 1e-6.
Torque2 joint_space_map(const Vec2& force, const ArmModel2R& arm);
/// Joint torques produced by an external end-effector force: tau_ext = J^T F_ext.
Torque2 external_torque(const Vec2& f_ext, const ArmModel2R& arm);

/// Joint-space inertia M(q) of the tip-mass model.
Mat2 mass_matrix(const ArmModel2R& arm);
/// Coriolis and centrifugal torques C(q, qd) qd.
Torque2 coriolis_torque(const ArmModel2R& arm, const std::array<double, 2>& qd);
/// qdd from M qdd + C qd + G = tau - tau_ext, with G = 0 on the horizontal plane.
std::array<double, 2> joint_acceleration(const ArmModel2R& arm, const std::array<double, 2>& qd,
                                         const Torque2& tau, const Torque2& tau_ext);

}  // namespace imp
