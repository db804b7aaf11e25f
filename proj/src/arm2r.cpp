#include "imp/arm2r.hpp"

#include <cmath>

namespace imp {

namespace {

constexpr double kSingularSine = 1e-6;

void check_links(const ArmModel2R& arm) {
  if (!(arm.l1 > 0.0) || !(arm.l2 > 0.0)) throw std::invalid_argument("ArmModel2R: link lengths must be positive");
}

std::array<double, 2> solve(const Mat2& a, const std::array<double, 2>& b) {
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  return {(a[1][1] * b[0] - a[0][1] * b[1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det};
}

}  // namespace

Point2 forward_kinematics(const ArmModel2R& arm) {
  check_links(arm);
  const double q1 = arm.q[0], q12 = arm.q[0] + arm.q[1];
  return {arm.l1 * std::cos(q1) + arm.l2 * std::cos(q12), arm.l1 * std::sin(q1) + arm.l2 * std::sin(q12)};
}

Mat2 jacobian(const ArmModel2R& arm) {
  check_links(arm);
  const double q1 = arm.q[0], q12 = arm.q[0] + arm.q[1];
  const double s1 = std::sin(q1), c1 = std::cos(q1), s12 = std::sin(q12), c12 = std::cos(q12);
  return {{{-arm.l1 * s1 - arm.l2 * s12, -arm.l2 * s12}, {arm.l1 * c1 + arm.l2 * c12, arm.l2 * c12}}};
}

double jacobian_abs_det(const ArmModel2R& arm) { return arm.l1 * arm.l2 * std::abs(std::sin(arm.q[1])); }

Torque2 joint_space_map(const Vec2& force, const ArmModel2R& arm) {
  check_links(arm);
  if (std::abs(std::sin(arm.q[1])) <= kSingularSine)
    throw SingularConfigurationError("joint_space_map: arm is at a singular configuration", jacobian_abs_det(arm));
  return solve(jacobian(arm), {force.x, force.y});
}

Torque2 external_torque(const Vec2& f_ext, const ArmModel2R& arm) {
  const Mat2 j = jacobian(arm);
  return {j[0][0] * f_ext.x + j[1][0] * f_ext.y, j[0][1] * f_ext.x + j[1][1] * f_ext.y};
}

Mat2 mass_matrix(const ArmModel2R& arm) {
  check_links(arm);
  const double c2 = std::cos(arm.q[1]);
  const double l1 = arm.l1, l2 = arm.l2, m1 = arm.m1, m2 = arm.m2;
  const double m11 = m1 * l1 * l1 + m2 * (l1 * l1 + 2.0 * l1 * l2 * c2 + l2 * l2);
  const double m12 = m2 * (l1 * l2 * c2 + l2 * l2);
  return {{{m11, m12}, {m12, m2 * l2 * l2}}};
}

Torque2 coriolis_torque(const ArmModel2R& arm, const std::array<double, 2>& qd) {
  const double h = arm.m2 * arm.l1 * arm.l2 * std::sin(arm.q[1]);
  return {-h * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]), h * qd[0] * qd[0]};
}

std::array<double, 2> joint_acceleration(const ArmModel2R& arm, const std::array<double, 2>& qd,
                                         const Torque2& tau, const Torque2& tau_ext) {
  const Torque2 c = coriolis_torque(arm, qd);
  return solve(mass_matrix(arm), {tau[0] - tau_ext[0] - c[0], tau[1] - tau_ext[1] - c[1]});
}

}  // namespace imp
