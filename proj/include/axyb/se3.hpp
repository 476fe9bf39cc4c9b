#ifndef AXYB_SE3_HPP
#define AXYB_SE3_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace axyb {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// se(3) element in vector form, rotation-first: [phi; rho].
/// phi (rad) generates the rotation, rho (m) the translation through V3.
/// Note that much external software stores twists translation-first; every
/// 6-vector in this library follows the rotation-first convention so the
/// blocks line up with the adjoint layout of adjoint_group()/adjoint_algebra().
using Twist = Vec6;

/// Angle below which closed-form Rodrigues/Jacobian coefficients switch to
/// their Taylor expansions (coefficient cancellation otherwise costs digits).
inline constexpr double kSmallAngle = 1e-4;

/// Rotations with angle above pi - kLogMargin are rejected by log_pose and
/// the Jacobians; the branch ambiguity at a half turn is not worth resolving
/// for calibration motions.
inline constexpr double kLogMargin = 1e-6;

/// Rigid transform stored as (R, t); the homogeneous 4x4 embedding is built
/// on demand so the bottom row can never drift.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& rotation, const Vec3& translation) : R(rotation), t(translation) {}

  static Pose identity() { return Pose(); }

  Pose operator*(const Pose& other) const { return Pose(R * other.R, R * other.t + t); }

  Pose inverse() const {
    Mat3 Rt = R.transpose();
    return Pose(Rt, -(Rt * t));
  }

  Vec3 apply(const Vec3& p) const { return R * p + t; }

  Mat4 homogeneous() const {
    Mat4 g = Mat4::Identity();
    g.topLeftCorner<3, 3>() = R;
    g.topRightCorner<3, 1>() = t;
    return g;
  }

  static Pose from_homogeneous(const Mat4& g) {
    return Pose(g.topLeftCorner<3, 3>(), g.topRightCorner<3, 1>());
  }

  bool isApprox(const Pose& other, double tol = 1e-12) const {
    return R.isApprox(other.R, tol) && (t - other.t).norm() <= tol * (1.0 + t.norm());
  }
};

/// Skew-symmetric matrix of v: skew(v) * u = v x u.
Mat3 skew(const Vec3& v);

/// Inverse of skew for exactly skew-symmetric input.
Vec3 unskew(const Mat3& m);

/// 4x4 se(3) matrix of a twist; hat/vee are exact inverses.
Mat4 hat(const Twist& zeta);
Twist vee(const Mat4& xi);

/// Orthonormality / determinant defect of a rotation candidate (Frobenius).
double rotation_defect(const Mat3& R);

/// Nearest rotation in Frobenius norm (SVD polar projection).
Mat3 project_rotation(const Mat3& M);

/// Rotation about a coordinate axis.
Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// SO(3) exponential (Rodrigues).
Mat3 exp_so3(const Vec3& phi);

/// SO(3) logarithm. Throws DegenerateRotation above pi - kLogMargin.
Vec3 log_so3(const Mat3& R);

/// Left Jacobian of SO(3); couples rho to the translation in exp_twist.
Mat3 v3(const Vec3& phi);
Mat3 v3_inverse(const Vec3& phi);

/// exp: se(3) -> SE(3). R = exp_so3(phi), t = v3(phi) * rho.
Pose exp_twist(const Twist& zeta);

/// log: SE(3) -> se(3). Inverse of exp_twist on the admissible domain.
Twist log_pose(const Pose& p);

/// Group adjoint [[R, 0], [skew(t) R, R]]; transports twists between frames:
/// vee(T hat(x) T^-1) = adjoint_group(T) x.
Mat6 adjoint_group(const Pose& p);

/// Algebra adjoint [[skew(phi), 0], [skew(rho), skew(phi)]] (the bracket).
Mat6 adjoint_algebra(const Twist& zeta);

/// Right Jacobian of SE(3): log(exp(-z) exp(z + d)) ~= right_jacobian(z) d.
/// Closed-form degree-4 polynomial in adjoint_algebra(z); Taylor fallback
/// below kSmallAngle. Throws DegenerateRotation above pi - kLogMargin.
Mat6 right_jacobian(const Twist& zeta);

/// Left Jacobian, J_l(z) = J_r(-z).
Mat6 left_jacobian(const Twist& zeta);

/// Inverses of the SE(3) Jacobians (dense 6x6 solve).
Mat6 right_jacobian_inverse(const Twist& zeta);
Mat6 left_jacobian_inverse(const Twist& zeta);

}  // namespace axyb

#endif  // AXYB_SE3_HPP
