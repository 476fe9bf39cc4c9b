#include "axyb/se3.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "axyb/error.hpp"

namespace axyb {

namespace {

void check_finite(const Twist& zeta, const char* who) {
  if (!zeta.allFinite()) {
    throw_error(ErrorKind::InvalidArgument, std::string(who) + ": non-finite input");
  }
}

// sin(x)/x and friends with Taylor fallbacks below kSmallAngle.
double sinc(double theta) {
  if (std::abs(theta) < kSmallAngle) {
    double t2 = theta * theta;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
  }
  return std::sin(theta) / theta;
}

// (1 - cos x) / x^2
double cosc(double theta) {
  if (std::abs(theta) < kSmallAngle) {
    double t2 = theta * theta;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40320.0;
  }
  return (1.0 - std::cos(theta)) / (theta * theta);
}

// (x - sin x) / x^3
double sincc(double theta) {
  if (std::abs(theta) < kSmallAngle) {
    double t2 = theta * theta;
    return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0;
  }
  return (theta - std::sin(theta)) / (theta * theta * theta);
}

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Vec3 unskew(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat4 hat(const Twist& zeta) {
  Mat4 xi = Mat4::Zero();
  xi.topLeftCorner<3, 3>() = skew(zeta.head<3>());
  xi.topRightCorner<3, 1>() = zeta.tail<3>();
  return xi;
}

Twist vee(const Mat4& xi) {
  Twist zeta;
  zeta.head<3>() = unskew(xi.topLeftCorner<3, 3>());
  zeta.tail<3>() = xi.topRightCorner<3, 1>();
  return zeta;
}

double rotation_defect(const Mat3& R) {
  double ortho = (R.transpose() * R - Mat3::Identity()).norm();
  double det = std::abs(R.determinant() - 1.0);
  return std::max(ortho, det);
}

Mat3 project_rotation(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 D = Mat3::Identity();
    D(2, 2) = -1.0;
    R = svd.matrixU() * D * svd.matrixV().transpose();
  }
  return R;
}

Mat3 rot_x(double a) {
  Mat3 R;
  R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return R;
}

Mat3 rot_y(double a) {
  Mat3 R;
  R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return R;
}

Mat3 rot_z(double a) {
  Mat3 R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return R;
}

Mat3 exp_so3(const Vec3& phi) {
  double theta = phi.norm();
  Mat3 K = skew(phi);
  return Mat3::Identity() + sinc(theta) * K + cosc(theta) * K * K;
}

Vec3 log_so3(const Mat3& R) {
  if (!R.allFinite()) {
    throw_error(ErrorKind::InvalidArgument, "log_so3: non-finite input");
  }
  // a = sin(theta) * axis, c = cos(theta)
  Vec3 a = 0.5 * unskew(R - R.transpose());
  double c = 0.5 * (R.trace() - 1.0);
  c = std::min(1.0, std::max(-1.0, c));
  double s = a.norm();
  double theta = std::atan2(s, c);
  if (theta > M_PI - kLogMargin) {
    throw_error(ErrorKind::DegenerateRotation,
                "log_so3: rotation angle within margin of pi");
  }
  if (theta < kSmallAngle) {
    // a / sinc(theta) with sinc ~ 1; keep two series terms.
    return a * (1.0 + theta * theta / 6.0);
  }
  return a * (theta / s);
}

Mat3 v3(const Vec3& phi) {
  double theta = phi.norm();
  Mat3 K = skew(phi);
  return Mat3::Identity() + cosc(theta) * K + sincc(theta) * K * K;
}

Mat3 v3_inverse(const Vec3& phi) {
  double theta = phi.norm();
  Mat3 K = skew(phi);
  double coeff;
  // The closed form cancels catastrophically below ~0.02 rad; the series
  // truncation error there is under 1e-16.
  if (theta < 0.02) {
    double t2 = theta * theta;
    coeff = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    coeff = (1.0 - 0.5 * theta * std::sin(theta) / (1.0 - std::cos(theta))) / (theta * theta);
  }
  return Mat3::Identity() - 0.5 * K + coeff * K * K;
}

Pose exp_twist(const Twist& zeta) {
  check_finite(zeta, "exp_twist");
  Vec3 phi = zeta.head<3>();
  Vec3 rho = zeta.tail<3>();
  return Pose(exp_so3(phi), v3(phi) * rho);
}

Twist log_pose(const Pose& p) {
  if (!p.R.allFinite() || !p.t.allFinite()) {
    throw_error(ErrorKind::InvalidArgument, "log_pose: non-finite input");
  }
  Vec3 phi = log_so3(p.R);
  Twist zeta;
  zeta.head<3>() = phi;
  zeta.tail<3>() = v3_inverse(phi) * p.t;
  return zeta;
}

Mat6 adjoint_group(const Pose& p) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = p.R;
  ad.bottomRightCorner<3, 3>() = p.R;
  ad.bottomLeftCorner<3, 3>() = skew(p.t) * p.R;
  return ad;
}

Mat6 adjoint_algebra(const Twist& zeta) {
  Mat6 ad = Mat6::Zero();
  Mat3 phix = skew(zeta.head<3>());
  ad.topLeftCorner<3, 3>() = phix;
  ad.bottomRightCorner<3, 3>() = phix;
  ad.bottomLeftCorner<3, 3>() = skew(zeta.tail<3>());
  return ad;
}

Mat6 right_jacobian(const Twist& zeta) {
  check_finite(zeta, "right_jacobian");
  double theta = zeta.head<3>().norm();
  if (theta > M_PI - kLogMargin) {
    throw_error(ErrorKind::DegenerateRotation,
                "right_jacobian: rotation angle within margin of pi");
  }
  Mat6 ad = adjoint_algebra(zeta);
  Mat6 ad2 = ad * ad;
  double t2 = theta * theta;
  double c1, c2, c3, c4;
  // The coefficients cancel badly at small angles; switching them to their
  // theta-series keeps the exact degree-4 polynomial structure valid for
  // arbitrarily large translations (at phi = 0 the algebra adjoint is
  // nilpotent and the tail terms vanish on their own).
  if (theta < 0.02) {
    double t4 = t2 * t2;
    c1 = 0.5 - t4 / 720.0;
    c2 = 1.0 / 6.0 - t4 / 5040.0;
    c3 = 1.0 / 24.0 - t2 / 360.0 + t4 / 13440.0;
    c4 = 1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0;
  } else {
    double s = std::sin(theta);
    double c = std::cos(theta);
    c1 = (4.0 - theta * s - 4.0 * c) / (2.0 * t2);
    c2 = (4.0 * theta - 5.0 * s + theta * c) / (2.0 * t2 * theta);
    c3 = (2.0 - theta * s - 2.0 * c) / (2.0 * t2 * t2);
    c4 = (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t2 * theta);
  }
  return Mat6::Identity() - c1 * ad + c2 * ad2 - c3 * ad2 * ad + c4 * ad2 * ad2;
}

Mat6 left_jacobian(const Twist& zeta) { return right_jacobian(-zeta); }

Mat6 right_jacobian_inverse(const Twist& zeta) {
  return right_jacobian(zeta).partialPivLu().inverse();
}

Mat6 left_jacobian_inverse(const Twist& zeta) {
  return left_jacobian(zeta).partialPivLu().inverse();
}

}  // namespace axyb
