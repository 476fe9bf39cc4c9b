#include "axyb/screw.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace axyb {

ScrewParams screw_decompose(const Pose& p) {
  ScrewParams s;
  Vec3 phi = log_so3(p.R);
  double theta = phi.norm();
  if (theta < kSmallAngle) {
    double tn = p.t.norm();
    if (tn < 1e-15) {
      s.degenerate = true;
      return s;
    }
    // Pure translation: h carries the displacement, axis along t.
    s.theta = 0.0;
    s.h = tn;
    s.k = p.t / tn;
    s.c = Vec3::Zero();
    return s;
  }
  s.theta = theta;
  s.k = phi / theta;
  s.h = s.k.dot(p.t) / theta;
  // (I - R) c = t - h theta k with c in the plane normal to k; adding k k^T
  // makes the system invertible and the solution lands in that plane because
  // k^T (t - h theta k) = 0 by construction of h.
  Mat3 M = Mat3::Identity() - p.R + s.k * s.k.transpose();
  s.c = M.partialPivLu().solve(p.t - s.h * theta * s.k);
  return s;
}

Pose screw_compose(const ScrewParams& s) {
  if (s.theta == 0.0) {
    return Pose(Mat3::Identity(), s.h * s.k);
  }
  Mat3 R = exp_so3(s.theta * s.k);
  Vec3 t = (Mat3::Identity() - R) * s.c + s.h * s.theta * s.k;
  return Pose(R, t);
}

}  // namespace axyb
