#ifndef AXYB_SCREW_HPP
#define AXYB_SCREW_HPP

#include "axyb/se3.hpp"

namespace axyb {

/// Screw parameters of a rigid motion: rotate by theta about the line
/// through c with direction k, translating h per radian along k.
/// Conventions for the degenerate cases:
///  - pure translation (theta ~ 0, t != 0): theta = 0, h = |t|, k = t/|t|, c = 0
///  - identity: all zero with k = (0, 0, 1), flagged degenerate
struct ScrewParams {
  double theta = 0.0;   // rad
  double h = 0.0;       // m per rad (pitch); m for the pure-translation case
  Vec3 k = Vec3(0, 0, 1);
  Vec3 c = Vec3::Zero();  // point on the axis, c . k = 0
  bool degenerate = false;
};

ScrewParams screw_decompose(const Pose& p);

/// Rebuild the pose: R = exp(theta k^), t = (I - R) c + h theta k.
Pose screw_compose(const ScrewParams& s);

}  // namespace axyb

#endif  // AXYB_SCREW_HPP
