#ifndef AXYB_TEST_HELPERS_HPP
#define AXYB_TEST_HELPERS_HPP

#include "axyb/rng.hpp"
#include "axyb/se3.hpp"

namespace axyb::testing {

inline Twist random_twist(Rng& rng, double rot_scale = 1.0, double trans_scale = 1.0) {
  Twist z;
  for (int i = 0; i < 3; ++i) z[i] = rng.uniform(-rot_scale, rot_scale);
  for (int i = 3; i < 6; ++i) z[i] = rng.uniform(-trans_scale, trans_scale);
  return z;
}

inline Pose random_pose(Rng& rng, double rot_scale = 1.0, double trans_scale = 1.0) {
  return exp_twist(random_twist(rng, rot_scale, trans_scale));
}

}  // namespace axyb::testing

#endif
