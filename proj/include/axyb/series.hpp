#ifndef AXYB_SERIES_HPP
#define AXYB_SERIES_HPP

#include <cstddef>

#include "axyb/se3.hpp"

namespace axyb {

/// Truncated matrix power series for exp and log around the identity.
/// Slow but transparent; kept as independent cross-checks for exp_twist
/// and log_pose rather than for production use.

Mat4 exp_series(const Mat4& m, std::size_t terms);

/// Requires |g - I| < 1 (series domain); throws OutOfDomain otherwise.
Mat4 log_series(const Mat4& g, std::size_t terms);

}  // namespace axyb

#endif  // AXYB_SERIES_HPP
