#include "axyb/series.hpp"

#include "axyb/error.hpp"

namespace axyb {

Mat4 exp_series(const Mat4& m, std::size_t terms) {
  Mat4 sum = Mat4::Identity();
  Mat4 term = Mat4::Identity();
  for (std::size_t k = 1; k <= terms; ++k) {
    term = (term * m) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

Mat4 log_series(const Mat4& g, std::size_t terms) {
  Mat4 d = g - Mat4::Identity();
  if (d.norm() >= 1.0) {
    throw_error(ErrorKind::OutOfDomain, "log_series: |G - I| >= 1, series diverges");
  }
  Mat4 sum = Mat4::Zero();
  Mat4 power = Mat4::Identity();
  for (std::size_t k = 1; k <= terms; ++k) {
    power = power * d;
    double coeff = ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k);
    sum += coeff * power;
  }
  return sum;
}

}  // namespace axyb
