#include "axyb/solvers.hpp"

#include <cmath>

#include "axyb/error.hpp"

namespace axyb {

void SolverConfig::validate() const {
  if (!(alpha > 0)) throw_error(ErrorKind::InvalidArgument, "SolverConfig: alpha must be > 0");
  if (beta < 0 || beta >= 1) {
    throw_error(ErrorKind::InvalidArgument, "SolverConfig: beta must be in [0, 1)");
  }
  if (!(tol > 0)) throw_error(ErrorKind::InvalidArgument, "SolverConfig: tol must be > 0");
  if (!(lm_mu > 1)) throw_error(ErrorKind::InvalidArgument, "SolverConfig: lm_mu must be > 1");
}

Pose closed_form_error(const Pose& a, const Pose& b, const Pose& x, const Pose& y,
                       ClosedForm form) {
  switch (form) {
    case ClosedForm::CF1:
      return y.inverse() * a * x * b.inverse();
    case ClosedForm::CF2:
      return a * x * b.inverse() * y.inverse();
    case ClosedForm::CF3:
      return x * b.inverse() * y.inverse() * a;
    case ClosedForm::CF4:
      return b.inverse() * y.inverse() * a * x;
    case ClosedForm::Auto:
      break;
  }
  throw_error(ErrorKind::InvalidArgument, "closed_form_error: unresolved Auto form");
}

ClosedForm resolve_closed_form(ClosedForm form, const Pose& init_x, const Pose& init_y) {
  if (form != ClosedForm::Auto) return form;
  // Source noise enters CF1/CF2 conjugated by Y and CF3/CF4 conjugated by X;
  // prefer conjugation by the smaller translation.
  return init_y.t.norm() > init_x.t.norm() ? ClosedForm::CF4 : ClosedForm::CF1;
}

double heuristic_metric(const PosePairSet& pairs, const Pose& x, const Pose& y,
                        ClosedForm form) {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      sum += log_pose(closed_form_error(pairs.a[i], pairs.b[i], x, y, form)).norm();
      ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateRotation) throw;
    }
  }
  if (used == 0) {
    throw_error(ErrorKind::DegenerateRotation, "heuristic_metric: every pair degenerate");
  }
  return sum / static_cast<double>(used);
}

}  // namespace axyb
