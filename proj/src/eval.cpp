#include "axyb/eval.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "axyb/error.hpp"
#include "axyb/screw.hpp"
#include "axyb/synth.hpp"

namespace axyb {

ErrorTriple pose_error(const Pose& est, const Pose& truth) {
  double err_r = log_so3(est.R.transpose() * truth.R).norm();
  double err_t = (est.t - truth.t).norm();
  return ErrorTriple::from_components(err_r, err_t);
}

ErrorPair estimation_errors(const Pose& est_x, const Pose& est_y, const Pose& truth_x,
                            const Pose& truth_y) {
  return {pose_error(est_x, truth_x), pose_error(est_y, truth_y)};
}

VarianceTriple error_variance(const std::vector<ErrorTriple>& errors) {
  if (errors.size() < 2) {
    throw_error(ErrorKind::InsufficientData, "error_variance: need at least 2 samples");
  }
  double n = static_cast<double>(errors.size());
  double mr = 0, mt = 0, mo = 0;
  for (const ErrorTriple& e : errors) {
    mr += e.err_r;
    mt += e.err_t;
    mo += e.err_total;
  }
  mr /= n;
  mt /= n;
  mo /= n;
  VarianceTriple v;
  for (const ErrorTriple& e : errors) {
    v.var_r += (e.err_r - mr) * (e.err_r - mr);
    v.var_t += (e.err_t - mt) * (e.err_t - mt);
    v.var_total += (e.err_total - mo) * (e.err_total - mo);
  }
  v.var_r /= (n - 1);
  v.var_t /= (n - 1);
  v.var_total /= (n - 1);
  return v;
}

ResidualForm residual_form_from_string(const std::string& name) {
  if (name == "htm") return ResidualForm::HTM;
  if (name == "pos-euler") return ResidualForm::PosEuler;
  if (name == "dual-quat") return ResidualForm::DualQuat;
  if (name == "lie-algebra") return ResidualForm::LieAlgebra;
  if (name == "axis-angle") return ResidualForm::AxisAngle;
  throw_error(ErrorKind::InvalidArgument, "unknown residual form: " + name);
}

std::string to_string(ResidualForm form) {
  switch (form) {
    case ResidualForm::HTM: return "htm";
    case ResidualForm::PosEuler: return "pos-euler";
    case ResidualForm::DualQuat: return "dual-quat";
    case ResidualForm::LieAlgebra: return "lie-algebra";
    case ResidualForm::AxisAngle: return "axis-angle";
  }
  return "?";
}

std::vector<ResidualForm> all_residual_forms() {
  return {ResidualForm::HTM, ResidualForm::PosEuler, ResidualForm::DualQuat,
          ResidualForm::LieAlgebra, ResidualForm::AxisAngle};
}

namespace {

// Representation vector of a pose for the non-HTM residual forms
// (unweighted concatenation of the natural components).
Eigen::VectorXd represent(const Pose& p, ResidualForm form) {
  switch (form) {
    case ResidualForm::PosEuler: {
      Vec3 pos_mm, euler_deg;
      position_euler_from_pose(p, &pos_mm, &euler_deg);
      Eigen::VectorXd v(6);
      v << pos_mm * 1e-3, euler_deg * (M_PI / 180.0);
      return v;
    }
    case ResidualForm::DualQuat: {
      Eigen::Quaterniond q(p.R);
      if (q.w() < 0) q.coeffs() *= -1.0;
      Eigen::Vector4d real(q.w(), q.x(), q.y(), q.z());
      // dual = 0.5 t (x) q
      Eigen::Quaterniond tq(0.0, 0.5 * p.t.x(), 0.5 * p.t.y(), 0.5 * p.t.z());
      Eigen::Quaterniond d = tq * q;
      Eigen::VectorXd v(8);
      v << real, Eigen::Vector4d(d.w(), d.x(), d.y(), d.z());
      return v;
    }
    case ResidualForm::AxisAngle: {
      Vec3 phi = log_so3(p.R);
      Eigen::VectorXd v(6);
      v << phi, p.t;
      return v;
    }
    default:
      throw_error(ErrorKind::InvalidArgument, "represent: form handled elsewhere");
  }
}

}  // namespace

double residual(const PosePairSet& pairs, const Pose& x, const Pose& y, ResidualForm form) {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Pose lhs = pairs.a[i] * x;
    Pose rhs = y * pairs.b[i];
    try {
      switch (form) {
        case ResidualForm::HTM:
          sum += (lhs.homogeneous() - rhs.homogeneous()).norm();
          break;
        case ResidualForm::LieAlgebra:
          sum += log_pose(rhs.inverse() * lhs).norm();
          break;
        case ResidualForm::DualQuat: {
          Eigen::VectorXd u = represent(lhs, form);
          Eigen::VectorXd v = represent(rhs, form);
          if (u.head<4>().dot(v.head<4>()) < 0) v = -v;  // sign alignment
          sum += (u - v).norm();
          break;
        }
        default: {
          sum += (represent(lhs, form) - represent(rhs, form)).norm();
          break;
        }
      }
      ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateRotation) throw;
    }
  }
  if (used == 0) {
    throw_error(ErrorKind::DegenerateRotation, "residual: every pair degenerate");
  }
  return sum / static_cast<double>(used);
}

double ranking_fidelity(const std::vector<std::pair<Pose, Pose>>& estimates,
                        const Pose& truth_x, const Pose& truth_y, const PosePairSet& pairs,
                        ResidualForm form) {
  if (estimates.size() < 2) {
    throw_error(ErrorKind::InsufficientData, "ranking_fidelity: need at least 2 estimates");
  }
  std::vector<double> res, err;
  for (const auto& [ex, ey] : estimates) {
    res.push_back(residual(pairs, ex, ey, form));
    ErrorPair ep = estimation_errors(ex, ey, truth_x, truth_y);
    err.push_back(ep.x.err_total + ep.y.err_total);
  }
  double score = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    for (std::size_t j = i + 1; j < res.size(); ++j) {
      total += 1.0;
      double dr = res[i] - res[j];
      double de = err[i] - err[j];
      if (dr == 0.0 || de == 0.0) {
        score += 0.5;
      } else if ((dr > 0) == (de > 0)) {
        score += 1.0;
      }
    }
  }
  return score / total;
}

std::vector<ClosedFormTrace> closed_form_study(const PosePairSet& pairs, const Pose& init_x,
                                               const Pose& init_y, const SolverConfig& cfg) {
  std::vector<ClosedFormTrace> out;
  for (ClosedForm form : {ClosedForm::CF1, ClosedForm::CF2, ClosedForm::CF3, ClosedForm::CF4}) {
    SolverConfig c = cfg;
    c.closed_form = form;
    out.push_back({form, l_hed_solve(pairs, init_x, init_y, c)});
  }
  return out;
}

}  // namespace axyb
