#ifndef AXYB_EVAL_HPP
#define AXYB_EVAL_HPP

#include <string>
#include <vector>

#include "axyb/dataset.hpp"
#include "axyb/se3.hpp"
#include "axyb/solvers.hpp"

namespace axyb {

/// Ground-truth estimation error: geodesic rotation error (rad), translation
/// distance (m), and the combined percent-scaled total (err_r + err_t) * 100.
struct ErrorTriple {
  double err_r = 0.0;
  double err_t = 0.0;
  double err_total = 0.0;

  static ErrorTriple from_components(double r, double t) {
    return {r, t, (r + t) * 100.0};
  }
};

struct ErrorPair {
  ErrorTriple x;
  ErrorTriple y;
};

ErrorTriple pose_error(const Pose& est, const Pose& truth);
ErrorPair estimation_errors(const Pose& est_x, const Pose& est_y, const Pose& truth_x,
                            const Pose& truth_y);

struct VarianceTriple {
  double var_r = 0.0;
  double var_t = 0.0;
  double var_total = 0.0;
};

/// Unbiased sample variances of the three error components.
VarianceTriple error_variance(const std::vector<ErrorTriple>& errors);

enum class ResidualForm { HTM, PosEuler, DualQuat, LieAlgebra, AxisAngle };

ResidualForm residual_form_from_string(const std::string& name);
std::string to_string(ResidualForm form);
std::vector<ResidualForm> all_residual_forms();

/// Mean per-pair discrepancy between A_i X and Y B_i expressed in the given
/// representation; the only truth-free accuracy proxy available on real data.
double residual(const PosePairSet& pairs, const Pose& x, const Pose& y, ResidualForm form);

/// Kendall-style fraction of concordant (estimate, estimate) pairs between
/// ranking-by-residual and ranking-by-true-total-error; ties count half.
double ranking_fidelity(const std::vector<std::pair<Pose, Pose>>& estimates,
                        const Pose& truth_x, const Pose& truth_y, const PosePairSet& pairs,
                        ResidualForm form);

struct ClosedFormTrace {
  ClosedForm form;
  CalibEstimate estimate;
};

/// Runs the descent solver once per closed form from the same init and seed.
std::vector<ClosedFormTrace> closed_form_study(const PosePairSet& pairs, const Pose& init_x,
                                               const Pose& init_y, const SolverConfig& cfg);

}  // namespace axyb

#endif  // AXYB_EVAL_HPP
