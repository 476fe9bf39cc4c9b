#ifndef AXYB_SOLVERS_HPP
#define AXYB_SOLVERS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "axyb/dataset.hpp"
#include "axyb/se3.hpp"

namespace axyb {

/// The four algebraic arrangements of AX=YB used as the per-pair error
/// product; all equal the identity at the exact solution but respond
/// differently to source noise (SE(3) has no bi-invariant distance).
enum class ClosedForm {
  CF1,   // Y^-1 A X B^-1
  CF2,   // A X B^-1 Y^-1
  CF3,   // X B^-1 Y^-1 A
  CF4,   // B^-1 Y^-1 A X
  Auto,  // CF4 when |t_Y| > |t_X| at init, else CF1
};

Pose closed_form_error(const Pose& a, const Pose& b, const Pose& x, const Pose& y,
                       ClosedForm form);

struct TracePoint {
  std::size_t iteration = 0;
  double objective = 0.0;
  double heuristic_metric = 0.0;
};

struct CalibEstimate {
  Pose x;
  Pose y;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<TracePoint> trace;
  std::vector<std::size_t> escapes;  // iterations where a perturbation fired
  std::vector<TracePoint> accepted;  // running-best heuristic-metric checkpoints
  bool converged = false;
  double scalar_metric = 0.0;  // relative-uncertainty metric when computed
};

struct SolverConfig {
  double alpha = 0.5;             // learning rate (fraction of the stability limit)
  double beta = 0.9;              // momentum factor in [0, 1)
  double tol = 1e-10;             // stop when |step| falls below
  std::size_t max_iter = 200000;
  std::size_t escape_stall_window = 200;
  double escape_scale = 1.0;      // escape displacement scale (twist units)
  ClosedForm closed_form = ClosedForm::Auto;
  std::uint64_t seed = 0;
  std::size_t cov_refresh = 50;   // iterations between covariance recomputes
  double cov_epsilon = 1e-2;      // relative ridge on the residual covariance
  std::size_t trace_every = 100;  // trace sampling period

  // Levenberg-Marquardt schedule (initial refinement).
  double lm_lambda0 = 1e-3;
  double lm_mu = 10.0;
  double lm_lambda_min = 1e-12;
  double lm_lambda_max = 1e6;
  double lm_tol = 1e-14;
  std::size_t lm_max_iter = 200;

  void validate() const;
};

/// Synchronized momentum-descent solver on (X, Y) with stall-triggered
/// seeded escapes. `corrections`, when given, holds per-pair deviation
/// corrections subtracted from each residual.
CalibEstimate l_hed_solve(const PosePairSet& pairs, const Pose& init_x, const Pose& init_y,
                          const SolverConfig& cfg,
                          const std::vector<Vec6>* corrections = nullptr);

/// L-HED preceded by the relative-uncertainty pipeline; its per-pair
/// corrections reshape the deviations during iteration.
CalibEstimate ual_hed_solve(const PosePairSet& pairs, const Pose& init_x, const Pose& init_y,
                            const SolverConfig& cfg);

/// Screw-theoretic initial solver: axis-correlation SVD for the rotation,
/// mean-pose linear solve for the translation, joint L-M refinement, then
/// Y recovered at the set means. Deterministic.
CalibEstimate si_ah_solve(const PosePairSet& pairs, const SolverConfig& cfg = {});

/// Dual-quaternion least-squares baseline.
CalibEstimate dq_solve(const PosePairSet& pairs);

/// Kronecker-product least-squares baseline (rotations re-projected to
/// SO(3) by polar decomposition).
CalibEstimate kron_solve(const PosePairSet& pairs);

/// Objective of the descent solvers recomputed from scratch at (x, y);
/// matches CalibEstimate::objective for the estimate's own pairs/config.
double recompute_objective(const PosePairSet& pairs, const Pose& x, const Pose& y,
                           const SolverConfig& cfg,
                           const std::vector<Vec6>* corrections = nullptr);

/// Mean Lie-algebra residual norm, the stall/acceptance indicator of the
/// escape heuristic.
double heuristic_metric(const PosePairSet& pairs, const Pose& x, const Pose& y,
                        ClosedForm form);

/// Deviation objective evaluated at increment delta of (zeta_X, zeta_Y)
/// around (x, y) with the covariance frozen at the base point, and its
/// analytic gradient at delta = 0. Diagnostic surface for gradient checks.
double quadratic_objective(const PosePairSet& pairs, const Pose& x, const Pose& y,
                           const SolverConfig& cfg, const Vec6& delta_x, const Vec6& delta_y,
                           const std::vector<Vec6>* corrections = nullptr);
Eigen::Matrix<double, 12, 1> objective_gradient(const PosePairSet& pairs, const Pose& x,
                                                const Pose& y, const SolverConfig& cfg,
                                                const std::vector<Vec6>* corrections = nullptr);

ClosedForm resolve_closed_form(ClosedForm form, const Pose& init_x, const Pose& init_y);

}  // namespace axyb

#endif  // AXYB_SOLVERS_HPP
