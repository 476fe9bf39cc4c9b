#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "axyb/error.hpp"
#include "axyb/rng.hpp"
#include "axyb/solvers.hpp"
#include "axyb/uncertainty.hpp"

namespace axyb {

namespace {

// Per-pair linearization of log(e) with respect to the twist increments of
// X and Y. Both Jacobians factor into a pair-constant frame transport and an
// iterate-dependent 6x6, J = lhs_pair * k_iter:
//   CF1: J_X = Ad(B_n) J_r(zx),          J_Y = -J_r(zy)
//   CF2: J_X = Ad(A_n) J_l(zx),          J_Y = -J_l(zy)
//   CF3: J_X = J_l(zx),                  J_Y = -Ad(A_n^-1) Ad(Y) J_r(zy)
//   CF4: J_X = J_r(zx),                  J_Y = -Ad(B_n^-1) J_r(zy)
// (CF3's J_X uses A^-1 Y B ~= X at small error.)
struct PairData {
  Pose a, b, b_inv, a_inv;
  Mat6 lhs_x = Mat6::Identity();  // pair-constant left factor of J_X
  Mat6 lhs_y = Mat6::Identity();  // pair-constant left factor of J_Y
  Vec6 correction = Vec6::Zero();
};

struct IterJacobians {
  Mat6 kx;  // iterate factor of J_X
  Mat6 ky;  // iterate factor of J_Y
};

IterJacobians iterate_jacobians(ClosedForm form, const Twist& zx, const Twist& zy,
                                const Pose& y) {
  IterJacobians j;
  switch (form) {
    case ClosedForm::CF1:
      j.kx = right_jacobian(zx);
      j.ky = -right_jacobian(zy);
      break;
    case ClosedForm::CF2:
      j.kx = left_jacobian(zx);
      j.ky = -left_jacobian(zy);
      break;
    case ClosedForm::CF3:
      j.kx = left_jacobian(zx);
      j.ky = -(adjoint_group(y) * right_jacobian(zy));
      break;
    case ClosedForm::CF4:
      j.kx = right_jacobian(zx);
      j.ky = -right_jacobian(zy);
      break;
    default:
      throw_error(ErrorKind::InvalidArgument, "iterate_jacobians: unresolved form");
  }
  return j;
}

std::vector<PairData> prepare_pairs(const PosePairSet& pairs, ClosedForm form,
                                    const std::vector<Vec6>* corrections) {
  std::vector<PairData> out(pairs.size());
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    PairData& d = out[n];
    d.a = pairs.a[n];
    d.b = pairs.b[n];
    d.a_inv = d.a.inverse();
    d.b_inv = d.b.inverse();
    switch (form) {
      case ClosedForm::CF1:
        d.lhs_x = adjoint_group(d.b);
        break;
      case ClosedForm::CF2:
        d.lhs_x = adjoint_group(d.a);
        break;
      case ClosedForm::CF3:
        d.lhs_y = adjoint_group(d.a_inv);
        break;
      case ClosedForm::CF4:
        d.lhs_y = adjoint_group(d.b_inv);
        break;
      default:
        break;
    }
    if (corrections) d.correction = (*corrections)[n];
  }
  return out;
}

Pose pair_error(const PairData& d, const Pose& x, const Pose& y, ClosedForm form) {
  switch (form) {
    case ClosedForm::CF1:
      return y.inverse() * d.a * x * d.b_inv;
    case ClosedForm::CF2:
      return d.a * x * d.b_inv * y.inverse();
    case ClosedForm::CF3:
      return x * d.b_inv * y.inverse() * d.a;
    default:
      return d.b_inv * y.inverse() * d.a * x;
  }
}

// Inverse of the regularized diagonal residual covariance (unbiased,
// mean-subtracted): the Mahalanobis weight of the objective. The relative
// ridge keeps the inverse bounded when a component's dispersion collapses.
Vec6 residual_weight(const std::vector<Vec6>& logs, const std::vector<bool>& valid,
                     double epsilon) {
  Vec6 mu = Vec6::Zero();
  double n = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (!valid[i]) continue;
    mu += logs[i];
    n += 1;
  }
  if (n > 0) mu /= n;
  Vec6 var = Vec6::Zero();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (!valid[i]) continue;
    Vec6 d = logs[i] - mu;
    var += d.cwiseProduct(d);
  }
  if (n > 1) var /= (n - 1);
  double ridge = epsilon * var.mean() + 1e-300;
  return (var.array() + ridge).inverse();
}

// Canonical twist of the current pose whenever the coordinates have grown
// past pi (keeps the rotation block inside the Jacobians' domain). If the
// canonical angle lands on the half-turn cut, the pose is nudged off it by
// a few microradians; this only happens mid-escape where precision is
// irrelevant.
void recanonicalize(Twist& z) {
  if (!z.allFinite()) {
    throw_error(ErrorKind::InvalidArgument, "l_hed_solve: iterate diverged");
  }
  if (z.head<3>().norm() <= M_PI - 2.0 * kLogMargin) return;
  Pose p = exp_twist(z);
  for (int axis = 0; axis < 4; ++axis) {
    try {
      z = log_pose(p);
      return;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateRotation || axis == 3) throw;
      Vec3 nudge = Vec3::Zero();
      nudge[axis % 3] = 4.0 * kLogMargin;
      p.R = p.R * exp_so3(nudge);
    }
  }
}

// State shared by the momentum loop and the polishing/escape machinery.
struct Engine {
  const std::vector<PairData>& data;
  ClosedForm form;
  const SolverConfig& cfg;
  std::size_t n_pairs;

  Twist zx, zy;
  Pose x, y;
  Vec6 weight;
  std::vector<Vec6> logs;
  std::vector<bool> valid;

  Engine(const std::vector<PairData>& d, ClosedForm f, const SolverConfig& c,
         const Twist& zx0, const Twist& zy0)
      : data(d),
        form(f),
        cfg(c),
        n_pairs(d.size()),
        zx(zx0),
        zy(zy0),
        x(exp_twist(zx0)),
        y(exp_twist(zy0)),
        weight(Vec6::Ones()),
        logs(d.size()),
        valid(d.size()) {}

  // Residual logs at the current iterate; false when too many pairs are
  // log-degenerate.
  bool refresh_logs() {
    std::size_t n_valid = 0;
    for (std::size_t n = 0; n < n_pairs; ++n) {
      try {
        logs[n] = log_pose(pair_error(data[n], x, y, form));
        valid[n] = true;
        ++n_valid;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateRotation) throw;
        valid[n] = false;
      }
    }
    return n_valid * 2 >= n_pairs;
  }

  void refresh_weight() { weight = residual_weight(logs, valid, cfg.cov_epsilon); }

  double objective() const {
    double f = 0;
    for (std::size_t n = 0; n < n_pairs; ++n) {
      if (!valid[n]) continue;
      Vec6 gamma = logs[n] - data[n].correction;
      f += gamma.dot(weight.cwiseProduct(gamma));
    }
    return f;
  }

  double tau() const {
    double t = 0;
    std::size_t k = 0;
    for (std::size_t n = 0; n < n_pairs; ++n) {
      if (!valid[n]) continue;
      t += logs[n].norm();
      ++k;
    }
    return k ? t / static_cast<double>(k) : std::numeric_limits<double>::infinity();
  }

  void set_state(const Twist& new_zx, const Twist& new_zy) {
    zx = new_zx;
    zy = new_zy;
    recanonicalize(zx);
    recanonicalize(zy);
    x = exp_twist(zx);
    y = exp_twist(zy);
  }

  // Gradient (and optionally the Gauss-Newton matrix) of the quadratic
  // deviation objective at the current iterate under the current weight.
  void normal_equations(Eigen::Matrix<double, 12, 1>* grad,
                        Eigen::Matrix<double, 12, 12>* gauss_newton) const {
    IterJacobians jac = iterate_jacobians(form, zx, zy, y);
    Vec6 sx = Vec6::Zero();
    Vec6 sy = Vec6::Zero();
    Mat6 sxx = Mat6::Zero(), sxy = Mat6::Zero(), syy = Mat6::Zero();
    for (std::size_t n = 0; n < n_pairs; ++n) {
      if (!valid[n]) continue;
      Vec6 u = weight.cwiseProduct(logs[n] - data[n].correction);
      sx += data[n].lhs_x.transpose() * u;
      sy += data[n].lhs_y.transpose() * u;
      if (gauss_newton) {
        Mat6 wlx = weight.asDiagonal() * data[n].lhs_x;
        Mat6 wly = weight.asDiagonal() * data[n].lhs_y;
        sxx += data[n].lhs_x.transpose() * wlx;
        sxy += data[n].lhs_x.transpose() * wly;
        syy += data[n].lhs_y.transpose() * wly;
      }
    }
    // gamma models the post-step residual l + D dz: the gradient at dz = 0
    // is +2 sum D^T W (l - de).
    grad->head<6>() = 2.0 * (jac.kx.transpose() * sx);
    grad->tail<6>() = 2.0 * (jac.ky.transpose() * sy);
    if (gauss_newton) {
      gauss_newton->topLeftCorner<6, 6>() = 2.0 * jac.kx.transpose() * sxx * jac.kx;
      gauss_newton->topRightCorner<6, 6>() = 2.0 * jac.kx.transpose() * sxy * jac.ky;
      gauss_newton->bottomLeftCorner<6, 6>() =
          gauss_newton->topRightCorner<6, 6>().transpose();
      gauss_newton->bottomRightCorner<6, 6>() = 2.0 * jac.ky.transpose() * syy * jac.ky;
    }
  }

  // Damped Newton descent on the deviation objective with the covariance
  // refreshed after each accepted step; quadratic in-basin convergence where
  // the momentum iteration only crawls. Returns true if the state moved.
  bool polish() {
    if (!refresh_logs()) return false;
    refresh_weight();
    double damping = 1e-10;
    bool moved = false;
    for (std::size_t cycle = 0; cycle < 60; ++cycle) {
      Eigen::Matrix<double, 12, 1> grad;
      Eigen::Matrix<double, 12, 12> gn;
      normal_equations(&grad, &gn);
      double obj_before = objective();
      double scale = 1.0 + gn.trace() / 12.0;
      Twist save_zx = zx, save_zy = zy;
      bool accepted = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::Matrix<double, 12, 12> h = gn;
        h.diagonal().array() += damping * scale;
        Eigen::Matrix<double, 12, 1> delta = h.ldlt().solve(-grad);
        if (!delta.allFinite()) break;
        double dn = delta.norm();
        if (dn > 1.0) delta /= dn;  // trust region, twist units
        set_state(save_zx + delta.head<6>(), save_zy + delta.tail<6>());
        if (refresh_logs() && objective() < obj_before + 1e-300) {
          accepted = true;
          if (dn > cfg.tol) moved = true;
          refresh_weight();
          if (dn < cfg.tol) return moved;
          damping = std::max(damping / 4.0, 1e-12);
          break;
        }
        set_state(save_zx, save_zy);
        refresh_logs();
        damping *= 16.0;
        if (damping > 1e12) break;
      }
      if (!accepted) break;
    }
    return moved;
  }
};

}  // namespace

CalibEstimate l_hed_solve(const PosePairSet& pairs, const Pose& init_x, const Pose& init_y,
                          const SolverConfig& cfg, const std::vector<Vec6>* corrections) {
  cfg.validate();
  if (pairs.size() < 3) {
    throw_error(ErrorKind::InsufficientData, "l_hed_solve: need at least 3 pairs");
  }
  if (corrections && corrections->size() != pairs.size()) {
    throw_error(ErrorKind::InvalidArgument, "l_hed_solve: corrections length mismatch");
  }

  const ClosedForm form = resolve_closed_form(cfg.closed_form, init_x, init_y);
  std::vector<PairData> data = prepare_pairs(pairs, form, corrections);

  Engine eng(data, form, cfg, log_pose(init_x), log_pose(init_y));

  Eigen::Matrix<double, 12, 1> v = Eigen::Matrix<double, 12, 1>::Zero();
  // Frobenius scale of the Gauss-Newton matrix; dividing the gradient by it
  // makes the momentum step size invariant to the data and weight scales
  // (the raw problem spans several orders of magnitude once the frame
  // transports of large translations enter the Jacobians).
  double hessian_scale = 1.0;

  Rng rng(cfg.seed);
  CalibEstimate est;

  double best_tau = std::numeric_limits<double>::infinity();
  double best_obj = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  bool polished = false;
  std::size_t failed_escapes = 0;
  std::size_t total_escapes = 0;
  constexpr std::size_t kMaxFailedEscapes = 24;
  constexpr std::size_t kMaxTotalEscapes = 128;
  double last_step_norm = std::numeric_limits<double>::infinity();

  std::size_t it = 0;
  for (it = 1; it <= cfg.max_iter; ++it) {
    if (!eng.refresh_logs()) {
      throw_error(ErrorKind::DegenerateRotation,
                  "l_hed_solve: more than half of the pairs have degenerate errors");
    }
    bool refresh = (it - 1) % cfg.cov_refresh == 0;
    if (refresh) eng.refresh_weight();

    double objective = eng.objective();
    double tau = eng.tau();

    if (it == 1 || (it - 1) % cfg.trace_every == 0) {
      est.trace.push_back({it, objective, tau});
    }

    // Improvements below the relative slack are reweighting churn around a
    // fixed point, not progress.
    auto better = [](double value, double best) {
      return value < best - (1e-6 * std::abs(best) + 1e-300);
    };
    bool improved = false;
    if (better(tau, best_tau)) {
      best_tau = tau;
      est.accepted.push_back({it, objective, tau});
      improved = true;
    }
    if (better(objective, best_obj)) {
      best_obj = objective;
      improved = true;
    }
    if (improved) {
      stall = 0;
      polished = false;
      failed_escapes = 0;
    } else {
      ++stall;
    }

    Eigen::Matrix<double, 12, 1> g;
    Eigen::Matrix<double, 12, 12> gn;
    eng.normal_equations(&g, refresh ? &gn : nullptr);
    if (refresh) hessian_scale = std::max(gn.norm(), 1e-300);

    if (stall >= cfg.escape_stall_window || last_step_norm < cfg.tol) {
      // The momentum iteration has flattened out. Finish the basin with the
      // exact damped-Newton solve of the same normal equations, then probe
      // for better basins: a stochastic spike on the gradient, integrated by
      // one momentum step, polished, and kept only when the heuristic metric
      // improves over the pre-spike state.
      if (!polished) {
        bool moved = eng.polish();
        polished = true;
        v.setZero();
        last_step_norm = std::numeric_limits<double>::infinity();
        if (moved) {
          stall = 0;
          continue;
        }
      }
      if (failed_escapes >= kMaxFailedEscapes || total_escapes >= kMaxTotalEscapes) {
        est.converged = true;
        break;
      }
      Twist cp_zx = eng.zx, cp_zy = eng.zy;
      double cp_tau = tau;
      // Hop scales cycle from well below the spacing of neighboring
      // reweighting fixed points up to antipodal-basin distances. Directions
      // alternate between uniform random (global search) and the flattest
      // eigenvectors of the Gauss-Newton matrix, along which the nearby
      // stationary points line up.
      static constexpr double kHopScales[] = {1.0 / 64, 1.0 / 16, 0.25, 1.0, 4.0};
      double hop = cfg.escape_scale * kHopScales[failed_escapes % 5];
      double spike = hop / (cfg.alpha * (1.0 - cfg.beta));
      Eigen::Matrix<double, 12, 1> spiked = g / hessian_scale;
      if (failed_escapes % 2 == 0) {
        for (int k = 0; k < 12; ++k) spiked[k] += rng.uniform(-spike, spike);
      } else {
        Eigen::Matrix<double, 12, 12> h;
        Eigen::Matrix<double, 12, 1> unused;
        eng.normal_equations(&unused, &h);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 12, 12>> eig(h);
        int idx = static_cast<int>((failed_escapes / 2) % 6);
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        spiked += sign * spike * eig.eigenvectors().col(idx);
      }
      ++total_escapes;
      est.escapes.push_back(it);
      v = (1.0 - cfg.beta) * spiked;
      eng.set_state(eng.zx - cfg.alpha * v.head<6>(), eng.zy - cfg.alpha * v.tail<6>());
      eng.polish();
      bool keep = eng.refresh_logs() && better(eng.tau(), cp_tau);
      if (!keep) {
        eng.set_state(cp_zx, cp_zy);
        eng.refresh_logs();
        eng.refresh_weight();
        ++failed_escapes;
      } else {
        eng.refresh_weight();
        failed_escapes = 0;
        polished = true;  // the probe's polish already finished this basin
      }
      v.setZero();
      stall = 0;
      last_step_norm = std::numeric_limits<double>::infinity();
      continue;
    }

    v = cfg.beta * v + (1.0 - cfg.beta) * (g / hessian_scale);
    Eigen::Matrix<double, 12, 1> step = -cfg.alpha * v;
    // Momentum with a lagging average can overshoot violently in stiff
    // directions; a step cap bounds the transients without touching the
    // converged regime.
    double sn = step.norm();
    if (sn > 0.5) step *= 0.5 / sn;
    eng.set_state(eng.zx + step.head<6>(), eng.zy + step.tail<6>());
    last_step_norm = step.norm();
  }

  est.iterations = std::min(it, cfg.max_iter);
  est.x = eng.x;
  est.y = eng.y;
  SolverConfig final_cfg = cfg;
  final_cfg.closed_form = form;
  est.objective = recompute_objective(pairs, eng.x, eng.y, final_cfg, corrections);
  double final_tau = heuristic_metric(pairs, eng.x, eng.y, form);
  est.trace.push_back({est.iterations, est.objective, final_tau});
  return est;
}

double quadratic_objective(const PosePairSet& pairs, const Pose& x, const Pose& y,
                           const SolverConfig& cfg, const Vec6& delta_x, const Vec6& delta_y,
                           const std::vector<Vec6>* corrections) {
  const ClosedForm form = resolve_closed_form(cfg.closed_form, x, y);
  std::vector<PairData> data = prepare_pairs(pairs, form, corrections);
  Engine eng(data, form, cfg, log_pose(x), log_pose(y));
  if (!eng.refresh_logs()) {
    throw_error(ErrorKind::DegenerateRotation, "quadratic_objective: degenerate pairs");
  }
  eng.refresh_weight();
  IterJacobians jac = iterate_jacobians(form, eng.zx, eng.zy, eng.y);
  double f = 0;
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    if (!eng.valid[n]) continue;
    Vec6 gamma = eng.logs[n] - data[n].correction +
                 data[n].lhs_x * (jac.kx * delta_x) + data[n].lhs_y * (jac.ky * delta_y);
    f += gamma.dot(eng.weight.cwiseProduct(gamma));
  }
  return f;
}

Eigen::Matrix<double, 12, 1> objective_gradient(const PosePairSet& pairs, const Pose& x,
                                                const Pose& y, const SolverConfig& cfg,
                                                const std::vector<Vec6>* corrections) {
  const ClosedForm form = resolve_closed_form(cfg.closed_form, x, y);
  std::vector<PairData> data = prepare_pairs(pairs, form, corrections);
  Engine eng(data, form, cfg, log_pose(x), log_pose(y));
  if (!eng.refresh_logs()) {
    throw_error(ErrorKind::DegenerateRotation, "objective_gradient: degenerate pairs");
  }
  eng.refresh_weight();
  Eigen::Matrix<double, 12, 1> g;
  eng.normal_equations(&g, nullptr);
  return g;
}

double recompute_objective(const PosePairSet& pairs, const Pose& x, const Pose& y,
                           const SolverConfig& cfg, const std::vector<Vec6>* corrections) {
  const ClosedForm form = resolve_closed_form(cfg.closed_form, x, y);
  std::vector<PairData> data = prepare_pairs(pairs, form, corrections);
  std::vector<Vec6> logs(pairs.size());
  std::vector<bool> valid(pairs.size());
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    try {
      logs[n] = log_pose(pair_error(data[n], x, y, form));
      valid[n] = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateRotation) throw;
      valid[n] = false;
    }
  }
  Vec6 weight = residual_weight(logs, valid, cfg.cov_epsilon);
  double objective = 0.0;
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    if (!valid[n]) continue;
    Vec6 gamma = logs[n] - data[n].correction;
    objective += gamma.dot(weight.cwiseProduct(gamma));
  }
  return objective;
}

CalibEstimate ual_hed_solve(const PosePairSet& pairs, const Pose& init_x, const Pose& init_y,
                            const SolverConfig& cfg) {
  if (pairs.size() < 6) {
    throw_error(ErrorKind::InsufficientData, "ual_hed_solve: need at least 6 pairs");
  }
  UncertaintyReport rep = srm_metric(pairs);
  CalibEstimate est = l_hed_solve(pairs, init_x, init_y, cfg, &rep.delta_e);
  est.scalar_metric = rep.scalar_metric;
  return est;
}

}  // namespace axyb
