#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "axyb/error.hpp"
#include "axyb/screw.hpp"
#include "axyb/solvers.hpp"

namespace axyb {

namespace {

struct ScrewPair {
  Vec3 axis_a;  // theta_A * k_A
  Vec3 axis_b;  // theta_B * k_B
};

// Rotation minimizing sum |R * axis_b - axis_a|^2 (orthogonal Procrustes).
// Throws when the axis bundle spans fewer than two directions.
Mat3 rotation_from_axes(const std::vector<ScrewPair>& screws) {
  Mat3 corr = Mat3::Zero();
  for (const ScrewPair& s : screws) {
    corr += s.axis_a * s.axis_b.transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(corr, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[1] < 1e-9 * sv[0]) {
    throw_error(ErrorKind::RankDeficientMotion,
                "si_ah_solve: relative rotation axes span fewer than two directions");
  }
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() > 0 ? 1.0 : -1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

// Rotation/translation residuals of one relative pair (stacked 6-vector).
Vec6 pair_residual(const ScrewPair& s, const Pose& rel_a, const Pose& rel_b,
                   const Mat3& rx, const Vec3& tx) {
  Vec6 e;
  e.head<3>() = rx * s.axis_b - s.axis_a;
  e.tail<3>() = rel_a.R * tx + rel_a.t - rx * rel_b.t - tx;
  return e;
}

}  // namespace

CalibEstimate si_ah_solve(const PosePairSet& pairs, const SolverConfig& cfg) {
  cfg.validate();
  if (pairs.size() < 3) {
    throw_error(ErrorKind::InsufficientData, "si_ah_solve: need at least 3 pairs");
  }

  RelativePairSet rel = make_relative_pairs(pairs, PairingStrategy::Consecutive);
  rel = correspondence_filter(rel, kDefaultEpsTheta, kDefaultEpsH);

  std::vector<ScrewPair> screws;
  std::vector<Pose> rel_a, rel_b;
  screws.reserve(rel.size());
  for (const RelativePair& rp : rel.pairs) {
    ScrewParams sa = screw_decompose(rp.a);
    ScrewParams sb = screw_decompose(rp.b);
    if (sa.degenerate || sa.theta < kSmallAngle) continue;  // no rotational information
    screws.push_back({sa.theta * sa.k, sb.theta * sb.k});
    rel_a.push_back(rp.a);
    rel_b.push_back(rp.b);
  }
  if (screws.size() < 2) {
    throw_error(ErrorKind::RankDeficientMotion,
                "si_ah_solve: fewer than two rotational relative motions");
  }

  Mat3 rx = rotation_from_axes(screws);

  // Translation seed from the means of the relative sets:
  // (I - R_MA) t_X = t_MA - R_X t_MB, solved in the least-squares sense
  // (the component along the mean rotation axis is fixed by the refinement).
  Pose mean_a = se3_mean(rel_a);
  Pose mean_b = se3_mean(rel_b);
  Mat3 lhs = Mat3::Identity() - mean_a.R;
  Vec3 rhs = mean_a.t - rx * mean_b.t;
  Vec3 tx = lhs.completeOrthogonalDecomposition().solve(rhs);

  // Joint Levenberg-Marquardt refinement over (R_X, t_X) with the stacked
  // rotation/translation residuals.
  const std::size_t m = screws.size();
  auto total_cost = [&](const Mat3& r, const Vec3& t) {
    double f = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      f += 0.5 * pair_residual(screws[n], rel_a[n], rel_b[n], r, t).squaredNorm();
    }
    return f;
  };

  double lambda = cfg.lm_lambda0;
  double cost = total_cost(rx, tx);
  std::size_t it = 0;
  for (it = 0; it < cfg.lm_max_iter; ++it) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Vec6 jte = Vec6::Zero();
    for (std::size_t n = 0; n < m; ++n) {
      Vec6 e = pair_residual(screws[n], rel_a[n], rel_b[n], rx, tx);
      Eigen::Matrix<double, 6, 6> J = Eigen::Matrix<double, 6, 6>::Zero();
      // d(R exp(w^) v)/dw = -R [v]x at w = 0
      J.topLeftCorner<3, 3>() = -rx * skew(screws[n].axis_b);
      J.bottomLeftCorner<3, 3>() = rx * skew(rel_b[n].t);
      J.bottomRightCorner<3, 3>() = rel_a[n].R - Mat3::Identity();
      jtj += J.transpose() * J;
      jte += J.transpose() * e;
    }
    Vec6 dx = (jtj + lambda * Mat6::Identity()).ldlt().solve(-jte);
    Mat3 rx_new = rx * exp_so3(dx.head<3>());
    Vec3 tx_new = tx + dx.tail<3>();
    double cost_new = total_cost(rx_new, tx_new);
    if (cost_new < cost) {
      double drop = cost - cost_new;
      rx = rx_new;
      tx = tx_new;
      cost = cost_new;
      lambda = std::max(lambda / cfg.lm_mu, cfg.lm_lambda_min);
      if (drop < cfg.lm_tol) break;
    } else {
      lambda = std::min(lambda * cfg.lm_mu, cfg.lm_lambda_max);
      if (lambda >= cfg.lm_lambda_max) break;
    }
  }

  // Y from AX=YB at the means of the absolute sets.
  Pose x(rx, tx);
  Pose abs_mean_a = se3_mean(pairs.a);
  Pose abs_mean_b = se3_mean(pairs.b);
  Pose y = abs_mean_a * x * abs_mean_b.inverse();

  CalibEstimate est;
  est.x = x;
  est.y = y;
  est.iterations = it;
  est.objective = cost;
  est.converged = true;
  return est;
}

}  // namespace axyb
