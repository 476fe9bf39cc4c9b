#include "axyb/dataset.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "axyb/error.hpp"
#include "axyb/screw.hpp"

namespace axyb {

void PosePairSet::push_back(const Pose& ai, const Pose& bi, const std::string& tag) {
  a.push_back(ai);
  b.push_back(bi);
  if (!tag.empty() || !tags.empty()) {
    tags.resize(a.size());
    tags.back() = tag;
  }
}

RelativePairSet make_relative_pairs(const PosePairSet& s, PairingStrategy strategy) {
  if (s.size() < 2) {
    throw_error(ErrorKind::InsufficientData,
                "make_relative_pairs: need at least 2 pairs");
  }
  RelativePairSet out;
  auto emit = [&](std::size_t i, std::size_t j) {
    RelativePair rp;
    rp.a = s.a[j].inverse() * s.a[i];
    rp.b = s.b[j].inverse() * s.b[i];
    rp.i = i;
    rp.j = j;
    out.pairs.push_back(rp);
  };
  if (strategy == PairingStrategy::Consecutive) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) emit(i, i + 1);
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i != j) emit(i, j);
      }
    }
  }
  return out;
}

RelativePairSet correspondence_filter(const RelativePairSet& r, double eps_theta,
                                      double eps_h, FilterReport* report) {
  if (eps_theta <= 0 || eps_h <= 0) {
    throw_error(ErrorKind::InvalidArgument, "correspondence_filter: thresholds must be > 0");
  }
  RelativePairSet kept;
  FilterReport local;
  for (std::size_t idx = 0; idx < r.pairs.size(); ++idx) {
    ScrewParams sa = screw_decompose(r.pairs[idx].a);
    ScrewParams sb = screw_decompose(r.pairs[idx].b);
    double dtheta = std::abs(sb.theta - sa.theta);
    double dh = std::abs(sb.h - sa.h);
    if (dtheta < eps_theta && dh < eps_h) {
      kept.pairs.push_back(r.pairs[idx]);
    } else {
      local.rejected.push_back({idx, dtheta, dh});
    }
  }
  if (report) *report = local;
  if (kept.pairs.empty()) {
    throw_error(ErrorKind::EmptyAfterFilter,
                "correspondence_filter: every pair rejected");
  }
  return kept;
}

MeanResult se3_mean_full(const std::vector<Pose>& poses, const MeanOptions& opts) {
  if (poses.empty()) {
    throw_error(ErrorKind::InsufficientData, "se3_mean: empty set");
  }
  const double n = static_cast<double>(poses.size());

  // Arithmetic twist average seeds the iteration; valid for clouds with
  // rotational diameter below pi.
  Twist avg = Twist::Zero();
  for (const Pose& p : poses) avg += log_pose(p);
  Pose mean = exp_twist(avg / n);

  MeanResult res;
  std::vector<Twist> logs(poses.size());
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    Pose mean_inv = mean.inverse();
    Twist bar = Twist::Zero();
    Mat6 jsum = Mat6::Zero();
    for (std::size_t i = 0; i < poses.size(); ++i) {
      logs[i] = log_pose(mean_inv * poses[i]);
      bar += logs[i];
      jsum += left_jacobian_inverse(logs[i]);
    }
    bar /= n;
    jsum /= n;
    // Newton step on (1/N) sum log(exp(-d) M^-1 A_i) = 0:
    // the first-order expansion gives bar - mean(J_l^-1) d = 0.
    Vec6 delta = jsum.partialPivLu().solve(bar);
    mean = mean * exp_twist(delta);
    res.iterations = it + 1;
    if (delta.norm() < opts.tol) break;
  }

  // Final residual at the returned mean.
  Pose mean_inv = mean.inverse();
  Twist bar = Twist::Zero();
  for (const Pose& p : poses) bar += log_pose(mean_inv * p);
  res.residual = (bar / n).norm();
  res.mean = mean;
  res.converged = res.iterations < opts.max_iter || res.residual < opts.tol;
  return res;
}

Pose se3_mean(const std::vector<Pose>& poses, double tol, std::size_t max_iter) {
  MeanOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return se3_mean_full(poses, opts).mean;
}

Mat6 se3_covariance(const std::vector<Pose>& poses, const Pose& mean) {
  if (poses.empty()) {
    throw_error(ErrorKind::InsufficientData, "se3_covariance: empty set");
  }
  Mat6 cov = Mat6::Zero();
  Pose mean_inv = mean.inverse();
  for (const Pose& p : poses) {
    Twist l = log_pose(mean_inv * p);
    cov += l * l.transpose();
  }
  cov /= static_cast<double>(poses.size());
  return 0.5 * (cov + cov.transpose());
}

SetStatistics set_statistics(const std::vector<Pose>& poses, const MeanOptions& opts) {
  SetStatistics stats;
  stats.mean = se3_mean_full(poses, opts).mean;
  stats.cov = se3_covariance(poses, stats.mean);
  stats.n = poses.size();
  return stats;
}

Mat6 inverse_sqrt_psd(const Mat6& cov, bool* regularized) {
  Eigen::SelfAdjointEigenSolver<Mat6> eig(cov);
  double floor = kCovarianceFloorRel * cov.trace() / 6.0;
  if (!(floor > 0)) {
    throw_error(ErrorKind::NearSingularCovariance,
                "inverse_sqrt_psd: zero covariance");
  }
  bool reg = false;
  Vec6 d = eig.eigenvalues();
  for (int i = 0; i < 6; ++i) {
    if (d[i] < floor) {
      d[i] = floor;
      reg = true;
    }
  }
  if (regularized) *regularized = reg;
  Vec6 inv_sqrt = d.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<Vec6> whiten(const std::vector<Pose>& poses, const SetStatistics& stats,
                         bool* regularized) {
  Mat6 w = inverse_sqrt_psd(stats.cov, regularized);
  std::vector<Vec6> out;
  out.reserve(poses.size());
  Pose mean_inv = stats.mean.inverse();
  for (const Pose& p : poses) {
    out.push_back(w * log_pose(mean_inv * p));
  }
  return out;
}

}  // namespace axyb
