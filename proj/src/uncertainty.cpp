#include "axyb/uncertainty.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "axyb/error.hpp"

namespace axyb {

double influence_factor(const Mat6& sigma_a, const Mat6& sigma_b,
                        const Mat6& sigma_psi_a, const Mat6& sigma_psi_b) {
  Vec6 da = sigma_a.diagonal();
  Vec6 db = sigma_b.diagonal();
  Vec6 dpa = sigma_psi_a.diagonal();
  Vec6 dpb = sigma_psi_b.diagonal();
  if (da.minCoeff() <= 0 || db.minCoeff() <= 0 || dpa.minCoeff() <= 0 ||
      dpb.minCoeff() <= 0) {
    throw_error(ErrorKind::InvalidArgument, "influence_factor: zero variance diagonal");
  }
  double sum = 0.0;
  for (int k = 0; k < 6; ++k) {
    sum += std::log1p(da[k] / db[k]) / std::log1p(dpa[k] / dpb[k]);
  }
  return std::min(1.0, std::max(0.0, sum / 6.0));
}

std::vector<Vec6> chi_ratios(const std::vector<Vec6>& psi_a, const std::vector<Vec6>& psi_b,
                             const Mat6& sigma_a, const Mat6& sigma_b, double lambda,
                             std::vector<std::size_t>* skipped) {
  if (psi_a.size() != psi_b.size()) {
    throw_error(ErrorKind::InvalidArgument, "chi_ratios: length mismatch");
  }
  // Dispersion mismatch between the sources. det is preserved by the
  // (unimodular) adjoint frame change relating the two clouds, so this term
  // vanishes exactly on uncertainty-free data; the sixth root puts it on the
  // scale of a per-component variance ratio.
  double det_a = sigma_a.determinant();
  double det_b = sigma_b.determinant();
  double spread = (det_a > 0 && det_b > 0) ? std::pow(det_b / det_a, 1.0 / 6.0) - 1.0 : 0.0;
  Vec6 spread_dir = sigma_a.diagonal() / sigma_a.norm();

  std::vector<Vec6> chi;
  chi.reserve(psi_a.size());
  for (std::size_t i = 0; i < psi_a.size(); ++i) {
    double na = psi_a[i].norm();
    if (na <= 0.0) {
      if (skipped) skipped->push_back(i);
      chi.push_back(Vec6::Zero());
      continue;
    }
    double ratio = psi_b[i].norm() / na;
    chi.push_back((1.0 - lambda) * (ratio - 1.0) * (psi_a[i] / na) +
                  lambda * spread * spread_dir);
  }
  return chi;
}

std::vector<Twist> correction_twists(const std::vector<Vec6>& chi, const Mat6& sigma_a,
                                     const Vec6& mean_psi_b) {
  if (chi.empty()) {
    throw_error(ErrorKind::InvalidArgument, "correction_twists: empty chi");
  }
  Vec6 omega = sigma_a.diagonal().cwiseMax(0.0).cwiseSqrt();
  std::vector<Twist> out;
  out.reserve(chi.size());
  for (const Vec6& c : chi) {
    out.push_back(omega.cwiseProduct(mean_psi_b).cwiseProduct(c));
  }
  return out;
}

std::vector<Vec6> error_corrections(const PosePairSet& pairs,
                                    const std::vector<Twist>& delta_zeta) {
  if (pairs.size() != delta_zeta.size()) {
    throw_error(ErrorKind::InvalidArgument, "error_corrections: length mismatch");
  }
  std::vector<Vec6> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      out.push_back(left_jacobian(log_pose(pairs.a[i])) * delta_zeta[i]);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateRotation) {
        throw_error(ErrorKind::DegenerateRotation,
                    "error_corrections: pair " + std::to_string(i) + ": " + e.what());
      }
      throw;
    }
  }
  return out;
}

UncertaintyReport srm_metric(const PosePairSet& pairs) {
  if (pairs.size() < 6) {
    throw_error(ErrorKind::InsufficientData,
                "srm_metric: need at least 6 pairs for the covariance");
  }
  UncertaintyReport rep;
  rep.stats_a = set_statistics(pairs.a);
  rep.stats_b = set_statistics(pairs.b);

  bool reg_a = false, reg_b = false;
  std::vector<Vec6> psi_a = whiten(pairs.a, rep.stats_a, &reg_a);
  std::vector<Vec6> psi_b = whiten(pairs.b, rep.stats_b, &reg_b);
  rep.covariance_regularized = reg_a || reg_b;

  const double n = static_cast<double>(pairs.size());
  Mat6 sigma_psi_a = Mat6::Zero();
  Mat6 sigma_psi_b = Mat6::Zero();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sigma_psi_a += psi_a[i] * psi_a[i].transpose();
    sigma_psi_b += psi_b[i] * psi_b[i].transpose();
  }
  sigma_psi_a /= n;
  sigma_psi_b /= n;

  rep.lambda_factor =
      influence_factor(rep.stats_a.cov, rep.stats_b.cov, sigma_psi_a, sigma_psi_b);
  rep.chi = chi_ratios(psi_a, psi_b, rep.stats_a.cov, rep.stats_b.cov,
                       rep.lambda_factor, &rep.skipped);

  // The whitened clouds have unit per-component RMS by construction, so the
  // reference mean entering the correction is the ones vector.
  rep.delta_zeta = correction_twists(rep.chi, rep.stats_a.cov, Vec6::Ones());
  rep.delta_e = error_corrections(pairs, rep.delta_zeta);

  rep.per_pair_metric.reserve(rep.chi.size());
  double sum = 0.0;
  for (const Vec6& c : rep.chi) {
    rep.per_pair_metric.push_back(c.norm());
    sum += rep.per_pair_metric.back();
  }
  rep.scalar_metric = sum / n;
  return rep;
}

PosePairSet select_pairs(const PosePairSet& pairs, const std::vector<double>& per_pair_metric,
                         const SelectionStrategy& strategy) {
  if (per_pair_metric.size() != pairs.size()) {
    throw_error(ErrorKind::InvalidArgument, "select_pairs: metric length mismatch");
  }
  if (strategy.rank_lo < 1 || strategy.rank_lo > strategy.rank_hi ||
      strategy.rank_hi > pairs.size()) {
    throw_error(ErrorKind::InvalidRange, "select_pairs: rank range exceeds set size");
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return per_pair_metric[l] > per_pair_metric[r];
  });
  PosePairSet out;
  for (std::size_t rank = strategy.rank_lo; rank <= strategy.rank_hi; ++rank) {
    std::size_t idx = order[rank - 1];
    out.push_back(pairs.a[idx], pairs.b[idx],
                  pairs.tags.empty() ? std::string() : pairs.tags[idx]);
  }
  return out;
}

}  // namespace axyb
