#ifndef AXYB_UNCERTAINTY_HPP
#define AXYB_UNCERTAINTY_HPP

#include <cstddef>
#include <vector>

#include "axyb/dataset.hpp"
#include "axyb/se3.hpp"

namespace axyb {

/// Output of the relative-uncertainty pipeline between the A and B sources.
struct UncertaintyReport {
  std::vector<Vec6> chi;            // per-pair relative-uncertainty ratios
  std::vector<Twist> delta_zeta;    // per-pair correction twists
  std::vector<Vec6> delta_e;        // per-pair deviation corrections
  double lambda_factor = 0.0;       // variance-contribution weight in [0, 1]
  std::vector<double> per_pair_metric;  // |chi_i|
  double scalar_metric = 0.0;           // mean of per_pair_metric
  std::vector<std::size_t> skipped;     // degenerate pairs (zero-norm psi_A)
  bool covariance_regularized = false;

  SetStatistics stats_a;
  SetStatistics stats_b;
};

/// Variance-contribution weight: mean over the 6 components of
/// log(1 + diag(S_A)/diag(S_B)) / log(1 + diag(S_psiA)/diag(S_psiB)),
/// clamped to [0, 1].
double influence_factor(const Mat6& sigma_a, const Mat6& sigma_b,
                        const Mat6& sigma_psi_a, const Mat6& sigma_psi_b);

/// Per-pair ratio vectors combining the whitened-norm mismatch (weight 1-l)
/// with the global dispersion mismatch (weight l). The dispersion ratio uses
/// determinants, the one covariance functional invariant under the frame
/// change between the two sources; the direction of that term is
/// diag(S_A) normalized by the Frobenius norm of S_A.
std::vector<Vec6> chi_ratios(const std::vector<Vec6>& psi_a, const std::vector<Vec6>& psi_b,
                             const Mat6& sigma_a, const Mat6& sigma_b, double lambda,
                             std::vector<std::size_t>* skipped = nullptr);

/// delta_zeta_i = omega .* mean_psi_b .* chi_i with omega = sqrt(diag(S_A)).
std::vector<Twist> correction_twists(const std::vector<Vec6>& chi, const Mat6& sigma_a,
                                     const Vec6& mean_psi_b);

/// delta_e_i = J_l(log A_i) delta_zeta_i.
std::vector<Vec6> error_corrections(const PosePairSet& pairs,
                                    const std::vector<Twist>& delta_zeta);

/// Full pipeline: means -> covariances -> whitening -> lambda -> chi ->
/// delta_zeta -> delta_e. Needs at least 6 pairs for a usable covariance.
UncertaintyReport srm_metric(const PosePairSet& pairs);

/// 1-based inclusive rank range over pairs sorted by metric, descending.
struct SelectionStrategy {
  std::size_t rank_lo = 1;
  std::size_t rank_hi = 1;
};

/// Stable selection of the pairs ranked [rank_lo, rank_hi] by descending
/// per-pair metric (ties keep original order).
PosePairSet select_pairs(const PosePairSet& pairs, const std::vector<double>& per_pair_metric,
                         const SelectionStrategy& strategy);

}  // namespace axyb

#endif  // AXYB_UNCERTAINTY_HPP
