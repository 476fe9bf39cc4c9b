#ifndef AXYB_DATASET_HPP
#define AXYB_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "axyb/se3.hpp"

namespace axyb {

/// Ordered, index-corresponding pairs (A_i, B_i). Immutable by convention
/// once built: every operation takes it const and returns a new set.
struct PosePairSet {
  std::vector<Pose> a;
  std::vector<Pose> b;
  std::vector<std::string> tags;  // optional, empty or one per pair

  std::size_t size() const { return a.size(); }
  bool empty() const { return a.empty(); }

  void push_back(const Pose& ai, const Pose& bi, const std::string& tag = {});
};

/// Relative pairs a_ij = A_j^-1 A_i, b_ij = B_j^-1 B_i.
struct RelativePair {
  Pose a;
  Pose b;
  std::size_t i = 0;
  std::size_t j = 0;
};

struct RelativePairSet {
  std::vector<RelativePair> pairs;

  std::size_t size() const { return pairs.size(); }
};

enum class PairingStrategy {
  Consecutive,  // (i, i+1), O(n)
  All,          // all ordered (i, j), i != j
};

RelativePairSet make_relative_pairs(const PosePairSet& s,
                                    PairingStrategy strategy = PairingStrategy::Consecutive);

struct RejectionRecord {
  std::size_t index = 0;   // index into the relative set
  double delta_theta = 0;  // |theta_B - theta_A|
  double delta_h = 0;      // |h_B - h_A|
};

struct FilterReport {
  std::vector<RejectionRecord> rejected;
};

inline constexpr double kDefaultEpsTheta = 0.05;   // rad
inline constexpr double kDefaultEpsH = 0.005;      // m

/// Keeps relative pairs whose screw invariants (angle, pitch) agree between
/// the A and B sides; mismatches indicate broken correspondence.
RelativePairSet correspondence_filter(const RelativePairSet& r, double eps_theta,
                                      double eps_h, FilterReport* report = nullptr);

struct SetStatistics {
  Pose mean;
  Mat6 cov = Mat6::Zero();
  std::size_t n = 0;
};

struct MeanOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100;
};

struct MeanResult {
  Pose mean;
  bool converged = true;
  std::size_t iterations = 0;
  double residual = 0;  // |(1/N) sum log(M^-1 A_i)|
};

/// Group mean: the M with sum_i log(M^-1 A_i) = 0, found by Newton-style
/// fixed-point iteration from the arithmetic twist average. The cloud must
/// stay inside one logarithm chart (no relative rotations near pi).
MeanResult se3_mean_full(const std::vector<Pose>& poses, const MeanOptions& opts = {});
Pose se3_mean(const std::vector<Pose>& poses, double tol = 1e-12, std::size_t max_iter = 100);

/// (1/n) sum log(M^-1 A_i) log(M^-1 A_i)^T -- dispersion of the cloud.
Mat6 se3_covariance(const std::vector<Pose>& poses, const Pose& mean);

SetStatistics set_statistics(const std::vector<Pose>& poses, const MeanOptions& opts = {});

/// Relative eigenvalue floor applied to covariances before inversion.
inline constexpr double kCovarianceFloorRel = 1e-12;

/// Inverse symmetric square root with eigenvalue floor at
/// kCovarianceFloorRel * trace / 6. Throws NearSingularCovariance when the
/// covariance is zero; sets *regularized when any eigenvalue was floored.
Mat6 inverse_sqrt_psd(const Mat6& cov, bool* regularized = nullptr);

/// Whitened residuals psi_i = cov^(-1/2) log(mean^-1 A_i).
std::vector<Vec6> whiten(const std::vector<Pose>& poses, const SetStatistics& stats,
                         bool* regularized = nullptr);

}  // namespace axyb

#endif  // AXYB_DATASET_HPP
