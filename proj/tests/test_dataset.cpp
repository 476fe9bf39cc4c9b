#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "axyb/dataset.hpp"
#include "axyb/error.hpp"
#include "axyb/synth.hpp"
#include "test_helpers.hpp"

using namespace axyb;
using axyb::testing::random_pose;
using axyb::testing::random_twist;

namespace {

PosePairSet noise_free_pairs(std::size_t n, std::uint64_t seed) {
  GroundTruth gt = generate_truth(n, Workspace::large_box(), seed);
  NoiseConfig zero;
  zero.seed = seed + 1;
  return inject_uncertainty(gt, zero);
}

}  // namespace

TEST_CASE("make_relative_pairs basics") {
  PosePairSet s;
  Rng rng(1);
  Pose p = random_pose(rng);
  s.push_back(p, p);
  s.push_back(p, p);
  RelativePairSet rel = make_relative_pairs(s);
  CHECK(rel.size() == 1);
  CHECK(rel.pairs[0].a.isApprox(Pose::identity(), 1e-14));

  PosePairSet five;
  for (int i = 0; i < 5; ++i) five.push_back(random_pose(rng), random_pose(rng));
  CHECK(make_relative_pairs(five, PairingStrategy::Consecutive).size() == 4);
  CHECK(make_relative_pairs(five, PairingStrategy::All).size() == 20);

  PosePairSet one;
  one.push_back(p, p);
  CHECK_THROWS_AS(make_relative_pairs(one), Error);
}

TEST_CASE("relative pairs satisfy the one-frame equation on noise-free data") {
  PosePairSet pairs = noise_free_pairs(20, 7);
  Pose x = default_truth_x();
  RelativePairSet rel = make_relative_pairs(pairs);
  for (const RelativePair& rp : rel.pairs) {
    Pose lhs = rp.a * x;
    Pose rhs = x * rp.b;
    CHECK((lhs.homogeneous() - rhs.homogeneous()).norm() < 1e-10);
  }
}

TEST_CASE("correspondence_filter keeps clean data and rejects corruption") {
  PosePairSet pairs = noise_free_pairs(20, 3);
  RelativePairSet rel = make_relative_pairs(pairs);
  FilterReport report;
  RelativePairSet kept = correspondence_filter(rel, 1e-6, 1e-6, &report);
  CHECK(kept.size() == rel.size());
  CHECK(report.rejected.empty());

  // simulate a mis-correspondence by replacing one B with identity
  PosePairSet corrupt = pairs;
  corrupt.b[10] = Pose::identity();
  RelativePairSet rel2 = make_relative_pairs(corrupt);
  FilterReport report2;
  RelativePairSet kept2 =
      correspondence_filter(rel2, kDefaultEpsTheta, kDefaultEpsH, &report2);
  CHECK(report2.rejected.size() == 2);  // pairs (9,10) and (10,11)
  CHECK(kept2.size() == rel2.size() - 2);

  // idempotence
  FilterReport report3;
  RelativePairSet kept3 =
      correspondence_filter(kept2, kDefaultEpsTheta, kDefaultEpsH, &report3);
  CHECK(report3.rejected.empty());
  CHECK(kept3.size() == kept2.size());

  CHECK_THROWS_AS(correspondence_filter(rel, -1.0, 1.0), Error);
}

TEST_CASE("correspondence_filter rejects little on noisy-but-matched data") {
  // regression: the default thresholds must not starve the solvers on
  // high-noise source data
  std::size_t total = 0, rejected = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioData d = scenario("R-AU/C-AU", 100, seed);
    RelativePairSet rel = make_relative_pairs(d.pairs);
    FilterReport report;
    correspondence_filter(rel, kDefaultEpsTheta, kDefaultEpsH, &report);
    total += rel.size();
    rejected += report.rejected.size();
  }
  CHECK(static_cast<double>(rejected) < 0.2 * static_cast<double>(total));
}

TEST_CASE("correspondence_filter can empty a set") {
  PosePairSet pairs;
  Rng rng(9);
  for (int i = 0; i < 4; ++i) pairs.push_back(random_pose(rng), Pose::identity());
  // identity B side cannot match rotating A side at tight thresholds
  RelativePairSet rel = make_relative_pairs(pairs);
  CHECK_THROWS_AS(correspondence_filter(rel, 1e-9, 1e-9), Error);
}

TEST_CASE("se3_mean on trivial sets") {
  Rng rng(11);
  Pose t = random_pose(rng);
  std::vector<Pose> same(5, t);
  MeanResult res = se3_mean_full(same);
  CHECK(res.mean.isApprox(t, 1e-12));
  CHECK(res.iterations <= 2);

  std::vector<Pose> sym = {Pose(rot_z(0.3), Vec3::Zero()), Pose(rot_z(-0.3), Vec3::Zero())};
  Pose m = se3_mean(sym);
  CHECK((m.R - Mat3::Identity()).norm() < 1e-12);
  CHECK(m.t.norm() < 1e-12);

  CHECK_THROWS_AS(se3_mean({}), Error);
}

TEST_CASE("se3_mean reaches the fixed point and matches a gradient-descent oracle") {
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    Pose center = random_pose(rng, 1.0, 1.0);
    std::vector<Pose> cloud;
    for (int i = 0; i < 50; ++i) {
      cloud.push_back(center * exp_twist(random_twist(rng, 0.005, 0.005)));
    }
    MeanResult res = se3_mean_full(cloud);
    CHECK(res.residual < 1e-10);

    // independent oracle: riemannian gradient descent on
    // f(M) = sum |log(M^-1 A_i)|^2
    Pose m = cloud[0];
    for (int itgd = 0; itgd < 4000; ++itgd) {
      Vec6 grad = Vec6::Zero();
      Pose minv = m.inverse();
      for (const Pose& p : cloud) {
        Twist l = log_pose(minv * p);
        grad += -2.0 * (left_jacobian_inverse(l).transpose() * l);
      }
      m = m * exp_twist(-0.01 * grad);
      if (grad.norm() < 1e-13) break;
    }
    CHECK((log_pose(res.mean.inverse() * m)).norm() < 1e-6);
  }
}

TEST_CASE("se3_mean is left-equivariant") {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Pose> cloud;
    Pose center = random_pose(rng, 0.8, 1.0);
    for (int i = 0; i < 10; ++i) {
      cloud.push_back(center * exp_twist(random_twist(rng, 0.1, 0.1)));
    }
    Pose g = random_pose(rng, 1.0, 1.0);
    std::vector<Pose> moved;
    for (const Pose& p : cloud) moved.push_back(g * p);
    Pose m1 = se3_mean(cloud);
    Pose m2 = se3_mean(moved);
    CHECK((log_pose(m2.inverse() * (g * m1))).norm() < 1e-8);
  }
}

TEST_CASE("se3_covariance basics and Monte-Carlo consistency") {
  Rng rng(14);
  Pose t = random_pose(rng);
  CHECK(se3_covariance({t}, t).norm() < 1e-24);
  CHECK(se3_covariance({t, t, t}, t).norm() < 1e-24);
  CHECK_THROWS_AS(se3_covariance({}, t), Error);

  // isotropic twist noise: diagonal approaches sigma^2
  const double sigma = 0.01;
  Pose center = random_pose(rng);
  std::vector<Pose> cloud;
  for (int i = 0; i < 10000; ++i) {
    Twist z;
    for (int k = 0; k < 6; ++k) z[k] = rng.normal(0.0, sigma);
    cloud.push_back(center * exp_twist(z));
  }
  SetStatistics stats = set_statistics(cloud);
  for (int k = 0; k < 6; ++k) {
    CHECK(stats.cov(k, k) == doctest::Approx(sigma * sigma).epsilon(0.10));
  }
  // symmetry and PSD
  CHECK((stats.cov - stats.cov.transpose()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(stats.cov);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("covariance transport across the calibration relation") {
  // B_i = Y^-1 A_i X implies cov_A = Ad(X) cov_B Ad(X)^T
  PosePairSet pairs = noise_free_pairs(400, 21);
  SetStatistics sa = set_statistics(pairs.a);
  SetStatistics sb = set_statistics(pairs.b);
  Mat6 adx = adjoint_group(default_truth_x());
  Mat6 transported = adx * sb.cov * adx.transpose();
  CHECK((sa.cov - transported).norm() / sa.cov.norm() < 1e-6);
}

TEST_CASE("whiten normalizes and flags degeneracy") {
  Rng rng(15);
  Pose center = random_pose(rng);
  std::vector<Pose> cloud;
  for (int i = 0; i < 5000; ++i) {
    cloud.push_back(center * exp_twist(random_twist(rng, 0.05, 0.08)));
  }
  SetStatistics stats = set_statistics(cloud);
  std::vector<Vec6> psi = whiten(cloud, stats);
  Mat6 cov = Mat6::Zero();
  for (const Vec6& v : psi) cov += v * v.transpose();
  cov /= static_cast<double>(psi.size());
  CHECK((cov - Mat6::Identity()).norm() < 0.15 * 6.0);

  // all-identical cloud has zero covariance
  std::vector<Pose> flat(10, center);
  SetStatistics fstats = set_statistics(flat);
  CHECK_THROWS_AS(whiten(flat, fstats), Error);

  // antisymmetric two-element set whitens to opposite unit-scale vectors
  Twist z = random_twist(rng, 0.2, 0.2);
  std::vector<Pose> duo = {exp_twist(z), exp_twist(-z)};
  SetStatistics dstats = set_statistics(duo);
  bool reg = false;
  std::vector<Vec6> dpsi = whiten(duo, dstats, &reg);
  CHECK((dpsi[0] + dpsi[1]).norm() < 1e-6 * dpsi[0].norm());
}

TEST_CASE("whitened norms agree across uncertainty-free sources") {
  PosePairSet pairs = noise_free_pairs(60, 33);
  SetStatistics sa = set_statistics(pairs.a);
  SetStatistics sb = set_statistics(pairs.b);
  std::vector<Vec6> pa = whiten(pairs.a, sa);
  std::vector<Vec6> pb = whiten(pairs.b, sb);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(std::abs(pa[i].norm() - pb[i].norm()) < 1e-6);
  }
}
