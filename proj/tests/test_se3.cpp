#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axyb/error.hpp"
#include "axyb/screw.hpp"
#include "axyb/se3.hpp"
#include "axyb/series.hpp"
#include "axyb/synth.hpp"
#include "test_helpers.hpp"

using namespace axyb;
using axyb::testing::random_pose;
using axyb::testing::random_twist;

TEST_CASE("hat/vee roundtrip is exact") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Twist z = random_twist(rng, 3.0, 5.0);
    CHECK((vee(hat(z)) - z).norm() == 0.0);
  }
}

TEST_CASE("exp_twist identity and pure translation") {
  Pose p = exp_twist(Twist::Zero());
  CHECK(p.R.isApprox(Mat3::Identity(), 1e-15));
  CHECK(p.t.norm() == 0.0);

  Twist z;
  z << 0, 0, 0, 1, 2, 3;
  Pose q = exp_twist(z);
  CHECK(q.R.isApprox(Mat3::Identity(), 1e-15));
  CHECK((q.t - Vec3(1, 2, 3)).norm() == 0.0);
}

TEST_CASE("exp_twist matches the 30-term series oracle") {
  Twist z;
  z << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  Mat4 expected = exp_series(hat(z), 30);
  CHECK((exp_twist(z).homogeneous() - expected).norm() < 1e-12);

  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    Twist zi = random_twist(rng, 0.28, 0.28);  // |z| <= 0.5
    Mat4 oracle = exp_series(hat(zi), 30);
    CHECK((exp_twist(zi).homogeneous() - oracle).norm() < 1e-12);
  }
}

TEST_CASE("exp_twist rejects non-finite input") {
  Twist z = Twist::Zero();
  z[2] = std::nan("");
  CHECK_THROWS_AS(exp_twist(z), Error);
}

TEST_CASE("log_pose basics") {
  CHECK(log_pose(Pose::identity()).norm() == 0.0);

  Pose p(rot_x(M_PI / 2), Vec3::Zero());
  Twist z = log_pose(p);
  CHECK(z[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(std::abs(z[1]) < 1e-12);
  CHECK(std::abs(z[2]) < 1e-12);
  CHECK(z.tail<3>().norm() < 1e-12);
}

TEST_CASE("log_pose roundtrips the nominal hand-eye transform") {
  Pose x = default_truth_x();
  Pose back = exp_twist(log_pose(x));
  CHECK((back.R - x.R).norm() < 1e-9);
  CHECK((back.t - x.t).norm() < 1e-9);
}

TEST_CASE("log_pose rejects half-turn rotations") {
  Pose p(rot_z(M_PI), Vec3::Zero());
  CHECK_THROWS_AS(log_pose(p), Error);
  try {
    log_pose(p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateRotation);
  }
}

TEST_CASE("log_series roundtrips exp_series near the identity") {
  CHECK((exp_series(Mat4::Zero(), 10) - Mat4::Identity()).norm() == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Twist z = random_twist(rng, 0.11, 0.11);  // |z| <= 0.2
    Mat4 g = exp_series(hat(z), 30);
    CHECK((log_series(g, 40) - hat(z)).norm() < 1e-8);
  }
  Mat4 far = 3.0 * Mat4::Identity();
  CHECK_THROWS_AS(log_series(far, 10), Error);
}

TEST_CASE("exp/log roundtrip over the chart") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    Twist z = random_twist(rng, 1.0, 2.0);
    double target = rng.uniform(0.0, M_PI - 0.05);
    if (z.head<3>().norm() > 0) z.head<3>() *= target / z.head<3>().norm();
    Twist back = log_pose(exp_twist(z));
    CHECK((back - z).norm() < 1e-9);
  }
}

TEST_CASE("group closure keeps rotations orthonormal") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Pose p = random_pose(rng) * random_pose(rng);
    CHECK(rotation_defect(p.R) < 1e-8);
  }
}

TEST_CASE("adjoint_group structure and transport identity") {
  CHECK((adjoint_group(Pose::identity()) - Mat6::Identity()).norm() == 0.0);

  Pose shift(Mat3::Identity(), Vec3(1, 0, 0));
  Mat6 ad = adjoint_group(shift);
  CHECK((ad.bottomLeftCorner<3, 3>() - skew(Vec3(1, 0, 0))).norm() == 0.0);

  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    Pose T = random_pose(rng, 1.5, 2.0);
    Twist xi = random_twist(rng, 1.0, 1.0);
    // Direct matrix-product oracle: vee(T hat(xi) T^-1) = Ad(T) xi.
    Mat4 conj = T.homogeneous() * hat(xi) * T.inverse().homogeneous();
    CHECK((vee(conj) - adjoint_group(T) * xi).norm() < 1e-12);
  }
}

TEST_CASE("adjoint homomorphism") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Pose t1 = random_pose(rng, 1.2, 1.5);
    Pose t2 = random_pose(rng, 1.2, 1.5);
    Mat6 lhs = adjoint_group(t1 * t2);
    Mat6 rhs = adjoint_group(t1) * adjoint_group(t2);
    CHECK((lhs - rhs).norm() < 1e-10);
  }
}

TEST_CASE("adjoint_algebra blocks") {
  CHECK(adjoint_algebra(Twist::Zero()).norm() == 0.0);
  Twist ez;
  ez << 0, 0, 1, 0, 0, 0;
  Mat6 ad = adjoint_algebra(ez);
  CHECK((ad.topLeftCorner<3, 3>() - skew(Vec3(0, 0, 1))).norm() == 0.0);
  CHECK((ad.bottomRightCorner<3, 3>() - skew(Vec3(0, 0, 1))).norm() == 0.0);
  CHECK(ad.topRightCorner<3, 3>().norm() == 0.0);
  CHECK(ad.bottomLeftCorner<3, 3>().norm() == 0.0);
}

TEST_CASE("BCH truncation matches composition for small second factor") {
  Rng rng(8);
  auto truncation_error = [](const Twist& zx, const Twist& zy) {
    Twist composed = log_pose(exp_twist(zx) * exp_twist(zy));
    Mat6 adx = adjoint_algebra(zx);
    Mat6 ady = adjoint_algebra(zy);
    Twist bch = zx + zy + 0.5 * adx * zy + (1.0 / 12.0) * adx * adx * zy +
                (1.0 / 12.0) * ady * ady * zx;
    return (composed - bch).norm();
  };
  for (int i = 0; i < 200; ++i) {
    Twist zx = random_twist(rng, 0.4, 0.5);
    Twist zy = random_twist(rng, 1.0, 1.0) * 1e-3;
    double err = truncation_error(zx, zy);
    CHECK(err < 1e-3 * zy.norm());
    // dropping the second-order terms must cost orders of magnitude
    Twist composed = log_pose(exp_twist(zx) * exp_twist(zy));
    Twist bch1 = zx + zy + 0.5 * adjoint_algebra(zx) * zy;
    double err1 = (composed - bch1).norm();
    CHECK(err < 0.1 * err1 + 1e-14);
  }
}

TEST_CASE("right_jacobian basics") {
  CHECK((right_jacobian(Twist::Zero()) - Mat6::Identity()).norm() == 0.0);

  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    Twist z = random_twist(rng, 0.8, 1.0);
    Twist dz = random_twist(rng, 1.0, 1.0);
    dz *= 1e-4 / dz.norm();
    Twist lhs = log_pose(exp_twist(-z) * exp_twist(z + dz));
    CHECK((lhs - right_jacobian(z) * dz).norm() < 1e-6);
  }
}

TEST_CASE("left jacobian is the right jacobian of the negated twist") {
  Rng rng(10);
  Twist z = random_twist(rng, 0.7, 1.3);
  CHECK((left_jacobian(z) - right_jacobian(-z)).norm() == 0.0);
}

TEST_CASE("right_jacobian matches central finite differences") {
  Rng rng(11);
  const double eps = 1e-5;
  for (int i = 0; i < 1000; ++i) {
    Twist z = random_twist(rng, 0.8, 1.2);
    Mat6 jr = right_jacobian(z);
    Twist v = random_twist(rng, 1.0, 1.0);
    v /= v.norm();
    Twist plus = log_pose(exp_twist(-z) * exp_twist(z + eps * v));
    Twist minus = log_pose(exp_twist(-z) * exp_twist(z - eps * v));
    Twist fd = (plus - minus) / (2 * eps);
    CHECK((jr * v - fd).norm() < 1e-5);
  }
}

TEST_CASE("right_jacobian rejects angles at pi") {
  Twist z = Twist::Zero();
  z[2] = M_PI;
  CHECK_THROWS_AS(right_jacobian(z), Error);
}

TEST_CASE("jacobian inverse is consistent") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Twist z = random_twist(rng, 0.9, 1.5);
    CHECK((right_jacobian(z) * right_jacobian_inverse(z) - Mat6::Identity()).norm() < 1e-10);
    CHECK((left_jacobian(z) * left_jacobian_inverse(z) - Mat6::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("rodrigues coefficients agree across the series crossover") {
  // closed form vs Taylor inside the band around kSmallAngle
  for (double theta : {0.9e-4, 0.95e-4, 1.0e-4, 1.05e-4, 1.1e-4}) {
    Vec3 phi(theta, 0, 0);
    Mat3 K = skew(phi);
    Mat3 closed = Mat3::Identity() + ((1 - std::cos(theta)) / (theta * theta)) * K +
                  ((theta - std::sin(theta)) / (theta * theta * theta)) * K * K;
    CHECK((v3(phi) - closed).norm() < 1e-10);
    CHECK((v3(phi) * v3_inverse(phi) - Mat3::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("screw decomposition basics") {
  ScrewParams s = screw_decompose(Pose(rot_z(M_PI / 3), Vec3::Zero()));
  CHECK(s.theta == doctest::Approx(M_PI / 3).epsilon(1e-12));
  CHECK(std::abs(s.h) < 1e-12);
  CHECK((s.k - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK(s.c.norm() < 1e-12);
  CHECK_FALSE(s.degenerate);

  ScrewParams id = screw_decompose(Pose::identity());
  CHECK(id.degenerate);
  CHECK(id.theta == 0.0);
  CHECK((id.k - Vec3(0, 0, 1)).norm() == 0.0);

  ScrewParams tr = screw_decompose(Pose(Mat3::Identity(), Vec3(3, 0, 4)));
  CHECK(tr.theta == 0.0);
  CHECK(tr.h == doctest::Approx(5.0));
  CHECK((tr.k - Vec3(0.6, 0, 0.8)).norm() < 1e-12);
}

TEST_CASE("screw reconstruction closes") {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    Pose p = random_pose(rng, 1.2, 2.0);
    ScrewParams s = screw_decompose(p);
    CHECK(std::abs(s.c.dot(s.k)) < 1e-9);
    if (s.theta > kSmallAngle) CHECK(std::abs(s.k.norm() - 1.0) < 1e-9);
    Pose back = screw_compose(s);
    CHECK((back.R - p.R).norm() < 1e-9);
    CHECK((back.t - p.t).norm() < 1e-9);
  }
}
