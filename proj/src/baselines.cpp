#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "axyb/error.hpp"
#include "axyb/solvers.hpp"

namespace axyb {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4x4 = Eigen::Matrix4d;

// Quaternions as [w, x, y, z].
Vec4 quat_mul(const Vec4& q, const Vec4& p) {
  Vec4 out;
  Vec3 qv = q.tail<3>(), pv = p.tail<3>();
  out[0] = q[0] * p[0] - qv.dot(pv);
  out.tail<3>() = q[0] * pv + p[0] * qv + qv.cross(pv);
  return out;
}

Vec4 quat_conj(const Vec4& q) { return Vec4(q[0], -q[1], -q[2], -q[3]); }

// Left/right multiplication matrices: quat_mul(q, p) = L(q) p = R(p) q.
Mat4x4 quat_left(const Vec4& q) {
  Mat4x4 m;
  m(0, 0) = q[0];
  m.block<1, 3>(0, 1) = -q.tail<3>().transpose();
  m.block<3, 1>(1, 0) = q.tail<3>();
  m.block<3, 3>(1, 1) = q[0] * Mat3::Identity() + skew(q.tail<3>());
  return m;
}

Mat4x4 quat_right(const Vec4& p) {
  Mat4x4 m;
  m(0, 0) = p[0];
  m.block<1, 3>(0, 1) = -p.tail<3>().transpose();
  m.block<3, 1>(1, 0) = p.tail<3>();
  m.block<3, 3>(1, 1) = p[0] * Mat3::Identity() - skew(p.tail<3>());
  return m;
}

Vec4 quat_from_rotation(const Mat3& R) {
  Eigen::Quaterniond q(R);
  if (q.w() < 0) q.coeffs() *= -1.0;
  return Vec4(q.w(), q.x(), q.y(), q.z());
}

struct DualQuat {
  Vec4 real = Vec4(1, 0, 0, 0);
  Vec4 dual = Vec4::Zero();
};

DualQuat dq_from_pose(const Pose& p) {
  DualQuat d;
  d.real = quat_from_rotation(p.R);
  Vec4 tq(0.0, p.t.x(), p.t.y(), p.t.z());
  d.dual = 0.5 * quat_mul(tq, d.real);
  return d;
}

Pose pose_from_dq(DualQuat d) {
  double n = d.real.norm();
  d.real /= n;
  d.dual /= n;
  d.dual -= d.real.dot(d.dual) * d.real;  // restore real-dual orthogonality
  Eigen::Quaterniond q(d.real[0], d.real[1], d.real[2], d.real[3]);
  Vec4 tq = 2.0 * quat_mul(d.dual, quat_conj(d.real));
  return Pose(q.toRotationMatrix(), tq.tail<3>());
}

double htm_residual(const PosePairSet& pairs, const Pose& x, const Pose& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sum += ((pairs.a[i] * x).homogeneous() - (y * pairs.b[i]).homogeneous()).norm();
  }
  return sum;
}

}  // namespace

CalibEstimate dq_solve(const PosePairSet& pairs) {
  if (pairs.size() < 3) {
    throw_error(ErrorKind::InsufficientData, "dq_solve: need at least 3 pairs");
  }
  const std::size_t n = pairs.size();

  // a^ x^ = y^ b^ split into real and dual rows over [x, x', y, y'].
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(8 * n, 16);
  for (std::size_t i = 0; i < n; ++i) {
    DualQuat a = dq_from_pose(pairs.a[i]);
    DualQuat b = dq_from_pose(pairs.b[i]);
    Mat4x4 La = quat_left(a.real);
    Mat4x4 Lad = quat_left(a.dual);
    Mat4x4 Rb = quat_right(b.real);
    Mat4x4 Rbd = quat_right(b.dual);
    M.block<4, 4>(8 * i, 0) = La;
    M.block<4, 4>(8 * i, 8) = -Rb;
    M.block<4, 4>(8 * i + 4, 0) = Lad;
    M.block<4, 4>(8 * i + 4, 4) = La;
    M.block<4, 4>(8 * i + 4, 8) = -Rbd;
    M.block<4, 4>(8 * i + 4, 12) = -Rb;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // The exact problem has a two-dimensional nullspace (joint real and dual
  // scaling); anything larger means the motions do not pin the solution.
  if (sv[13] < 1e-9 * sv[0]) {
    throw_error(ErrorKind::RankDeficientMotion,
                "dq_solve: motion set leaves the solution underdetermined");
  }
  Eigen::VectorXd v1 = svd.matrixV().col(14);
  Eigen::VectorXd v2 = svd.matrixV().col(15);

  Vec4 p1 = v1.segment<4>(0), q1 = v1.segment<4>(4);
  Vec4 p2 = v2.segment<4>(0), q2 = v2.segment<4>(4);

  // u = l1 v1 + l2 v2 with |x| = 1 and x . x' = 0; the ratio s = l1/l2
  // solves a s^2 + b s + c = 0.
  double a = p1.dot(q1);
  double b = p1.dot(q2) + p2.dot(q1);
  double c = p2.dot(q2);

  std::vector<std::pair<double, double>> candidates;
  double disc = b * b - 4 * a * c;
  if (std::abs(a) > 1e-14 && disc >= 0) {
    double sq = std::sqrt(disc);
    for (double root : {(-b + sq) / (2 * a), (-b - sq) / (2 * a)}) {
      candidates.emplace_back(root, 1.0);
    }
  } else if (std::abs(b) > 1e-14) {
    candidates.emplace_back(-c / b, 1.0);
  }
  candidates.emplace_back(1.0, 0.0);
  candidates.emplace_back(0.0, 1.0);

  CalibEstimate best;
  double best_res = std::numeric_limits<double>::infinity();
  for (auto [l1, l2] : candidates) {
    double norm2 = l1 * l1 * p1.dot(p1) + 2 * l1 * l2 * p1.dot(p2) + l2 * l2 * p2.dot(p2);
    if (norm2 < 1e-12) continue;
    double scale = 1.0 / std::sqrt(norm2);
    Eigen::VectorXd u = scale * (l1 * v1 + l2 * v2);
    DualQuat xq{u.segment<4>(0), u.segment<4>(4)};
    DualQuat yq{u.segment<4>(8), u.segment<4>(12)};
    if (yq.real.norm() < 1e-9) continue;
    Pose x = pose_from_dq(xq);
    Pose y = pose_from_dq(yq);
    double res = htm_residual(pairs, x, y);
    if (res < best_res) {
      best_res = res;
      best.x = x;
      best.y = y;
    }
  }
  if (!std::isfinite(best_res)) {
    throw_error(ErrorKind::RankDeficientMotion, "dq_solve: no admissible solution");
  }
  best.converged = true;
  best.objective = recompute_objective(pairs, best.x, best.y, SolverConfig{});
  return best;
}

CalibEstimate kron_solve(const PosePairSet& pairs) {
  if (pairs.size() < 2) {
    throw_error(ErrorKind::InsufficientData, "kron_solve: need at least 2 pairs");
  }
  const std::size_t n = pairs.size();

  // R_A R_X - R_Y R_B = 0 vectorized over [vec(R_X); vec(R_Y)].
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(9 * n, 18);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3& ra = pairs.a[i].R;
    const Mat3& rb = pairs.b[i].R;
    for (int col = 0; col < 3; ++col) {
      W.block<3, 3>(9 * i + 3 * col, 3 * col) = ra;  // I3 (x) R_A
    }
    for (int col = 0; col < 3; ++col) {
      for (int row = 0; row < 3; ++row) {
        // R_B^T (x) I3
        W.block<3, 3>(9 * i + 3 * col, 9 + 3 * row) -=
            rb(row, col) * Mat3::Identity();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv[16] < 1e-9 * sv[0]) {
    throw_error(ErrorKind::RankDeficientMotion,
                "kron_solve: motion set leaves the rotations underdetermined");
  }
  Eigen::VectorXd v = svd.matrixV().col(17);

  auto unvec = [](const Eigen::VectorXd& seg) {
    Mat3 m;
    for (int col = 0; col < 3; ++col) {
      m.col(col) = seg.segment<3>(3 * col);
    }
    return m;
  };
  auto to_rotation = [&](Mat3 m) {
    // The homogeneous solution carries a shared scale s with det = s^3.
    double det = m.determinant();
    if (std::abs(det) > 1e-300) {
      m *= ((det >= 0) ? 1.0 : -1.0) / std::cbrt(std::abs(det));
    }
    return project_rotation(m);
  };
  Mat3 rx = to_rotation(unvec(v.segment<9>(0)));
  Mat3 ry = to_rotation(unvec(v.segment<9>(9)));

  // R_A t_X - t_Y = R_Y t_B - t_A for all pairs.
  Eigen::MatrixXd L(3 * n, 6);
  Eigen::VectorXd rhs(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    L.block<3, 3>(3 * i, 0) = pairs.a[i].R;
    L.block<3, 3>(3 * i, 3) = -Mat3::Identity();
    rhs.segment<3>(3 * i) = ry * pairs.b[i].t - pairs.a[i].t;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> tsvd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (tsvd.singularValues()[5] < 1e-12 * tsvd.singularValues()[0]) {
    throw_error(ErrorKind::RankDeficientMotion,
                "kron_solve: motion set leaves the translations underdetermined");
  }
  Eigen::VectorXd txy = tsvd.solve(rhs);

  CalibEstimate est;
  est.x = Pose(rx, txy.head<3>());
  est.y = Pose(ry, txy.tail<3>());
  est.converged = true;
  est.objective = recompute_objective(pairs, est.x, est.y, SolverConfig{});
  return est;
}

}  // namespace axyb
