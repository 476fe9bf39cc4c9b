#include "axyb/synth.hpp"

#include <cmath>
#include <cstring>

#include "axyb/error.hpp"
#include "axyb/rng.hpp"

namespace axyb {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;
constexpr double kMmToM = 1e-3;
constexpr double kMToMm = 1e3;
constexpr double kGimbalLimitDeg = 89.9;

}  // namespace

Pose pose_from_position_euler(const Vec3& position_mm, const Vec3& euler_deg) {
  double rx = euler_deg.x() * kDegToRad;
  double ry = euler_deg.y() * kDegToRad;
  double rz = euler_deg.z() * kDegToRad;
  Mat3 R = rot_z(rz) * rot_y(ry) * rot_x(rx);
  return Pose(R, position_mm * kMmToM);
}

void position_euler_from_pose(const Pose& p, Vec3* position_mm, Vec3* euler_deg) {
  *position_mm = p.t * kMToMm;
  const Mat3& R = p.R;
  double ry = std::asin(std::min(1.0, std::max(-1.0, -R(2, 0))));
  double rx, rz;
  if (std::abs(R(2, 0)) < 1.0 - 1e-12) {
    rx = std::atan2(R(2, 1), R(2, 2));
    rz = std::atan2(R(1, 0), R(0, 0));
  } else {
    // Gimbal-locked: fold everything into roll.
    rx = std::atan2(-R(0, 1), R(1, 1));
    rz = 0.0;
  }
  *euler_deg = Vec3(rx, ry, rz) * kRadToDeg;
}

Workspace Workspace::large_box() { return Workspace{}; }

Workspace Workspace::small_box() {
  Workspace ws;
  ws.center_mm = Vec3(1250.0, 0.0, 900.0);
  ws.half_extent_mm = Vec3(200.0, 200.0, 200.0);  // 0.4 m edge
  ws.euler_half_range_deg = Vec3(15.0, 12.0, 15.0);
  return ws;
}

NoiseConfig NoiseConfig::scaled(double f) const {
  NoiseConfig out = *this;
  out.robot_au_pos *= f;
  out.robot_au_rot *= f;
  out.cam_au_pos *= f;
  out.cam_au_rot *= f;
  out.robot_eu_gain *= f;
  out.cam_eu_gain *= f;
  return out;
}

NoiseConfig injection_range_maxima() {
  NoiseConfig c;
  c.robot_au_pos = Vec3::Constant(1.0);
  c.robot_au_rot = Vec3::Constant(0.4);
  c.cam_au_pos = Vec3::Constant(0.5);
  c.cam_au_rot = Vec3::Constant(0.2);
  c.robot_eu_gain = 0.004;
  c.cam_eu_gain = 0.004;
  return c;
}

bool NoiseConfig::validate_and_check_ranges() const {
  auto nonneg = [](const Vec3& v) { return v.minCoeff() >= 0.0; };
  if (!nonneg(robot_au_pos) || !nonneg(robot_au_rot) || !nonneg(cam_au_pos) ||
      !nonneg(cam_au_rot) || robot_eu_gain < 0.0 || cam_eu_gain < 0.0) {
    throw_error(ErrorKind::InvalidArgument, "NoiseConfig: negative noise parameter");
  }
  NoiseConfig m = injection_range_maxima();
  return (robot_au_pos - m.robot_au_pos).maxCoeff() > 0.0 ||
         (robot_au_rot - m.robot_au_rot).maxCoeff() > 0.0 ||
         (cam_au_pos - m.cam_au_pos).maxCoeff() > 0.0 ||
         (cam_au_rot - m.cam_au_rot).maxCoeff() > 0.0 ||
         robot_eu_gain > m.robot_eu_gain || cam_eu_gain > m.cam_eu_gain;
}

Pose default_truth_x() {
  Mat3 R;
  // clang-format off
  R << -0.795, -0.599, 0.087,
        0.604, -0.795, 0.052,
        0.038,  0.094, 0.995;
  // clang-format on
  return Pose(project_rotation(R), Vec3(0.09, -0.2, 0.07));
}

Pose default_truth_y() {
  Mat3 R;
  // clang-format off
  R << -0.965, -0.258, -0.035,
        0.259, -0.965, -0.035,
       -0.024, -0.043,  0.999;
  // clang-format on
  return Pose(project_rotation(R), Vec3(3.6, -3.9, 0.3));
}

GroundTruth generate_truth(std::size_t n, const Workspace& ws, std::uint64_t seed) {
  if (n < 1) {
    throw_error(ErrorKind::InvalidArgument, "generate_truth: n must be >= 1");
  }
  if ((ws.half_extent_mm.array() < 0.0).any() ||
      (ws.euler_half_range_deg.array() < 0.0).any() ||
      ws.euler_center_deg.cwiseAbs().y() + ws.euler_half_range_deg.y() > kGimbalLimitDeg) {
    throw_error(ErrorKind::InvalidWorkspace, "generate_truth: degenerate workspace bounds");
  }
  GroundTruth gt;
  gt.x_opt = default_truth_x();
  gt.y_opt = default_truth_y();
  gt.workspace = ws;
  gt.positions_mm.reserve(n);
  gt.eulers_deg.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, i);
    Vec3 p, e;
    for (int k = 0; k < 3; ++k) {
      p[k] = ws.center_mm[k] + rng.uniform(-ws.half_extent_mm[k], ws.half_extent_mm[k]);
    }
    for (int k = 0; k < 3; ++k) {
      e[k] = ws.euler_center_deg[k] +
             rng.uniform(-ws.euler_half_range_deg[k], ws.euler_half_range_deg[k]);
    }
    gt.positions_mm.push_back(p);
    gt.eulers_deg.push_back(e);
  }
  return gt;
}

PosePairSet inject_uncertainty(const GroundTruth& gt, const NoiseConfig& cfg,
                               InjectStats* stats) {
  cfg.validate_and_check_ranges();
  PosePairSet out;
  InjectStats local;

  const Vec3 origin_p = gt.workspace.center_mm;
  const Vec3 origin_e = gt.workspace.euler_center_deg;
  const Pose y_inv = gt.y_opt.inverse();
  // Camera-side EU is referenced to the workspace origin as seen in the
  // camera frame.
  Vec3 cam_origin_p, cam_origin_e;
  position_euler_from_pose(y_inv * pose_from_position_euler(origin_p, origin_e) * gt.x_opt,
                           &cam_origin_p, &cam_origin_e);

  for (std::size_t i = 0; i < gt.positions_mm.size(); ++i) {
    const Vec3& p_opt = gt.positions_mm[i];
    const Vec3& e_opt = gt.eulers_deg[i];

    // The controller-side pose is taken as ideal.
    Pose a = pose_from_position_euler(p_opt, e_opt);

    Rng rng = Rng::stream(cfg.seed, i);
    Pose b;
    for (std::size_t attempt = 0;; ++attempt) {
      // Robot AU (random) + EU (pose-proportional, deterministic).
      Vec3 p_noise = p_opt + cfg.robot_eu_gain * (p_opt - origin_p);
      Vec3 e_noise = e_opt + cfg.robot_eu_gain * (e_opt - origin_e);
      for (int k = 0; k < 3; ++k) {
        p_noise[k] += rng.normal(0.0, cfg.robot_au_pos[k]);
        e_noise[k] += rng.normal(0.0, cfg.robot_au_rot[k]);
      }

      // Transform the perturbed robot pose into the camera frame.
      Pose b_clean = y_inv * pose_from_position_euler(p_noise, e_noise) * gt.x_opt;

      Vec3 pb, eb;
      position_euler_from_pose(b_clean, &pb, &eb);
      if (std::abs(eb.y()) > kGimbalLimitDeg && attempt < 8) {
        ++local.gimbal_resampled;
        continue;  // redraw the AU terms from the stream
      }

      // Camera AU + EU in the camera-frame coordinates.
      pb += cfg.cam_eu_gain * (pb - cam_origin_p);
      eb += cfg.cam_eu_gain * (eb - cam_origin_e);
      for (int k = 0; k < 3; ++k) {
        pb[k] += rng.normal(0.0, cfg.cam_au_pos[k]);
        eb[k] += rng.normal(0.0, cfg.cam_au_rot[k]);
      }
      b = pose_from_position_euler(pb, eb);
      break;
    }
    out.push_back(a, b);
  }
  if (stats) *stats = local;
  return out;
}

PosePairSet inject_source_uncertainty(const GroundTruth& gt, const NoiseConfig& cfg,
                                      InjectStats* stats) {
  cfg.validate_and_check_ranges();
  PosePairSet out;
  InjectStats local;

  const Vec3 origin_p = gt.workspace.center_mm;
  const Vec3 origin_e = gt.workspace.euler_center_deg;
  const Pose y_inv = gt.y_opt.inverse();
  Vec3 cam_origin_p, cam_origin_e;
  position_euler_from_pose(y_inv * pose_from_position_euler(origin_p, origin_e) * gt.x_opt,
                           &cam_origin_p, &cam_origin_e);

  for (std::size_t i = 0; i < gt.positions_mm.size(); ++i) {
    const Vec3& p_opt = gt.positions_mm[i];
    const Vec3& e_opt = gt.eulers_deg[i];
    Rng rng = Rng::stream(cfg.seed, i);

    Vec3 pa = p_opt + cfg.robot_eu_gain * (p_opt - origin_p);
    Vec3 ea = e_opt + cfg.robot_eu_gain * (e_opt - origin_e);
    for (int k = 0; k < 3; ++k) {
      pa[k] += rng.normal(0.0, cfg.robot_au_pos[k]);
      ea[k] += rng.normal(0.0, cfg.robot_au_rot[k]);
    }
    Pose a = pose_from_position_euler(pa, ea);

    Pose b_clean = y_inv * pose_from_position_euler(p_opt, e_opt) * gt.x_opt;
    Vec3 pb, eb;
    position_euler_from_pose(b_clean, &pb, &eb);
    if (std::abs(eb.y()) > kGimbalLimitDeg) ++local.gimbal_resampled;
    pb += cfg.cam_eu_gain * (pb - cam_origin_p);
    eb += cfg.cam_eu_gain * (eb - cam_origin_e);
    for (int k = 0; k < 3; ++k) {
      pb[k] += rng.normal(0.0, cfg.cam_au_pos[k]);
      eb[k] += rng.normal(0.0, cfg.cam_au_rot[k]);
    }
    out.push_back(a, pose_from_position_euler(pb, eb));
  }
  if (stats) *stats = local;
  return out;
}

NoiseConfig scenario_config(const std::string& name) {
  NoiseConfig c;
  if (name == "R-AU") {
    c.robot_au_pos = Vec3::Constant(1.0);
    c.robot_au_rot = Vec3::Constant(0.4);
  } else if (name == "C-AU") {
    c.cam_au_pos = Vec3::Constant(0.5);
    c.cam_au_rot = Vec3::Constant(0.2);
  } else if (name == "R-AU/C-AU") {
    c.robot_au_pos = Vec3::Constant(1.0);
    c.robot_au_rot = Vec3::Constant(0.4);
    c.cam_au_pos = Vec3::Constant(0.5);
    c.cam_au_rot = Vec3::Constant(0.2);
  } else if (name == "R-EU") {
    c.robot_eu_gain = 0.004;
  } else if (name == "R-EU/C-AU") {
    c.robot_eu_gain = 0.004;
    c.cam_au_pos = Vec3::Constant(0.5);
    c.cam_au_rot = Vec3::Constant(0.2);
  } else if (name == "R-AU-EU/C-AU") {
    c.robot_au_pos = Vec3::Constant(1.0);
    c.robot_au_rot = Vec3::Constant(0.4);
    c.robot_eu_gain = 0.004;
    c.cam_au_pos = Vec3::Constant(0.5);
    c.cam_au_rot = Vec3::Constant(0.2);
  } else {
    throw_error(ErrorKind::InvalidArgument, "unknown scenario: " + name);
  }
  return c;
}

std::vector<std::string> scenario_names() {
  return {"R-AU", "C-AU", "R-AU/C-AU", "R-EU", "R-EU/C-AU", "R-AU-EU/C-AU"};
}

ScenarioData scenario(const std::string& name, std::size_t n, std::uint64_t seed,
                      const Workspace& ws) {
  ScenarioData data;
  data.truth = generate_truth(n, ws, seed);
  NoiseConfig cfg = scenario_config(name);
  cfg.seed = seed + 0x5DEECE66DULL;  // distinct stream from pose sampling
  data.pairs = inject_uncertainty(data.truth, cfg);
  return data;
}

std::uint64_t dataset_digest(const PosePairSet& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (const Pose* p : {&s.a[i], &s.b[i]}) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) absorb(p->R(r, c));
      }
      for (int k = 0; k < 3; ++k) absorb(p->t[k]);
    }
  }
  return h;
}

}  // namespace axyb
