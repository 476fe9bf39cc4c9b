#ifndef AXYB_SYNTH_HPP
#define AXYB_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "axyb/dataset.hpp"
#include "axyb/se3.hpp"

namespace axyb {

/// File-level pose parameterization: position in mm, intrinsic Z-Y-X
/// (yaw-pitch-roll) Euler angles in degrees, stored as (roll, pitch, yaw).
/// Internally everything is meters and radians.
Pose pose_from_position_euler(const Vec3& position_mm, const Vec3& euler_deg);
void position_euler_from_pose(const Pose& p, Vec3* position_mm, Vec3* euler_deg);

/// Axis-aligned sampling region for robot poses plus the reference origin
/// used by the systematic (EU) error model.
struct Workspace {
  Vec3 center_mm = Vec3(1250.0, 0.0, 900.0);
  Vec3 half_extent_mm = Vec3(750.0, 750.0, 750.0);  // 1.5 m edge box
  Vec3 euler_center_deg = Vec3(0.0, 0.0, 0.0);
  Vec3 euler_half_range_deg = Vec3(30.0, 25.0, 30.0);

  static Workspace large_box();  // 1.5 m edge
  static Workspace small_box();  // 0.4 m edge
};

/// Aleatoric (random, per-draw) and epistemic (systematic, pose-proportional)
/// noise levels. Positions in mm, angles in degrees, gains dimensionless.
struct NoiseConfig {
  Vec3 robot_au_pos = Vec3::Zero();  // sigma, mm
  Vec3 robot_au_rot = Vec3::Zero();  // sigma, deg
  Vec3 cam_au_pos = Vec3::Zero();    // sigma, mm
  Vec3 cam_au_rot = Vec3::Zero();    // sigma, deg
  double robot_eu_gain = 0.0;
  double cam_eu_gain = 0.0;
  std::uint64_t seed = 0;

  /// All parameters multiplied by f (used by noise-ladder studies).
  NoiseConfig scaled(double f) const;

  /// Validates signs; returns true when any parameter exceeds the reference
  /// injection ranges (callers may warn).
  bool validate_and_check_ranges() const;
};

/// Reference maxima of the injection ranges (robot: 1 mm / 0.4 deg / 0.004,
/// camera: 0.5 mm / 0.2 deg / 0.004).
NoiseConfig injection_range_maxima();

struct GroundTruth {
  Pose x_opt;
  Pose y_opt;
  std::vector<Vec3> positions_mm;
  std::vector<Vec3> eulers_deg;
  Workspace workspace;
};

/// Nominal hand-eye parameters used as default ground truth.
Pose default_truth_x();
Pose default_truth_y();

GroundTruth generate_truth(std::size_t n, const Workspace& ws, std::uint64_t seed);

struct InjectStats {
  std::size_t gimbal_resampled = 0;
};

/// Builds (A_i, B_i): A_i is the ideal robot pose; B_i observes the
/// noise-perturbed robot pose through X/Y, then receives camera noise in its
/// own position-Euler coordinates.
PosePairSet inject_uncertainty(const GroundTruth& gt, const NoiseConfig& cfg,
                               InjectStats* stats = nullptr);

/// Source-level variant: the robot-channel noise perturbs {A_i} directly and
/// the camera-channel noise perturbs the consistent {B_i}; used by studies
/// that control the uncertainty of each source separately.
PosePairSet inject_source_uncertainty(const GroundTruth& gt, const NoiseConfig& cfg,
                                      InjectStats* stats = nullptr);

/// Named uncertainty combinations:
/// R-AU, C-AU, R-AU/C-AU, R-EU, R-EU/C-AU, R-AU-EU/C-AU.
NoiseConfig scenario_config(const std::string& name);
std::vector<std::string> scenario_names();

struct ScenarioData {
  PosePairSet pairs;
  GroundTruth truth;
};

ScenarioData scenario(const std::string& name, std::size_t n, std::uint64_t seed,
                      const Workspace& ws = Workspace::large_box());

/// FNV-1a digest over the raw pose doubles; reproducibility check for
/// generated datasets.
std::uint64_t dataset_digest(const PosePairSet& s);

}  // namespace axyb

#endif  // AXYB_SYNTH_HPP
