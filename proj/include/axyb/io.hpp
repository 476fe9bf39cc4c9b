#ifndef AXYB_IO_HPP
#define AXYB_IO_HPP

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "axyb/dataset.hpp"
#include "axyb/solvers.hpp"
#include "axyb/synth.hpp"
#include "axyb/uncertainty.hpp"

namespace axyb {

enum class FileFormat {
  Auto,  // by extension: .json / .csv
  Json,
  Csv,
};

struct LoadOptions {
  FileFormat format = FileFormat::Auto;
  /// Project near-orthonormal rotations instead of rejecting them.
  bool reorthonormalize = false;
  /// Rotation defect above which a record fails validation.
  double rotation_tolerance = 1e-6;
};

/// Pose-pair file I/O. JSON layout:
///   {"pairs": [{"A": {"R": [[..],[..],[..]], "t": [..]}, "B": {...}}]}
/// CSV layout: header row, then 24 numeric columns per row
/// (row-major R_A, t_A, row-major R_B, t_B). Doubles survive a save/load
/// round trip bit-exactly in both formats.
PosePairSet load_pairs(const std::string& path, const LoadOptions& opts = {});
void save_pairs(const PosePairSet& s, const std::string& path,
                FileFormat format = FileFormat::Auto);

/// Ground-truth (X, Y) files used by evaluate/benchmark.
void save_truth(const Pose& x, const Pose& y, const std::string& path);
void load_truth(const std::string& path, Pose* x, Pose* y);

nlohmann::json pose_to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j, const LoadOptions& opts = {});

nlohmann::json estimate_to_json(const CalibEstimate& est, std::size_t trace_every = 100);
nlohmann::json report_to_json(const UncertaintyReport& rep);

/// Config files: JSON natively, or a flat TOML subset (sections, scalars,
/// strings, booleans, arrays of numbers).
nlohmann::json load_config_file(const std::string& path);

SolverConfig solver_config_from_json(const nlohmann::json& j);
NoiseConfig noise_config_from_json(const nlohmann::json& j);
nlohmann::json noise_config_to_json(const NoiseConfig& cfg);

ClosedForm closed_form_from_string(const std::string& s);
std::string to_string(ClosedForm form);

/// FNV-1a digest of a file's bytes; echoed into outputs for provenance.
std::uint64_t file_digest(const std::string& path);
std::string digest_hex(std::uint64_t digest);

}  // namespace axyb

#endif  // AXYB_IO_HPP
