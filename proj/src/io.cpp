#include "axyb/io.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "axyb/error.hpp"

namespace axyb {

using nlohmann::json;

namespace {

FileFormat detect_format(const std::string& path, FileFormat requested) {
  if (requested != FileFormat::Auto) return requested;
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "csv") return FileFormat::Csv;
  return FileFormat::Json;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorKind::FormatError, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw_error(ErrorKind::FormatError, "cannot write " + path);
  }
  out << content;
}

Mat3 validate_rotation(Mat3 R, const LoadOptions& opts, std::size_t record) {
  double defect = rotation_defect(R);
  if (defect > opts.rotation_tolerance) {
    if (!opts.reorthonormalize) {
      throw_error(ErrorKind::ValidationError,
                  "record " + std::to_string(record) + ": rotation defect " +
                      std::to_string(defect) + " exceeds tolerance");
    }
    R = project_rotation(R);
  }
  return R;
}

// Shortest-exact formatting for CSV (json handles its own doubles).
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

json pose_to_json(const Pose& p) {
  json jr = json::array();
  for (int r = 0; r < 3; ++r) {
    jr.push_back({p.R(r, 0), p.R(r, 1), p.R(r, 2)});
  }
  return json{{"R", jr}, {"t", {p.t.x(), p.t.y(), p.t.z()}}};
}

Pose pose_from_json(const json& j, const LoadOptions& opts) {
  Mat3 R;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) R(r, c) = j.at("R").at(r).at(c).get<double>();
  }
  Vec3 t(j.at("t").at(0).get<double>(), j.at("t").at(1).get<double>(),
         j.at("t").at(2).get<double>());
  return Pose(validate_rotation(R, opts, 0), t);
}

PosePairSet load_pairs(const std::string& path, const LoadOptions& opts) {
  FileFormat fmt = detect_format(path, opts.format);
  PosePairSet out;
  if (fmt == FileFormat::Json) {
    json doc;
    try {
      doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw_error(ErrorKind::FormatError, path + ": " + e.what());
    }
    if (!doc.contains("pairs") || !doc["pairs"].is_array()) {
      throw_error(ErrorKind::FormatError, path + ": missing \"pairs\" array");
    }
    for (std::size_t i = 0; i < doc["pairs"].size(); ++i) {
      const json& rec = doc["pairs"][i];
      try {
        Mat3 ra, rb;
        Vec3 ta, tb;
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            ra(r, c) = rec.at("A").at("R").at(r).at(c).get<double>();
            rb(r, c) = rec.at("B").at("R").at(r).at(c).get<double>();
          }
        }
        for (int k = 0; k < 3; ++k) {
          ta[k] = rec.at("A").at("t").at(k).get<double>();
          tb[k] = rec.at("B").at("t").at(k).get<double>();
        }
        out.push_back(Pose(validate_rotation(ra, opts, i), ta),
                      Pose(validate_rotation(rb, opts, i), tb),
                      rec.value("tag", std::string()));
      } catch (const json::exception& e) {
        throw_error(ErrorKind::FormatError,
                    path + ": record " + std::to_string(i) + ": " + e.what());
      }
    }
    return out;
  }

  // CSV
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw_error(ErrorKind::FormatError, path + ": empty file (header row required)");
  }
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    double v[24];
    std::string cell;
    for (int k = 0; k < 24; ++k) {
      if (!std::getline(row, cell, ',')) {
        throw_error(ErrorKind::FormatError, path + ": record " + std::to_string(record) +
                                                ": expected 24 columns, got " +
                                                std::to_string(k));
      }
      char* end = nullptr;
      v[k] = std::strtod(cell.c_str(), &end);
      while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
      if (!end || *end != '\0') {
        throw_error(ErrorKind::FormatError, path + ": record " + std::to_string(record) +
                                                ": bad number in column " +
                                                std::to_string(k + 1));
      }
    }
    Mat3 ra, rb;
    Vec3 ta, tb;
    int k = 0;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ra(r, c) = v[k++];
    }
    for (int i = 0; i < 3; ++i) ta[i] = v[k++];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rb(r, c) = v[k++];
    }
    for (int i = 0; i < 3; ++i) tb[i] = v[k++];
    out.push_back(Pose(validate_rotation(ra, opts, record), ta),
                  Pose(validate_rotation(rb, opts, record), tb));
    ++record;
  }
  return out;
}

void save_pairs(const PosePairSet& s, const std::string& path, FileFormat format) {
  FileFormat fmt = detect_format(path, format);
  if (fmt == FileFormat::Json) {
    json doc;
    doc["pairs"] = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
      json rec{{"A", pose_to_json(s.a[i])}, {"B", pose_to_json(s.b[i])}};
      if (!s.tags.empty() && !s.tags[i].empty()) rec["tag"] = s.tags[i];
      doc["pairs"].push_back(std::move(rec));
    }
    write_file(path, doc.dump(2) + "\n");
    return;
  }
  std::ostringstream out;
  out << "ra11,ra12,ra13,ra21,ra22,ra23,ra31,ra32,ra33,tax,tay,taz,"
         "rb11,rb12,rb13,rb21,rb22,rb23,rb31,rb32,rb33,tbx,tby,tbz\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string sep;
    for (const Pose* p : {&s.a[i], &s.b[i]}) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          out << sep << format_double(p->R(r, c));
          sep = ",";
        }
      }
      for (int k = 0; k < 3; ++k) out << sep << format_double(p->t[k]);
    }
    out << "\n";
  }
  write_file(path, out.str());
}

void save_truth(const Pose& x, const Pose& y, const std::string& path) {
  json doc{{"X", pose_to_json(x)}, {"Y", pose_to_json(y)}};
  write_file(path, doc.dump(2) + "\n");
}

void load_truth(const std::string& path, Pose* x, Pose* y) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::FormatError, path + ": " + e.what());
  }
  if (!doc.contains("X") || !doc.contains("Y")) {
    throw_error(ErrorKind::FormatError, path + ": truth file needs \"X\" and \"Y\"");
  }
  *x = pose_from_json(doc["X"]);
  *y = pose_from_json(doc["Y"]);
}

json estimate_to_json(const CalibEstimate& est, std::size_t trace_every) {
  json j;
  j["X"] = pose_to_json(est.x);
  j["Y"] = pose_to_json(est.y);
  j["iterations"] = est.iterations;
  j["objective"] = est.objective;
  j["converged"] = est.converged;
  j["escapes"] = est.escapes;
  if (est.scalar_metric > 0) j["scalar_metric"] = est.scalar_metric;
  json trace = json::array();
  for (std::size_t i = 0; i < est.trace.size(); ++i) {
    const TracePoint& tp = est.trace[i];
    if (trace_every > 1 && i + 1 < est.trace.size() &&
        tp.iteration % trace_every != 1 && tp.iteration != 1) {
      continue;
    }
    trace.push_back({{"iteration", tp.iteration},
                     {"objective", tp.objective},
                     {"heuristic_metric", tp.heuristic_metric}});
  }
  j["trace"] = std::move(trace);
  return j;
}

json report_to_json(const UncertaintyReport& rep) {
  json j;
  j["lambda"] = rep.lambda_factor;
  j["scalar_metric"] = rep.scalar_metric;
  j["per_pair_metric"] = rep.per_pair_metric;
  auto vecs = [](const std::vector<Vec6>& vs) {
    json arr = json::array();
    for (const Vec6& v : vs) {
      arr.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return arr;
  };
  j["chi"] = vecs(rep.chi);
  j["delta_zeta"] = vecs(rep.delta_zeta);
  j["delta_e"] = vecs(rep.delta_e);
  j["skipped"] = rep.skipped;
  j["covariance_regularized"] = rep.covariance_regularized;
  return j;
}

namespace {

// Flat TOML subset: [section] headers, key = value with numbers, booleans,
// quoted strings, and arrays of numbers. Enough for the config surface.
json parse_mini_toml(const std::string& text, const std::string& path) {
  json root = json::object();
  json* section = &root;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw_error(ErrorKind::FormatError,
                path + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto parse_scalar = [&](const std::string& tok) -> json {
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
      return tok.substr(1, tok.size() - 2);
    }
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (!end || *end != '\0') fail("cannot parse value '" + tok + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail("empty section name");
      section = &root[name];
      if (!section->is_object()) *section = json::object();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected key = value");
    if (value.front() == '[') {
      if (value.back() != ']') fail("unterminated array");
      json arr = json::array();
      std::istringstream items(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) arr.push_back(parse_scalar(item));
      }
      (*section)[key] = std::move(arr);
    } else {
      (*section)[key] = parse_scalar(value);
    }
  }
  return root;
}

Vec3 vec3_from_json(const json& j) {
  if (j.is_number()) return Vec3::Constant(j.get<double>());
  if (!j.is_array() || j.size() != 3) {
    throw_error(ErrorKind::FormatError, "expected a number or array of 3 numbers");
  }
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

json load_config_file(const std::string& path) {
  std::string text = read_file(path);
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "toml") {
    return parse_mini_toml(text, path);
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::FormatError, path + ": " + e.what());
  }
}

ClosedForm closed_form_from_string(const std::string& s) {
  if (s == "cf1") return ClosedForm::CF1;
  if (s == "cf2") return ClosedForm::CF2;
  if (s == "cf3") return ClosedForm::CF3;
  if (s == "cf4") return ClosedForm::CF4;
  if (s == "auto") return ClosedForm::Auto;
  throw_error(ErrorKind::InvalidArgument, "unknown closed form: " + s);
}

std::string to_string(ClosedForm form) {
  switch (form) {
    case ClosedForm::CF1: return "cf1";
    case ClosedForm::CF2: return "cf2";
    case ClosedForm::CF3: return "cf3";
    case ClosedForm::CF4: return "cf4";
    case ClosedForm::Auto: return "auto";
  }
  return "?";
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig cfg;
  const json& s = j.contains("solver") ? j.at("solver") : j;
  cfg.alpha = s.value("alpha", cfg.alpha);
  cfg.beta = s.value("beta", cfg.beta);
  cfg.tol = s.value("tol", cfg.tol);
  cfg.max_iter = static_cast<std::size_t>(s.value("max_iter", double(cfg.max_iter)));
  cfg.escape_stall_window =
      static_cast<std::size_t>(s.value("escape_stall_window", double(cfg.escape_stall_window)));
  cfg.escape_scale = s.value("escape_scale", cfg.escape_scale);
  if (s.contains("closed_form")) {
    cfg.closed_form = closed_form_from_string(s.at("closed_form").get<std::string>());
  }
  cfg.seed = static_cast<std::uint64_t>(s.value("seed", double(cfg.seed)));
  cfg.cov_refresh = static_cast<std::size_t>(s.value("cov_refresh", double(cfg.cov_refresh)));
  cfg.cov_epsilon = s.value("cov_epsilon", cfg.cov_epsilon);
  cfg.trace_every = static_cast<std::size_t>(s.value("trace_every", double(cfg.trace_every)));
  cfg.lm_lambda0 = s.value("lm_lambda0", cfg.lm_lambda0);
  cfg.lm_mu = s.value("lm_mu", cfg.lm_mu);
  cfg.lm_lambda_min = s.value("lm_lambda_min", cfg.lm_lambda_min);
  cfg.lm_lambda_max = s.value("lm_lambda_max", cfg.lm_lambda_max);
  cfg.lm_tol = s.value("lm_tol", cfg.lm_tol);
  cfg.lm_max_iter = static_cast<std::size_t>(s.value("lm_max_iter", double(cfg.lm_max_iter)));
  cfg.validate();
  return cfg;
}

NoiseConfig noise_config_from_json(const json& j) {
  NoiseConfig cfg;
  const json& s = j.contains("noise") ? j.at("noise") : j;
  if (s.contains("robot_au_pos")) cfg.robot_au_pos = vec3_from_json(s.at("robot_au_pos"));
  if (s.contains("robot_au_rot")) cfg.robot_au_rot = vec3_from_json(s.at("robot_au_rot"));
  if (s.contains("cam_au_pos")) cfg.cam_au_pos = vec3_from_json(s.at("cam_au_pos"));
  if (s.contains("cam_au_rot")) cfg.cam_au_rot = vec3_from_json(s.at("cam_au_rot"));
  cfg.robot_eu_gain = s.value("robot_eu_gain", cfg.robot_eu_gain);
  cfg.cam_eu_gain = s.value("cam_eu_gain", cfg.cam_eu_gain);
  cfg.seed = static_cast<std::uint64_t>(s.value("seed", double(cfg.seed)));
  cfg.validate_and_check_ranges();
  return cfg;
}

json noise_config_to_json(const NoiseConfig& cfg) {
  auto vec = [](const Vec3& v) { return json{v.x(), v.y(), v.z()}; };
  return json{{"robot_au_pos", vec(cfg.robot_au_pos)},
              {"robot_au_rot", vec(cfg.robot_au_rot)},
              {"cam_au_pos", vec(cfg.cam_au_pos)},
              {"cam_au_rot", vec(cfg.cam_au_rot)},
              {"robot_eu_gain", cfg.robot_eu_gain},
              {"cam_eu_gain", cfg.cam_eu_gain},
              {"seed", cfg.seed}};
}

std::uint64_t file_digest(const std::string& path) {
  std::string data = read_file(path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, digest);
  return buf;
}

}  // namespace axyb
