// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_PC_IO_HPP
#define SPOOFSIM_PC_IO_HPP

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spoofsim/errors.hpp"
#include "spoofsim/geometry.hpp"
#include "spoofsim/oriented_box.hpp"

namespace spoofsim {

// ---------------------------------------------------------------------------
// .bin: packed little-endian float32 quadruples (x, y, z, intensity)
// ---------------------------------------------------------------------------

namespace detail {

inline float read_le_f32(const unsigned char* b) {
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                          (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(u);
}

inline void write_le_f32(unsigned char* b, float f) {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  b[0] = static_cast<unsigned char>(u & 0xff);
  b[1] = static_cast<unsigned char>((u >> 8) & 0xff);
  b[2] = static_cast<unsigned char>((u >> 16) & 0xff);
  b[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

// Stored intensities in [0,1] are rescaled to the internal [0,255] scale.
// Returns true when rescaling was applied.
inline bool normalize_intensity(std::vector<Point>& pts) {
  if (pts.empty()) return false;
  double max_i = 0.0;
  for (const Point& p : pts) max_i = std::max(max_i, p.intensity);
  if (max_i > 1.0) return false;
  for (Point& p : pts) p.intensity *= 255.0;
  return true;
}

}  // namespace detail

inline PointCloud read_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("read_bin: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() % 16 != 0) {
    throw FormatError("read_bin: truncated file, length " + std::to_string(bytes.size()) +
                      " is not a multiple of 16");
  }

  PointCloud cloud;
  cloud.points.reserve(bytes.size() / 16);
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    Point p;
    p.x = detail::read_le_f32(&bytes[off]);
    p.y = detail::read_le_f32(&bytes[off + 4]);
    p.z = detail::read_le_f32(&bytes[off + 8]);
    p.intensity = detail::read_le_f32(&bytes[off + 12]);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw FormatError("read_bin: non-finite coordinate at point " +
                        std::to_string(off / 16));
    }
    if (!std::isfinite(p.intensity) || p.intensity < 0.0 || p.intensity > 255.0) {
      throw FormatError("read_bin: intensity out of [0, 255] at point " +
                        std::to_string(off / 16));
    }
    cloud.points.push_back(p);
  }
  cloud.intensity_rescaled = detail::normalize_intensity(cloud.points);
  return cloud;
}

inline void write_bin(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_bin: cannot open " + path);
  unsigned char buf[16];
  for (const Point& p : cloud.points) {
    detail::write_le_f32(buf, static_cast<float>(p.x));
    detail::write_le_f32(buf + 4, static_cast<float>(p.y));
    detail::write_le_f32(buf + 8, static_cast<float>(p.z));
    detail::write_le_f32(buf + 12, static_cast<float>(p.intensity));
    out.write(reinterpret_cast<const char*>(buf), 16);
  }
  if (!out) throw Error("write_bin: short write to " + path);
}

// ---------------------------------------------------------------------------
// .pcd ASCII subset: FIELDS x y z intensity, DATA ascii
// ---------------------------------------------------------------------------

inline PointCloud read_pcd_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("read_pcd_ascii: cannot open " + path);

  std::string line;
  long declared_points = -1;
  bool fields_ok = false;
  bool data_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "FIELDS") {
      std::vector<std::string> fields;
      std::string f;
      while (ss >> f) fields.push_back(f);
      fields_ok = (fields == std::vector<std::string>{"x", "y", "z", "intensity"});
      if (!fields_ok) throw FormatError("read_pcd_ascii: unsupported FIELDS in " + path);
    } else if (tag == "POINTS") {
      if (!(ss >> declared_points) || declared_points < 0) {
        throw FormatError("read_pcd_ascii: bad POINTS line");
      }
    } else if (tag == "DATA") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") throw FormatError("read_pcd_ascii: only DATA ascii is supported");
      data_seen = true;
      break;
    }
    // VERSION / SIZE / TYPE / COUNT / WIDTH / HEIGHT / VIEWPOINT pass through
  }
  if (!fields_ok || !data_seen) {
    throw FormatError("read_pcd_ascii: missing FIELDS x y z intensity or DATA ascii header");
  }

  PointCloud cloud;
  if (declared_points > 0) cloud.points.reserve(static_cast<std::size_t>(declared_points));
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    Point p;
    if (!(ss >> p.x >> p.y >> p.z >> p.intensity)) {
      throw FormatError("read_pcd_ascii: malformed data row '" + line + "'");
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity) || p.intensity < 0.0 || p.intensity > 255.0) {
      throw FormatError("read_pcd_ascii: value out of range in row '" + line + "'");
    }
    cloud.points.push_back(p);
  }
  if (declared_points >= 0 &&
      cloud.points.size() != static_cast<std::size_t>(declared_points)) {
    throw FormatError("read_pcd_ascii: POINTS declares " + std::to_string(declared_points) +
                      " rows but file has " + std::to_string(cloud.points.size()));
  }
  cloud.intensity_rescaled = detail::normalize_intensity(cloud.points);
  return cloud;
}

inline void write_pcd_ascii(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_pcd_ascii: cannot open " + path);
  out << "# .PCD v0.7 - Point Cloud Data file format\n"
      << "VERSION 0.7\n"
      << "FIELDS x y z intensity\n"
      << "SIZE 4 4 4 4\n"
      << "TYPE F F F F\n"
      << "COUNT 1 1 1 1\n"
      << "WIDTH " << cloud.size() << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << cloud.size() << "\n"
      << "DATA ascii\n";
  char row[160];
  for (const Point& p : cloud.points) {
    std::snprintf(row, sizeof(row), "%.9g %.9g %.9g %.9g\n", p.x, p.y, p.z, p.intensity);
    out << row;
  }
  if (!out) throw Error("write_pcd_ascii: short write to " + path);
}

// ---------------------------------------------------------------------------
// Detections: JSON list of {center, dims, yaw, score, label}
// ---------------------------------------------------------------------------

/// One detector output: an oriented box with a confidence score.
struct DetectionRecord {
  OrientedBox box;
  double score = 0.0;  // in [0, 1]
  std::string label;

  void validate() const {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ValidationError("DetectionRecord: score out of [0, 1]");
    }
    box.validate();
  }
};

inline nlohmann::json to_json(const DetectionRecord& r) {
  return {{"center", {r.box.center.x, r.box.center.y, r.box.center.z}},
          {"dims", {r.box.length, r.box.width, r.box.height}},
          {"yaw", r.box.yaw},
          {"score", r.score},
          {"label", r.label}};
}

inline std::vector<DetectionRecord> read_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("read_detections: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("read_detections: ") + e.what());
  }
  if (!j.is_array()) throw FormatError("read_detections: top-level document must be a list");

  std::vector<DetectionRecord> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    DetectionRecord r;
    try {
      const auto& c = item.at("center");
      const auto& d = item.at("dims");
      if (c.size() != 3 || d.size() != 3) {
        throw FormatError("read_detections: center/dims must have 3 elements");
      }
      r.box.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
      r.box.length = d[0].get<double>();
      r.box.width = d[1].get<double>();
      r.box.height = d[2].get<double>();
      r.box.yaw = item.at("yaw").get<double>();
      r.score = item.at("score").get<double>();
      r.label = item.at("label").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("read_detections: ") + e.what());
    }
    r.validate();  // throws ValidationError on out-of-range values
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_detections(const std::vector<DetectionRecord>& records,
                             const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) j.push_back(to_json(r));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_detections: cannot open " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Removal probability profile: CSV rows of (azimuth_deg, probability)
// ---------------------------------------------------------------------------

/// Piecewise-linear map azimuth -> removal probability p_j.
///
/// Queries inside the sampled span interpolate linearly; outside it the
/// probability is 0 (the attack laser does not reach there). A single-row
/// table extends its probability everywhere. Row azimuths may use any
/// continuous window of width <= 360 (e.g. [-15, 15]); queries are folded
/// by +-360 into that window.
class AzimuthProbTable {
 public:
  AzimuthProbTable() = default;

  explicit AzimuthProbTable(std::vector<std::pair<double, double>> rows)
      : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!(rows_[i].second >= 0.0 && rows_[i].second <= 1.0)) {
        throw ValidationError("removal profile: probability out of [0, 1]");
      }
      if (i > 0 && !(rows_[i].first > rows_[i - 1].first)) {
        throw ValidationError("removal profile: azimuths must be strictly increasing");
      }
    }
    if (!rows_.empty() && rows_.back().first - rows_.front().first > 360.0) {
      throw ValidationError("removal profile: azimuth span exceeds 360 degrees");
    }
  }

  bool empty() const { return rows_.empty(); }
  const std::vector<std::pair<double, double>>& rows() const { return rows_; }

  double at(double azimuth_deg) const {
    if (rows_.empty()) return 0.0;
    if (rows_.size() == 1) return rows_.front().second;
    const double lo = rows_.front().first;
    const double hi = rows_.back().first;
    double q = azimuth_deg;
    if (q > hi) q -= 360.0;
    if (q < lo) q += 360.0;
    if (q < lo || q > hi) return 0.0;
    // binary search for the bracketing segment
    std::size_t l = 0;
    std::size_t hi_idx = rows_.size() - 1;
    while (l + 1 < hi_idx) {
      const std::size_t mid = (l + hi_idx) / 2;
      if (rows_[mid].first <= q) {
        l = mid;
      } else {
        hi_idx = mid;
      }
    }
    const std::size_t r = l + 1;
    const auto& [a0, p0] = rows_[l];
    const auto& [a1, p1] = rows_[r];
    const double t = (q - a0) / (a1 - a0);
    return p0 + t * (p1 - p0);
  }

 private:
  std::vector<std::pair<double, double>> rows_;
};

inline AzimuthProbTable read_removal_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("read_removal_profile: cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double az = 0.0;
    double p = 0.0;
    char comma = 0;
    std::istringstream ss(line);
    if (!(ss >> az >> comma >> p) || comma != ',') {
      throw FormatError("read_removal_profile: malformed row at line " +
                        std::to_string(lineno));
    }
    if (!std::isfinite(az) || !std::isfinite(p)) {
      throw FormatError("read_removal_profile: non-finite value at line " +
                        std::to_string(lineno));
    }
    rows.emplace_back(az, p);
  }
  return AzimuthProbTable(std::move(rows));  // range/order checks live there
}

inline void write_removal_profile(const AzimuthProbTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_removal_profile: cannot open " + path);
  out << "# azimuth_deg,probability\n";
  char row[80];
  for (const auto& [az, p] : table.rows()) {
    std::snprintf(row, sizeof(row), "%.9g,%.9g\n", az, p);
    out << row;
  }
}

}  // namespace spoofsim

#endif  // SPOOFSIM_PC_IO_HPP
