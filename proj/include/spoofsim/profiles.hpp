// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_PROFILES_HPP
#define SPOOFSIM_PROFILES_HPP

#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "spoofsim/errors.hpp"
#include "spoofsim/rng.hpp"

namespace spoofsim {

/// Speed of light in vacuum, m/s.
constexpr double kSpeedOfLight = 299792458.0;

enum class Generation { First, New };

/// Meter-level model of the range error a LiDAR's laser timing
/// randomization induces on a spoofed point.
struct RandModel {
  enum class Kind { None, Gaussian, Uniform };

  Kind kind = Kind::None;
  double sigma_m = 0.0;       // Gaussian standard deviation
  double half_width_m = 0.0;  // Uniform support is [-half_width, +half_width]

  static RandModel none() { return {}; }
  static RandModel gaussian(double sigma_m) {
    if (sigma_m < 0.0) throw InvalidArgument("RandModel: sigma must be >= 0");
    return {Kind::Gaussian, sigma_m, 0.0};
  }
  static RandModel uniform(double half_width_m) {
    if (half_width_m < 0.0) throw InvalidArgument("RandModel: half width must be >= 0");
    return {Kind::Uniform, 0.0, half_width_m};
  }

  bool operator==(const RandModel&) const = default;
};

/// Distribution of the interval between consecutive laser firings, in
/// microseconds. Stored for documentation; the meter-level RandModel is
/// what drives sampling.
struct FiringIntervalDist {
  enum class Kind { Uniform, Gaussian };
  Kind kind = Kind::Uniform;
  double a_us = 0.0;  // Uniform min / Gaussian mean
  double b_us = 0.0;  // Uniform max / Gaussian std

  bool operator==(const FiringIntervalDist&) const = default;
};

/// Sensing and security parameters of one LiDAR.
struct LidarProfile {
  std::string name;
  Generation generation = Generation::First;
  double mot_m = 0.0;  // minimum operational threshold: returns below are discarded
  double max_range_m = 0.0;
  double vertical_fov_deg = 0.0;
  double horizontal_fov_deg = 0.0;
  int channels = 0;              // 0 when the vendor does not publish a count
  int simultaneous_firing = 1;   // informational only; drives no behavior
  RandModel rand_model;
  bool fingerprint = false;
  double azimuth_resolution_deg = 0.1;
  std::optional<FiringIntervalDist> firing_interval;

  void validate() const {
    if (mot_m < 0.0) throw ValidationError("profile " + name + ": mot must be >= 0");
    if (!(max_range_m > mot_m)) {
      throw ValidationError("profile " + name + ": max range must exceed mot");
    }
    if (!(horizontal_fov_deg > 0.0 && horizontal_fov_deg <= 360.0)) {
      throw ValidationError("profile " + name + ": horizontal FOV out of (0, 360]");
    }
    if (!(vertical_fov_deg > 0.0 && vertical_fov_deg <= 180.0)) {
      throw ValidationError("profile " + name + ": vertical FOV out of (0, 180]");
    }
    if (!(azimuth_resolution_deg > 0.0)) {
      throw ValidationError("profile " + name + ": azimuth resolution must be > 0");
    }
    if (firing_interval) {
      const FiringIntervalDist& f = *firing_interval;
      if (!(f.a_us > 0.0 && f.b_us > 0.0)) {
        throw ValidationError("profile " + name + ": firing interval parameters must be > 0");
      }
      if (f.kind == FiringIntervalDist::Kind::Uniform && !(f.b_us > f.a_us)) {
        throw ValidationError("profile " + name + ": firing interval max must exceed min");
      }
    }
  }
};

/// The nine studied LiDARs keyed by name. The registry is built once and
/// never mutated; lookups are pure.
inline const std::map<std::string, LidarProfile>& builtin_profiles() {
  static const std::map<std::string, LidarProfile> registry = [] {
    std::map<std::string, LidarProfile> m;
    auto add = [&m](LidarProfile p) {
      p.validate();
      m.emplace(p.name, std::move(p));
    };

    add({"VLP-16", Generation::First, 1.0, 100.0, 30.0, 360.0, 16, 1, RandModel::none(), false,
         0.1, std::nullopt});
    add({"VLP-32c", Generation::First, 1.0, 200.0, 40.0, 360.0, 32, 2, RandModel::none(), false,
         0.1, std::nullopt});
    add({"VLS-128", Generation::First, 0.5, 300.0, 40.0, 360.0, 128, 8, RandModel::none(), false,
         0.1, std::nullopt});
    add({"Pixell", Generation::New, 0.1, 56.0, 16.0, 180.0, 8, 3, RandModel::uniform(191.0),
         false, 0.1, FiringIntervalDist{FiringIntervalDist::Kind::Uniform, 4.5, 5.8}});
    add({"OS1-32", Generation::New, 0.3, 120.0, 45.0, 360.0, 32, 32, RandModel::uniform(58.0),
         false, 0.1, FiringIntervalDist{FiringIntervalDist::Kind::Uniform, 1.4, 1.8}});
    add({"L515", Generation::New, 0.25, 9.0, 55.0, 70.0, 0, 1, RandModel::gaussian(7.5), false,
         0.1, FiringIntervalDist{FiringIntervalDist::Kind::Gaussian, 51.0, 0.025}});
    add({"Horizon", Generation::New, 0.5, 260.0, 25.1, 81.7, 0, 1, RandModel::uniform(45.0),
         false, 0.1, FiringIntervalDist{FiringIntervalDist::Kind::Uniform, 4.0, 4.3}});
    add({"XT32", Generation::New, 0.0, 120.0, 31.0, 360.0, 32, 1, RandModel::none(), true, 0.1,
         std::nullopt});
    add({"Helios", Generation::New, 0.2, 150.0, 70.0, 360.0, 32, 1, RandModel::gaussian(1.5),
         false, 0.1, FiringIntervalDist{FiringIntervalDist::Kind::Gaussian, 1.6, 0.005}});
    return m;
  }();
  return registry;
}

/// Converts a firing-timing difference to the range error it causes:
/// dt * c / 2 (the laser travels out and back).
inline double interval_to_distance(double dt_seconds) {
  if (dt_seconds < 0.0) throw InvalidArgument("interval_to_distance: dt must be >= 0");
  return dt_seconds * kSpeedOfLight / 2.0;
}

/// Draws one timing-randomization range error from the given model.
inline double sample_delta_rand(const RandModel& model, SplitRng& rng) {
  switch (model.kind) {
    case RandModel::Kind::None:
      return 0.0;
    case RandModel::Kind::Gaussian:
      return rng.gaussian(0.0, model.sigma_m);
    case RandModel::Kind::Uniform:
      return rng.uniform(-model.half_width_m, model.half_width_m);
  }
  return 0.0;
}

// --- declarative profile config (JSON) -------------------------------------

inline nlohmann::json to_json(const RandModel& m) {
  switch (m.kind) {
    case RandModel::Kind::Gaussian:
      return {{"gaussian", m.sigma_m}};
    case RandModel::Kind::Uniform:
      return {{"uniform", m.half_width_m}};
    default:
      return "none";
  }
}

inline RandModel rand_model_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return RandModel::none();
    throw FormatError("rand_model: unknown kind '" + j.get<std::string>() + "'");
  }
  if (j.is_object()) {
    if (j.contains("gaussian")) return RandModel::gaussian(j.at("gaussian").get<double>());
    if (j.contains("uniform")) return RandModel::uniform(j.at("uniform").get<double>());
  }
  throw FormatError("rand_model: expected \"none\", {\"gaussian\": s} or {\"uniform\": h}");
}

inline nlohmann::json to_json(const LidarProfile& p) {
  nlohmann::json j{{"name", p.name},
                   {"generation", p.generation == Generation::First ? "first" : "new"},
                   {"mot_m", p.mot_m},
                   {"max_range_m", p.max_range_m},
                   {"vertical_fov_deg", p.vertical_fov_deg},
                   {"horizontal_fov_deg", p.horizontal_fov_deg},
                   {"channels", p.channels},
                   {"simultaneous_firing", p.simultaneous_firing},
                   {"rand_model", to_json(p.rand_model)},
                   {"fingerprint", p.fingerprint},
                   {"azimuth_resolution_deg", p.azimuth_resolution_deg}};
  if (p.firing_interval) {
    j["firing_interval_us"] = {
        {"kind", p.firing_interval->kind == FiringIntervalDist::Kind::Uniform ? "uniform"
                                                                              : "gaussian"},
        {"a", p.firing_interval->a_us},
        {"b", p.firing_interval->b_us}};
  }
  return j;
}

inline LidarProfile profile_from_json(const nlohmann::json& j) {
  LidarProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    const std::string gen = j.at("generation").get<std::string>();
    if (gen == "first") {
      p.generation = Generation::First;
    } else if (gen == "new") {
      p.generation = Generation::New;
    } else {
      throw FormatError("profile: generation must be 'first' or 'new'");
    }
    p.mot_m = j.at("mot_m").get<double>();
    p.max_range_m = j.at("max_range_m").get<double>();
    p.vertical_fov_deg = j.at("vertical_fov_deg").get<double>();
    p.horizontal_fov_deg = j.at("horizontal_fov_deg").get<double>();
    p.channels = j.value("channels", 0);
    p.simultaneous_firing = j.value("simultaneous_firing", 1);
    p.rand_model = rand_model_from_json(j.at("rand_model"));
    p.fingerprint = j.value("fingerprint", false);
    p.azimuth_resolution_deg = j.value("azimuth_resolution_deg", 0.1);
    if (j.contains("firing_interval_us")) {
      const auto& f = j.at("firing_interval_us");
      FiringIntervalDist d;
      d.kind = f.at("kind").get<std::string>() == "uniform" ? FiringIntervalDist::Kind::Uniform
                                                            : FiringIntervalDist::Kind::Gaussian;
      d.a_us = f.at("a").get<double>();
      d.b_us = f.at("b").get<double>();
      p.firing_interval = d;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("profile config: ") + e.what());
  }
  p.validate();
  return p;
}

/// Loads a JSON array of profile objects.
inline std::map<std::string, LidarProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open profile config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("profile config: ") + e.what());
  }
  if (!j.is_array()) throw FormatError("profile config: expected a JSON array");
  std::map<std::string, LidarProfile> m;
  for (const auto& item : j) {
    LidarProfile p = profile_from_json(item);
    m[p.name] = std::move(p);
  }
  return m;
}

inline void write_profiles(const std::string& path,
                           const std::map<std::string, LidarProfile>& profiles) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [_, p] : profiles) j.push_back(to_json(p));
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

/// Built-ins plus, when `config_path` is given, profiles loaded from it
/// (loaded entries override built-ins of the same name).
inline std::map<std::string, LidarProfile> profile_registry(
    const std::optional<std::string>& config_path = std::nullopt) {
  std::map<std::string, LidarProfile> m = builtin_profiles();
  if (config_path) {
    for (auto& [name, p] : load_profiles(*config_path)) m[name] = std::move(p);
  }
  return m;
}

}  // namespace spoofsim

#endif  // SPOOFSIM_PROFILES_HPP
