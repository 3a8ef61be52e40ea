// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface for the simulation library.
//
//   spoofsim profiles  [--name N]
//   spoofsim attack    --config C --in IN --out OUT
//   spoofsim scenario  --model M --background B --out-dir D
//   spoofsim eval      --clouds D --detections D --gt D --mode M
//   spoofsim sweep     --axis A --values V --config C --out CSV
//   spoofsim count     --benign B --attacked A --out CSV
//
// Exit codes: 0 success, 2 usage/input error, 3 attack not applicable.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spoofsim/spoofsim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotApplicable = 3;

// Child-stream keys for root seed splitting, one per command.
constexpr std::uint64_t kSeedAttack = 201;
constexpr std::uint64_t kSeedSweep = 202;

// ---------------------------------------------------------------------------
// attack config
// ---------------------------------------------------------------------------

struct InjectionConfig {
  std::string pattern_path;  // required by `attack`; sweep supplies its own pattern
  std::optional<std::size_t> downsample_n;
  double inner_sigma_m = 0.10;
  double inter_sigma_m = 0.35;
  std::optional<std::vector<double>> inner_sigma_per_altitude;
  std::string rand_model = "profile";  // profile | none | gaussian:S | uniform:H
  double spoofed_intensity = 255.0;
  std::string merge = "replace";  // replace | append | none
};

struct RemovalConfig {
  std::string kind = "hfr";  // pra | hfr
  double frequency_hz = 1.0e6;
  std::optional<spoofsim::AzimuthSpan> span;  // absent -> auto (object span)
  json prob;                                  // "default" | {"plateau":..} | {"constant":p} | {"csv":path}
  bool allow_inapplicable = false;
};

struct ScenarioConfig {
  std::string model_path;
  std::string background = "synthetic";  // path or "synthetic"
  double distance = 8.0;
  double nose_offset = 0.0;
  double jitter_lateral = 0.0;
  double jitter_longitudinal = 0.0;
};

struct AttackConfig {
  std::string profile = "VLP-16";
  std::uint64_t seed = 0;
  std::optional<InjectionConfig> injection;
  std::optional<RemovalConfig> removal;
  std::optional<ScenarioConfig> scenario;
  spoofsim::DetectorParams detector;
};

spoofsim::RandModel parse_rand_model(const std::string& text,
                                     const spoofsim::LidarProfile& profile) {
  if (text == "profile") return profile.rand_model;
  if (text == "none") return spoofsim::RandModel::none();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    const double value = std::stod(text.substr(colon + 1));
    if (kind == "gaussian") return spoofsim::RandModel::gaussian(value);
    if (kind == "uniform") return spoofsim::RandModel::uniform(value);
  }
  // A bare profile name selects that profile's model.
  const auto& builtins = spoofsim::builtin_profiles();
  if (const auto it = builtins.find(text); it != builtins.end()) {
    return it->second.rand_model;
  }
  throw spoofsim::ValidationError("unknown rand_model '" + text + "'");
}

AttackConfig load_attack_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spoofsim::FormatError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw spoofsim::FormatError(std::string("config: ") + e.what());
  }

  AttackConfig cfg;
  try {
    cfg.profile = j.value("profile", std::string("VLP-16"));
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("injection") && j.contains("removal")) {
      throw spoofsim::ValidationError("config: exactly one attack kind may be present");
    }
    if (j.contains("injection")) {
      const auto& ji = j.at("injection");
      InjectionConfig ic;
      ic.pattern_path = ji.value("pattern", std::string());
      if (ji.contains("downsample_n") && !ji.at("downsample_n").is_null()) {
        ic.downsample_n = ji.at("downsample_n").get<std::size_t>();
      }
      ic.inner_sigma_m = ji.value("inner_sigma", 0.10);
      ic.inter_sigma_m = ji.value("inter_sigma", 0.35);
      if (ji.contains("inner_sigma_per_altitude")) {
        ic.inner_sigma_per_altitude =
            ji.at("inner_sigma_per_altitude").get<std::vector<double>>();
      }
      ic.rand_model = ji.value("rand_model", std::string("profile"));
      ic.spoofed_intensity = ji.value("spoofed_intensity", 255.0);
      ic.merge = ji.value("merge", std::string("replace"));
      cfg.injection = std::move(ic);
    }
    if (j.contains("removal")) {
      const auto& jr = j.at("removal");
      RemovalConfig rc;
      rc.kind = jr.value("kind", std::string("hfr"));
      rc.frequency_hz = jr.value("frequency_hz", 1.0e6);
      if (jr.contains("span")) {
        const auto& s = jr.at("span");
        rc.span = spoofsim::AzimuthSpan{s.at(0).get<double>(), s.at(1).get<double>()};
      }
      rc.prob = jr.value("prob", json("default"));
      rc.allow_inapplicable = jr.value("allow_inapplicable", false);
      cfg.removal = std::move(rc);
    }
    if (j.contains("scenario")) {
      const auto& js = j.at("scenario");
      ScenarioConfig sc;
      sc.model_path = js.value("model", std::string());
      sc.background = js.value("background", std::string("synthetic"));
      sc.distance = js.value("distance", 8.0);
      sc.nose_offset = js.value("nose_offset", 0.0);
      sc.jitter_lateral = js.value("jitter_lateral", 0.0);
      sc.jitter_longitudinal = js.value("jitter_longitudinal", 0.0);
      cfg.scenario = std::move(sc);
    }
    if (j.contains("detector")) {
      const auto& jd = j.at("detector");
      cfg.detector.cluster_radius_m = jd.value("cluster_radius", 0.5);
      cfg.detector.min_points = jd.value("min_points", std::size_t{10});
      if (jd.contains("max_points")) {
        cfg.detector.max_points = jd.at("max_points").get<std::size_t>();
      }
      cfg.detector.ground_z_m = jd.value("ground_z", -1.4);
    }
  } catch (const json::exception& e) {
    throw spoofsim::FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

spoofsim::AzimuthProbTable resolve_prob_table(const json& prob,
                                              const spoofsim::AzimuthSpan& span) {
  if (prob.is_null() || (prob.is_string() && prob.get<std::string>() == "default")) {
    return spoofsim::build_removal_profile(spoofsim::default_plateau(span), span);
  }
  if (prob.is_object() && prob.contains("constant")) {
    const double p = prob.at("constant").get<double>();
    return spoofsim::build_removal_profile(
        spoofsim::PlateauShape{p, span.width(), 0.0}, span);
  }
  if (prob.is_object() && prob.contains("plateau")) {
    const auto& pl = prob.at("plateau");
    spoofsim::PlateauShape shape;
    shape.p_center = pl.value("p_center", 0.97);
    shape.plateau_deg = pl.value("plateau_deg", 0.6 * span.width());
    shape.falloff_deg = pl.value("falloff_deg", 0.2 * span.width());
    return spoofsim::build_removal_profile(shape, span);
  }
  if (prob.is_object() && prob.contains("csv")) {
    return spoofsim::read_removal_profile(prob.at("csv").get<std::string>());
  }
  throw spoofsim::ValidationError("removal.prob: expected \"default\", {constant}, "
                                  "{plateau} or {csv}");
}

const spoofsim::LidarProfile& find_profile(
    const std::map<std::string, spoofsim::LidarProfile>& registry, const std::string& name) {
  const auto it = registry.find(name);
  if (it == registry.end()) {
    throw spoofsim::ValidationError("unknown LiDAR profile '" + name + "'");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// profiles
// ---------------------------------------------------------------------------

std::string rand_model_text(const spoofsim::RandModel& m) {
  char buf[48];
  switch (m.kind) {
    case spoofsim::RandModel::Kind::Gaussian:
      std::snprintf(buf, sizeof(buf), "gaussian(%.6g)", m.sigma_m);
      return buf;
    case spoofsim::RandModel::Kind::Uniform:
      std::snprintf(buf, sizeof(buf), "uniform(+-%.6g)", m.half_width_m);
      return buf;
    default:
      return "none";
  }
}

std::string firing_interval_text(const spoofsim::LidarProfile& p) {
  if (!p.firing_interval) return "-";
  char buf[48];
  const auto& f = *p.firing_interval;
  if (f.kind == spoofsim::FiringIntervalDist::Kind::Uniform) {
    std::snprintf(buf, sizeof(buf), "U(%.3g,%.3g)us", f.a_us, f.b_us);
  } else {
    std::snprintf(buf, sizeof(buf), "N(%.3g,%.3g)us", f.a_us, f.b_us);
  }
  return buf;
}

void print_profile_row(const spoofsim::LidarProfile& p) {
  char row[360];
  std::snprintf(row, sizeof(row),
                "%-8s %-9s mot=%-5.3g max=%-5.3g vfov=%-5.3g hfov=%-5.3g ch=%-3d "
                "simul=%-2d rand=%-18s fingerprint=%-3s firing=%-15s azres=%.3g",
                p.name.c_str(),
                p.generation == spoofsim::Generation::First ? "first-gen" : "new-gen",
                p.mot_m, p.max_range_m, p.vertical_fov_deg, p.horizontal_fov_deg, p.channels,
                p.simultaneous_firing, rand_model_text(p.rand_model).c_str(),
                p.fingerprint ? "yes" : "no", firing_interval_text(p).c_str(),
                p.azimuth_resolution_deg);
  std::cout << row << "\n";
}

int cmd_profiles(const std::string& name, const std::optional<std::string>& profiles_file) {
  const auto registry = spoofsim::profile_registry(profiles_file);
  if (!name.empty()) {
    const auto it = registry.find(name);
    if (it == registry.end()) {
      std::cerr << "error: unknown LiDAR profile '" << name << "'\n";
      return kExitUsage;
    }
    print_profile_row(it->second);
    return kExitOk;
  }
  for (const auto& [_, p] : registry) print_profile_row(p);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

spoofsim::InjectionSpec make_injection_spec(const InjectionConfig& ic,
                                            const spoofsim::LidarProfile& profile,
                                            spoofsim::PointCloud pattern,
                                            std::uint64_t seed) {
  spoofsim::InjectionSpec spec;
  spec.pattern = std::move(pattern);
  spec.downsample_n = ic.downsample_n;
  spec.inner_sigma_m = ic.inner_sigma_m;
  spec.inter_sigma_m = ic.inter_sigma_m;
  spec.inner_sigma_per_altitude = ic.inner_sigma_per_altitude;
  spec.rand_model = parse_rand_model(ic.rand_model, profile);
  spec.spoofed_intensity = ic.spoofed_intensity;
  spec.seed = seed;
  return spec;
}

int cmd_attack(const std::string& config_path, const std::string& in_path,
               const std::string& out_path, const std::optional<std::uint64_t>& seed_flag,
               const std::optional<std::string>& profile_flag,
               const std::optional<std::string>& profiles_file) {
  AttackConfig cfg = load_attack_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  if (profile_flag) cfg.profile = *profile_flag;
  if (cfg.injection.has_value() == cfg.removal.has_value()) {
    throw spoofsim::ValidationError("config: exactly one of injection/removal required");
  }
  const auto registry = spoofsim::profile_registry(profiles_file);
  const spoofsim::LidarProfile& profile = find_profile(registry, cfg.profile);

  spoofsim::PointCloud scene = spoofsim::read_bin(in_path);
  const std::uint64_t seed = spoofsim::SplitRng(cfg.seed).child(kSeedAttack).next_u64();

  if (cfg.injection) {
    const InjectionConfig& ic = *cfg.injection;
    if (ic.pattern_path.empty()) {
      throw spoofsim::ValidationError("injection config: 'pattern' path required");
    }
    spoofsim::PointCloud pattern = spoofsim::read_bin(ic.pattern_path);
    const std::size_t pattern_size = pattern.size();
    const auto spec = make_injection_spec(ic, profile, std::move(pattern), seed);
    const spoofsim::PointCloud spoofed = spoofsim::apply_injection(spec);

    spoofsim::PointCloud result;
    if (ic.merge == "none") {
      result = spoofed;
    } else if (ic.merge == "append") {
      result = spoofsim::merge_into_scene(scene, spoofed, spoofsim::MergePolicy::Append,
                                          profile.azimuth_resolution_deg);
    } else if (ic.merge == "replace") {
      result = spoofsim::merge_into_scene(scene, spoofed, spoofsim::MergePolicy::Replace,
                                          profile.azimuth_resolution_deg);
    } else {
      throw spoofsim::ValidationError("injection.merge must be replace|append|none");
    }
    spoofsim::write_bin(result, out_path);
    std::cout << "injection profile=" << profile.name << " pattern=" << pattern_size
              << " injected=" << spoofed.size() << " output=" << result.size() << "\n";
    return kExitOk;
  }

  const RemovalConfig& rc = *cfg.removal;
  spoofsim::RemovalSpec spec;
  spec.kind = rc.kind == "pra" ? spoofsim::RemovalSpec::Kind::PRA
                               : spoofsim::RemovalSpec::Kind::HFR;
  if (rc.kind != "pra" && rc.kind != "hfr") {
    throw spoofsim::ValidationError("removal.kind must be pra|hfr");
  }
  spec.frequency_hz = rc.frequency_hz;
  spec.seed = seed;
  spec.allow_inapplicable = rc.allow_inapplicable;
  if (!rc.span) {
    throw spoofsim::ValidationError("removal config: 'span' [lo,hi] required");
  }
  spec.attack_span = *rc.span;
  spec.prob_profile = resolve_prob_table(rc.prob, spec.attack_span);

  const spoofsim::PointCloud binned =
      spoofsim::assign_azimuth_bins(std::move(scene), profile.azimuth_resolution_deg);
  const spoofsim::RemovalOutcome outcome = spoofsim::apply_removal(binned, spec, profile);
  spoofsim::write_bin(outcome.surviving, out_path);
  char summary[200];
  std::snprintf(summary, sizeof(summary),
                "removal profile=%s kind=%s points=%zu hit=%zu removed=%zu noise=%zu "
                "surviving=%zu removed_fraction_of_hit=%.4g",
                profile.name.c_str(), rc.kind.c_str(), binned.size(), outcome.hit_count,
                outcome.removed_count, outcome.noise_count, outcome.surviving.size(),
                outcome.hit_count == 0
                    ? 0.0
                    : static_cast<double>(outcome.removed_count) /
                          static_cast<double>(outcome.hit_count));
  std::cout << summary << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

spoofsim::PointCloud load_background(const std::string& spec) {
  if (spec == "synthetic") return spoofsim::synthetic_background();
  if (spec.rfind("synthetic:", 0) == 0) {
    // synthetic:wall_distance
    spoofsim::SyntheticBackgroundConfig cfg;
    cfg.wall_distance_m = std::stod(spec.substr(10));
    return spoofsim::synthetic_background(cfg);
  }
  return spoofsim::read_bin(spec);
}

void write_gt_sidecar(const spoofsim::OrientedBox& box, double distance,
                      const std::string& path) {
  spoofsim::DetectionRecord rec;
  rec.box = box;
  rec.score = 1.0;
  rec.label = "vehicle";
  json j = json::array();
  json obj = spoofsim::to_json(rec);
  obj["distance"] = distance;  // extra key; readers ignore unknown fields
  j.push_back(obj);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw spoofsim::Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

int cmd_scenario(const std::string& model_path, const std::string& background_spec,
                 double d_min, double d_max, double step, double nose_offset,
                 const std::string& out_dir) {
  const spoofsim::ObjectModel model = spoofsim::load_object_model(model_path);
  const spoofsim::PointCloud background = load_background(background_spec);
  const auto scenarios =
      spoofsim::distance_sweep(background, model, d_min, d_max, step, nose_offset);

  fs::create_directories(out_dir);
  std::ofstream manifest(fs::path(out_dir) / "manifest.csv", std::ios::trunc);
  manifest << "stem,distance,object_points\n";
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "s%03zu", i);
    const auto& sc = scenarios[i];
    spoofsim::write_bin(sc.cloud, (fs::path(out_dir) / (std::string(stem) + ".bin")).string());
    write_gt_sidecar(sc.gt_box, sc.distance,
                     (fs::path(out_dir) / (std::string(stem) + "_gt.json")).string());
    char row[96];
    std::snprintf(row, sizeof(row), "%s,%.9g,%zu\n", stem, sc.distance,
                  sc.object_point_count);
    manifest << row;
  }
  std::cout << "scenarios=" << scenarios.size() << " out_dir=" << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& clouds_dir, const std::string& detections_dir,
             const std::string& gt_dir, const std::string& mode, const std::string& out_csv,
             const std::string& report_path) {
  if (mode != "injection" && mode != "removal") {
    throw spoofsim::ValidationError("eval: mode must be injection|removal");
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(clouds_dir)) {
    if (entry.path().extension() == ".bin") stems.push_back(entry.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw spoofsim::ValidationError("eval: no .bin clouds in " + clouds_dir);

  std::vector<bool> outcomes;
  std::vector<std::string> rows;
  for (const std::string& stem : stems) {
    const fs::path det_path = fs::path(detections_dir) / (stem + ".json");
    fs::path gt_path = fs::path(gt_dir) / (stem + "_gt.json");
    if (!fs::exists(gt_path)) gt_path = fs::path(gt_dir) / (stem + ".json");
    if (!fs::exists(det_path) || !fs::exists(gt_path)) {
      std::cerr << "error: missing detections or ground truth for stem '" << stem << "'\n";
      return kExitUsage;
    }
    const auto detections = spoofsim::read_detections(det_path.string());
    const auto gt_records = spoofsim::read_detections(gt_path.string());
    if (gt_records.empty()) {
      std::cerr << "error: ground truth for '" << stem << "' is empty\n";
      return kExitUsage;
    }
    const bool ok = mode == "injection"
                        ? spoofsim::injection_success(detections, gt_records.front().box)
                        : spoofsim::removal_success(detections, gt_records.front().box);
    outcomes.push_back(ok);
    rows.push_back(stem + "," + (ok ? "1" : "0"));
  }

  const spoofsim::EvalReport report = spoofsim::success_rate(outcomes);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw spoofsim::Error("cannot write " + out_csv);
    out << "stem,success\n";
    for (const auto& r : rows) out << r << "\n";
  }
  if (!report_path.empty()) {
    json j{{"mode", mode},
           {"trials", report.trials},
           {"successes", report.successes},
           {"success_rate", report.success_rate},
           {"per_trial", report.per_trial}};
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw spoofsim::Error("cannot write " + report_path);
    out << j.dump(2) << "\n";
  }
  char line[120];
  std::snprintf(line, sizeof(line), "mode=%s trials=%zu successes=%zu rate=%.4g",
                mode.c_str(), report.trials, report.successes, report.success_rate);
  std::cout << line << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepCell {
  std::string value_text;
  double distance = 0.0;
  std::size_t object_points = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
};

// Object azimuth span with a small margin, folded around the +x axis.
spoofsim::AzimuthSpan auto_span(const spoofsim::Scenario& scenario,
                                const spoofsim::PointCloud& background) {
  double lo = 1e9;
  double hi = -1e9;
  for (std::size_t i = 0; i < scenario.cloud.size(); ++i) {
    const spoofsim::Point& moved = scenario.cloud.points[i];
    const spoofsim::Point& orig = background.points[i];
    const bool was_moved = moved.x != orig.x || moved.y != orig.y || moved.z != orig.z;
    if (!was_moved) continue;
    double az = spoofsim::azimuth_deg_of(moved.x, moved.y);
    if (az >= 180.0) az -= 360.0;
    lo = std::min(lo, az);
    hi = std::max(hi, az);
  }
  if (lo > hi) throw spoofsim::ValidationError("sweep: no object points to derive span from");
  return {lo - 2.0, hi + 2.0};
}

spoofsim::PointCloud object_pattern(const spoofsim::Scenario& scenario,
                                    const spoofsim::PointCloud& background) {
  spoofsim::PointCloud pattern;
  for (std::size_t i = 0; i < scenario.cloud.size(); ++i) {
    const spoofsim::Point& moved = scenario.cloud.points[i];
    const spoofsim::Point& orig = background.points[i];
    if (moved.x != orig.x || moved.y != orig.y || moved.z != orig.z) {
      pattern.points.push_back(moved);
    }
  }
  return pattern;
}

int cmd_sweep(const std::string& axis, const std::vector<std::string>& values,
              const std::string& config_path, const std::string& detector_mode,
              const std::string& external_dir, std::size_t trials, std::uint64_t root_seed,
              unsigned jobs, const std::string& out_csv) {
  if (values.empty()) throw spoofsim::ValidationError("sweep: --values must be non-empty");
  if (axis != "rand_model" && axis != "downsample_n" && axis != "frequency" &&
      axis != "distance") {
    throw spoofsim::ValidationError(
        "sweep: axis must be rand_model|downsample_n|frequency|distance");
  }
  if (detector_mode != "oracle" && detector_mode != "external") {
    throw spoofsim::ValidationError("sweep: detector must be oracle|external");
  }
  if (detector_mode == "external" && external_dir.empty()) {
    throw spoofsim::ValidationError("sweep: --external-dir required with external detector");
  }

  AttackConfig cfg = load_attack_config(config_path);
  if (!cfg.scenario) {
    throw spoofsim::ValidationError("sweep config: 'scenario' section required");
  }
  const auto registry = spoofsim::profile_registry(std::nullopt);
  const spoofsim::LidarProfile& profile = find_profile(registry, cfg.profile);
  const spoofsim::PointCloud background = load_background(cfg.scenario->background);
  const spoofsim::ObjectModel base_model = spoofsim::load_object_model(cfg.scenario->model_path);

  const bool removal_axis = axis == "frequency" || (axis == "distance" && cfg.removal);
  if (axis == "frequency" && !cfg.removal) {
    throw spoofsim::ValidationError("sweep: frequency axis needs a removal config");
  }
  if ((axis == "rand_model" || axis == "downsample_n") && !cfg.injection) {
    throw spoofsim::ValidationError("sweep: " + axis + " axis needs an injection config");
  }

  std::vector<SweepCell> cells(values.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    cells[c].value_text = values[c];
    cells[c].trials = trials;
    cells[c].distance =
        axis == "distance" ? std::stod(values[c]) : cfg.scenario->distance;
  }

  // One attacked cloud per (cell, trial); detections come from the oracle
  // in-process or from the external directory handshake.
  struct TrialOutcome {
    bool success = false;
  };
  std::vector<std::vector<TrialOutcome>> outcomes(cells.size(),
                                                  std::vector<TrialOutcome>(trials));

  const fs::path ext_root(external_dir);
  bool awaiting_external = false;
  if (detector_mode == "external") {
    fs::create_directories(ext_root / "clouds");
    fs::create_directories(ext_root / "gt");
    fs::create_directories(ext_root / "detections");
  }

  std::atomic<std::size_t> next_task{0};
  const std::size_t total_tasks = cells.size() * trials;
  std::atomic<bool> missing_external{false};
  std::mutex error_mutex;
  std::optional<std::string> first_error;
  std::atomic<int> error_code{kExitOk};

  auto run_task = [&](std::size_t task) {
    const std::size_t c = task / trials;
    const std::size_t t = task % trials;
    const std::string& value = values[c];

    const std::uint64_t trial_seed =
        spoofsim::SplitRng(root_seed).child(kSeedSweep).child(c).child(t).next_u64();
    spoofsim::SplitRng trial_rng(trial_seed);

    // Scenario (per trial re-derived so pose jitter, when configured, varies).
    spoofsim::ObjectModel model = base_model;
    if (cfg.scenario->jitter_lateral > 0.0 || cfg.scenario->jitter_longitudinal > 0.0) {
      spoofsim::SplitRng jitter_rng = trial_rng.child(1);
      model = spoofsim::jitter_pose(model, cfg.scenario->jitter_lateral,
                                    cfg.scenario->jitter_longitudinal, jitter_rng);
    }
    const double distance = cells[c].distance;
    const spoofsim::Scenario scenario =
        spoofsim::place_object(background, model, distance, cfg.scenario->nose_offset);
    if (t == 0) cells[c].object_points = scenario.object_point_count;

    spoofsim::PointCloud attacked;
    if (!removal_axis && cfg.injection) {
      // Injection: spoof the object pattern into the object-free background.
      InjectionConfig ic = *cfg.injection;
      if (axis == "rand_model") ic.rand_model = value;
      if (axis == "downsample_n" && value != "all") {
        ic.downsample_n = static_cast<std::size_t>(std::stoull(value));
      }
      spoofsim::InjectionSpec spec = make_injection_spec(
          ic, profile, object_pattern(scenario, background), trial_seed);
      const spoofsim::PointCloud spoofed = spoofsim::apply_injection(spec);
      attacked = spoofsim::merge_into_scene(background, spoofed,
                                            ic.merge == "append"
                                                ? spoofsim::MergePolicy::Append
                                                : spoofsim::MergePolicy::Replace,
                                            profile.azimuth_resolution_deg);
    } else if (removal_axis) {
      RemovalConfig rc = cfg.removal ? *cfg.removal : RemovalConfig{};
      if (axis == "frequency") rc.frequency_hz = std::stod(value);
      spoofsim::RemovalSpec spec;
      spec.kind = rc.kind == "pra" ? spoofsim::RemovalSpec::Kind::PRA
                                   : spoofsim::RemovalSpec::Kind::HFR;
      spec.frequency_hz = rc.frequency_hz;
      spec.seed = trial_seed;
      spec.allow_inapplicable = rc.allow_inapplicable;
      spec.attack_span = rc.span ? *rc.span : auto_span(scenario, background);
      spec.prob_profile = resolve_prob_table(rc.prob, spec.attack_span);
      const spoofsim::PointCloud binned = spoofsim::assign_azimuth_bins(
          scenario.cloud, profile.azimuth_resolution_deg);
      attacked = spoofsim::apply_removal(binned, spec, profile).surviving;
    } else {
      // Plain detectability of the benign scenario.
      attacked = scenario.cloud;
    }

    if (detector_mode == "external") {
      char stem[64];
      std::snprintf(stem, sizeof(stem), "c%03zu_t%03zu", c, t);
      const fs::path det_path = ext_root / "detections" / (std::string(stem) + ".json");
      if (!fs::exists(det_path)) {
        spoofsim::write_bin(attacked,
                            (ext_root / "clouds" / (std::string(stem) + ".bin")).string());
        write_gt_sidecar(scenario.gt_box, distance,
                         (ext_root / "gt" / (std::string(stem) + "_gt.json")).string());
        missing_external = true;
        return;
      }
      const auto detections = spoofsim::read_detections(det_path.string());
      outcomes[c][t].success = removal_axis
                                   ? spoofsim::removal_success(detections, scenario.gt_box)
                                   : spoofsim::injection_success(detections, scenario.gt_box);
      return;
    }

    const auto detections = spoofsim::detect(attacked, cfg.detector);
    outcomes[c][t].success = removal_axis
                                 ? spoofsim::removal_success(detections, scenario.gt_box)
                                 : spoofsim::injection_success(detections, scenario.gt_box);
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= total_tasks) return;
      try {
        run_task(task);
      } catch (const spoofsim::ApplicabilityError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = e.what();
        error_code = kExitNotApplicable;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = e.what();
        error_code = kExitUsage;
      }
    }
  };

  const unsigned n_workers = std::max(1u, jobs);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (first_error) {
    std::cerr << "error: " << *first_error << "\n";
    return error_code.load();
  }

  awaiting_external = missing_external.load();
  if (awaiting_external) {
    std::cout << "emitted clouds and ground truth under " << external_dir
              << "; run your detector into detections/ and re-invoke\n";
    return kExitOk;
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t t = 0; t < trials; ++t) {
      if (outcomes[c][t].success) ++cells[c].successes;
    }
  }

  std::ostringstream csv;
  csv << "axis,value,distance,trials,successes,success_rate,object_points\n";
  for (const SweepCell& cell : cells) {
    char row[200];
    std::snprintf(row, sizeof(row), "%s,%s,%.9g,%zu,%zu,%.9g,%zu\n", axis.c_str(),
                  cell.value_text.c_str(), cell.distance, cell.trials, cell.successes,
                  cell.trials == 0 ? 0.0
                                   : static_cast<double>(cell.successes) /
                                         static_cast<double>(cell.trials),
                  cell.object_points);
    csv << row;
  }
  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw spoofsim::Error("cannot write " + out_csv);
    out << csv.str();
  }
  std::cout << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

int cmd_count(const std::string& benign_path, const std::string& attacked_path,
              double threshold, double bin_deg, double match_tol,
              const std::string& out_csv) {
  const spoofsim::PointCloud benign = spoofsim::read_bin(benign_path);
  const spoofsim::PointCloud attacked = spoofsim::read_bin(attacked_path);
  const std::size_t injected = spoofsim::count_injected(benign, attacked, threshold);
  const std::size_t removed = spoofsim::count_removed(benign, attacked, threshold, match_tol);
  const auto per_azimuth =
      spoofsim::removal_percentage_per_azimuth(benign, attacked, bin_deg, threshold, match_tol);

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw spoofsim::Error("cannot write " + out_csv);
    out << "azimuth_bin,azimuth_start_deg,removal_fraction\n";
    for (const auto& [bin, frac] : per_azimuth) {
      char row[96];
      std::snprintf(row, sizeof(row), "%d,%.9g,%.9g\n", bin, bin * bin_deg, frac);
      out << row;
    }
  }
  std::cout << "injected=" << injected << " removed=" << removed
            << " bins=" << per_azimuth.size() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR spoofing attack capability simulator"};
  app.require_subcommand(1);

  // profiles
  auto* profiles_cmd = app.add_subcommand("profiles", "List LiDAR profiles");
  std::string profiles_name;
  std::string profiles_file;
  profiles_cmd->add_option("--name", profiles_name, "Show a single profile");
  profiles_cmd->add_option("--profiles-file", profiles_file,
                           "Extra profile config overriding built-ins");

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "Apply an attack to a point cloud");
  std::string attack_config, attack_in, attack_out, attack_profile, attack_profiles_file;
  std::uint64_t attack_seed = 0;
  bool attack_seed_set = false;
  attack_cmd->add_option("--config", attack_config, "Attack config JSON")->required();
  attack_cmd->add_option("--in", attack_in, "Input cloud (.bin)")->required();
  attack_cmd->add_option("--out", attack_out, "Output cloud (.bin)")->required();
  attack_cmd->add_option("--profile", attack_profile, "Override the config's LiDAR profile");
  attack_cmd->add_option("--profiles-file", attack_profiles_file, "Extra profile config");
  attack_cmd->add_option("--seed", attack_seed, "Override the config's seed")
      ->each([&attack_seed_set](const std::string&) { attack_seed_set = true; });

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "Generate distance-sweep scenarios");
  std::string scen_model, scen_background = "synthetic", scen_out_dir;
  double scen_dmin = 0.0, scen_dmax = 14.0, scen_step = 1.0, scen_nose = 0.0;
  scenario_cmd->add_option("--model", scen_model, "Object model (.stl or box .json)")
      ->required();
  scenario_cmd->add_option("--background", scen_background,
                           "Background cloud (.bin), 'synthetic' or 'synthetic:<dist>'");
  scenario_cmd->add_option("--d-min", scen_dmin, "Minimum distance [m]");
  scenario_cmd->add_option("--d-max", scen_dmax, "Maximum distance [m]");
  scenario_cmd->add_option("--step", scen_step, "Distance step [m]");
  scenario_cmd->add_option("--nose-offset", scen_nose, "Victim nose offset from sensor [m]");
  scenario_cmd->add_option("--out-dir", scen_out_dir, "Output directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate detections against ground truth");
  std::string eval_clouds, eval_dets, eval_gt, eval_mode, eval_out, eval_report;
  eval_cmd->add_option("--clouds", eval_clouds, "Clouds directory")->required();
  eval_cmd->add_option("--detections", eval_dets, "Detections directory")->required();
  eval_cmd->add_option("--gt", eval_gt, "Ground-truth directory")->required();
  eval_cmd->add_option("--mode", eval_mode, "injection|removal")->required();
  eval_cmd->add_option("--out", eval_out, "Per-scenario CSV output");
  eval_cmd->add_option("--report", eval_report, "Aggregate report JSON output");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Success-rate sweep over one parameter");
  std::string sweep_axis, sweep_values, sweep_config, sweep_detector = "oracle";
  std::string sweep_external_dir, sweep_out;
  std::size_t sweep_trials = 100;
  std::uint64_t sweep_seed = 0;
  unsigned sweep_jobs = 1;
  sweep_cmd->add_option("--axis", sweep_axis, "rand_model|downsample_n|frequency|distance")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep_cmd->add_option("--config", sweep_config, "Base attack config JSON")->required();
  sweep_cmd->add_option("--detector", sweep_detector, "oracle|external");
  sweep_cmd->add_option("--external-dir", sweep_external_dir,
                        "Directory for the external detector handshake");
  sweep_cmd->add_option("--trials", sweep_trials, "Seeded trials per cell");
  sweep_cmd->add_option("--seed", sweep_seed, "Root seed");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Concurrent workers");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path");

  // count
  auto* count_cmd = app.add_subcommand("count", "Count injected/removed points");
  std::string count_benign, count_attacked, count_out;
  double count_threshold = 80.0, count_bin = 1.0, count_tol = 0.01;
  count_cmd->add_option("--benign", count_benign, "Benign cloud (.bin)")->required();
  count_cmd->add_option("--attacked", count_attacked, "Attacked cloud (.bin)")->required();
  count_cmd->add_option("--threshold", count_threshold, "Spoofed-intensity threshold");
  count_cmd->add_option("--bin-deg", count_bin, "Azimuth pie width [deg]");
  count_cmd->add_option("--match-tol", count_tol, "Point matching tolerance [m]");
  count_cmd->add_option("--out", count_out, "Per-azimuth CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kExitUsage;
  }

  try {
    if (profiles_cmd->parsed()) {
      return cmd_profiles(profiles_name,
                          profiles_file.empty() ? std::nullopt
                                                : std::optional<std::string>(profiles_file));
    }
    if (attack_cmd->parsed()) {
      return cmd_attack(attack_config, attack_in, attack_out,
                        attack_seed_set ? std::optional<std::uint64_t>(attack_seed)
                                        : std::nullopt,
                        attack_profile.empty() ? std::nullopt
                                               : std::optional<std::string>(attack_profile),
                        attack_profiles_file.empty()
                            ? std::nullopt
                            : std::optional<std::string>(attack_profiles_file));
    }
    if (scenario_cmd->parsed()) {
      return cmd_scenario(scen_model, scen_background, scen_dmin, scen_dmax, scen_step,
                          scen_nose, scen_out_dir);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_clouds, eval_dets, eval_gt, eval_mode, eval_out, eval_report);
    }
    if (sweep_cmd->parsed()) {
      std::vector<std::string> values;
      std::stringstream ss(sweep_values);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
      }
      return cmd_sweep(sweep_axis, values, sweep_config, sweep_detector, sweep_external_dir,
                       sweep_trials, sweep_seed, sweep_jobs, sweep_out);
    }
    if (count_cmd->parsed()) {
      return cmd_count(count_benign, count_attacked, count_threshold, count_bin, count_tol,
                       count_out);
    }
  } catch (const spoofsim::ApplicabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotApplicable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
