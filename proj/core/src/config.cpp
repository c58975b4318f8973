#include "grouptrack/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "grouptrack/error.hpp"
#include "grouptrack/feature_io.hpp"
#include "text_util.hpp"

namespace grouptrack {

namespace {

template <typename Config>
struct Field {
  std::string key;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, std::string_view)> set;
};

std::string bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  return "invalid value '" + std::string(value) + "' for '" + std::string(key) + "': expected " +
         std::string(expected);
}

template <typename T>
T parse_as(std::string_view key, std::string_view value) {
  T out{};
  if constexpr (std::is_same_v<T, bool>) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError(bad_value(key, value, "true or false"));
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!detail::parse_number(value, out) || !std::isfinite(out)) {
      throw ConfigError(bad_value(key, value, "a finite number"));
    }
  } else {
    if (!detail::parse_number(value, out)) {
      throw ConfigError(bad_value(key, value, std::is_signed_v<T> ? "an integer" : "a non-negative integer"));
    }
  }
  return out;
}

std::string show(bool v) { return v ? "true" : "false"; }
std::string show(double v) { return format_double(v); }
template <typename T>
  requires std::is_integral_v<T>
std::string show(T v) {
  return std::to_string(v);
}

// Binds a key to a data member reached through `access`.
template <typename Config, typename Access>
Field<Config> bind(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<Config&>()))>;
  return {key, [access](const Config& c) { return show(access(const_cast<Config&>(c))); },
          [access, key](Config& c, std::string_view v) { access(c) = parse_as<T>(key, v); }};
}

template <typename Config>
const Field<Config>* find_field(const std::vector<Field<Config>>& fields, std::string_view key) {
  const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.key == key; });
  return it == fields.end() ? nullptr : &*it;
}

const std::vector<Field<PipelineConfig>>& pipeline_fields() {
  using C = PipelineConfig;
  static const std::vector<Field<C>> fields = {
      bind<C>("window", [](C& c) -> double& { return c.grouping.window; }),
      bind<C>("min-group", [](C& c) -> std::size_t& { return c.grouping.min_group; }),
      bind<C>("max-group", [](C& c) -> std::size_t& { return c.grouping.max_group; }),
      bind<C>("max-bbox-side", [](C& c) -> double& { return c.grouping.max_bbox_side; }),
      bind<C>("k", [](C& c) -> double& { return c.k; }),
      bind<C>("margin", [](C& c) -> double& { return c.margin; }),
      {"metric", [](const C& c) { return std::string(to_string(c.metric)); },
       [](C& c, std::string_view v) { c.metric = parse_metric(v); }},
      bind<C>("max-features", [](C& c) -> std::size_t& { return c.max_features; }),
      bind<C>("fast-threshold", [](C& c) -> int& { return c.fast_threshold; }),
      {"seed", [](const C& c) { return show(c.seed); },
       [](C& c, std::string_view v) {
         c.seed = parse_as<std::uint64_t>("seed", v);
         c.grouping.seed = c.seed;
       }},
      {"input-mode", [](const C& c) { return std::string(to_string(c.input_mode)); },
       [](C& c, std::string_view v) {
         if (v == "images") {
           c.input_mode = InputMode::images;
         } else if (v == "features") {
           c.input_mode = InputMode::features;
         } else {
           throw ConfigError(bad_value("input-mode", v, "images or features"));
         }
       }},
      {"output-dir", [](const C& c) { return c.output_dir; },
       [](C& c, std::string_view v) { c.output_dir = std::string(v); }},
      bind<C>("timing", [](C& c) -> bool& { return c.timing; }),
      bind<C>("track-dump", [](C& c) -> bool& { return c.track_dump; }),
      bind<C>("ransac-threshold", [](C& c) -> double& { return c.ransac_threshold; }),
      bind<C>("ransac-iterations", [](C& c) -> int& { return c.ransac_iterations; }),
      bind<C>("fx", [](C& c) -> double& { return c.intrinsics.fx; }),
      bind<C>("fy", [](C& c) -> double& { return c.intrinsics.fy; }),
      bind<C>("cx", [](C& c) -> double& { return c.intrinsics.cx; }),
      bind<C>("cy", [](C& c) -> double& { return c.intrinsics.cy; }),
  };
  return fields;
}

const std::vector<Field<SceneConfig>>& scene_fields() {
  using C = SceneConfig;
  static const std::vector<Field<C>> fields = {
      bind<C>("width", [](C& c) -> int& { return c.width; }),
      bind<C>("height", [](C& c) -> int& { return c.height; }),
      bind<C>("fx", [](C& c) -> double& { return c.intrinsics.fx; }),
      bind<C>("fy", [](C& c) -> double& { return c.intrinsics.fy; }),
      bind<C>("cx", [](C& c) -> double& { return c.intrinsics.cx; }),
      bind<C>("cy", [](C& c) -> double& { return c.intrinsics.cy; }),
      bind<C>("clusters", [](C& c) -> std::size_t& { return c.clusters; }),
      bind<C>("points-per-cluster", [](C& c) -> std::size_t& { return c.points_per_cluster; }),
      bind<C>("cluster-radius", [](C& c) -> double& { return c.cluster_radius_px; }),
      bind<C>("min-cluster-spacing", [](C& c) -> double& { return c.min_cluster_spacing_px; }),
      bind<C>("scattered-points", [](C& c) -> std::size_t& { return c.scattered_points; }),
      bind<C>("depth-min", [](C& c) -> double& { return c.depth_min; }),
      bind<C>("depth-max", [](C& c) -> double& { return c.depth_max; }),
      bind<C>("cluster-depth-spread", [](C& c) -> double& { return c.cluster_depth_spread; }),
      bind<C>("planar", [](C& c) -> bool& { return c.planar; }),
      {"motion",
       [](const C& c) -> std::string {
         switch (c.motion) {
           case CameraMotion::static_camera:
             return "static";
           case CameraMotion::translate:
             return "translate";
           case CameraMotion::orbit:
             return "orbit";
         }
         return "";
       },
       [](C& c, std::string_view v) {
         if (v == "static") {
           c.motion = CameraMotion::static_camera;
         } else if (v == "translate") {
           c.motion = CameraMotion::translate;
         } else if (v == "orbit") {
           c.motion = CameraMotion::orbit;
         } else {
           throw ConfigError(bad_value("motion", v, "static, translate or orbit"));
         }
       }},
      bind<C>("velocity-x", [](C& c) -> double& { return c.velocity.x(); }),
      bind<C>("velocity-y", [](C& c) -> double& { return c.velocity.y(); }),
      bind<C>("velocity-z", [](C& c) -> double& { return c.velocity.z(); }),
      bind<C>("yaw-rate", [](C& c) -> double& { return c.yaw_rate_deg; }),
      bind<C>("orbit-radius", [](C& c) -> double& { return c.orbit_radius; }),
      bind<C>("frames", [](C& c) -> std::size_t& { return c.frames; }),
      bind<C>("descriptor-bits", [](C& c) -> std::size_t& { return c.descriptor_bits; }),
      bind<C>("bit-flips", [](C& c) -> std::size_t& { return c.bit_flips; }),
      bind<C>("jitter", [](C& c) -> double& { return c.jitter_px; }),
      bind<C>("outlier-rate", [](C& c) -> double& { return c.outlier_rate; }),
      bind<C>("border", [](C& c) -> int& { return c.border; }),
      bind<C>("seed", [](C& c) -> std::uint64_t& { return c.seed; }),
  };
  return fields;
}

template <typename Config>
std::vector<std::string> key_list(const std::vector<Field<Config>>& fields) {
  std::vector<std::string> keys;
  for (const auto& f : fields) keys.push_back(f.key);
  return keys;
}

template <typename Config>
void set_field(const std::vector<Field<Config>>& fields, Config& config, std::string_view key, std::string_view value) {
  const auto* field = find_field(fields, key);
  if (field == nullptr) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  field->set(config, value);
}

template <typename Config>
std::string get_field(const std::vector<Field<Config>>& fields, const Config& config, std::string_view key) {
  const auto* field = find_field(fields, key);
  if (field == nullptr) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  return field->get(config);
}

template <typename Config>
std::string serialize_fields(const std::vector<Field<Config>>& fields, const Config& config) {
  std::string out;
  for (const auto& f : fields) {
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Config>
void parse_lines(std::istream& in, const std::string& source_name, Config& config,
                 const std::vector<Field<Config>>& fields) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    try {
      set_field(fields, config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::ifstream open_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return in;
}

}  // namespace

std::string_view to_string(InputMode mode) { return mode == InputMode::images ? "images" : "features"; }

void PipelineConfig::validate() const {
  if (grouping.seed != seed) {
    throw ConfigError("grouping seed must equal the run seed");
  }
  grouping.validate();
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  if (!(margin > 0.0)) throw ConfigError("margin must be positive");
  if (max_features == 0) throw ConfigError("max-features must be positive");
  if (fast_threshold < 1 || fast_threshold > 255) throw ConfigError("fast-threshold must lie in [1, 255]");
  if (output_dir.empty()) throw ConfigError("output-dir must not be empty");
  if (!(ransac_threshold > 0.0)) throw ConfigError("ransac-threshold must be positive");
  if (ransac_iterations < 1) throw ConfigError("ransac-iterations must be positive");
  try {
    intrinsics.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  set_field(pipeline_fields(), *this, key, value);
}

std::string PipelineConfig::get(std::string_view key) const { return get_field(pipeline_fields(), *this, key); }

const std::vector<std::string>& PipelineConfig::keys() {
  static const auto keys = key_list(pipeline_fields());
  return keys;
}

std::string serialize(const PipelineConfig& config) { return serialize_fields(pipeline_fields(), config); }

PipelineConfig parse_pipeline_config(std::istream& in, const std::string& source_name) {
  PipelineConfig config;
  parse_lines(in, source_name, config, pipeline_fields());
  return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  auto in = open_config(path);
  return parse_pipeline_config(in, path.string());
}

void set_scene_value(SceneConfig& config, std::string_view key, std::string_view value) {
  set_field(scene_fields(), config, key, value);
}

std::string get_scene_value(const SceneConfig& config, std::string_view key) {
  return get_field(scene_fields(), config, key);
}

const std::vector<std::string>& scene_keys() {
  static const auto keys = key_list(scene_fields());
  return keys;
}

std::string serialize(const SceneConfig& config) { return serialize_fields(scene_fields(), config); }

SceneConfig parse_scene_config(std::istream& in, const std::string& source_name) {
  SceneConfig config;
  parse_lines(in, source_name, config, scene_fields());
  return config;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  auto in = open_config(path);
  return parse_scene_config(in, path.string());
}

}  // namespace grouptrack
