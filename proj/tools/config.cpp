#include "config.hpp"

#include <fmt/core.h>

#include <fstream>
#include <set>

namespace hexcone::cli {

using nlohmann::json;

void to_json(json& j, const QuadratureConfig& c) {
  j = json{{"order", c.order}, {"levels", c.levels}, {"panels", c.panels}};
}

void to_json(json& j, const TruncationConfig& c) {
  j = json{{"oracle_blocks", c.oracle_blocks},
           {"strip_blocks", c.strip_blocks},
           {"profile_blocks", c.profile_blocks},
           {"mode_window", c.mode_window}};
}

void to_json(json& j, const PerturbationConfig& c) {
  j = json{{"kind", c.kind},
           {"amplitude", c.amplitude},
           {"c_W", c.c_W},
           {"half_width", c.half_width},
           {"delta", c.delta},
           {"widths", c.widths},
           {"exclusion_radius", c.exclusion_radius}};
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"model", c.model},
           {"blend", c.blend},
           {"delta", c.delta},
           {"c_star", c.c_star},
           {"search_grid", c.search_grid},
           {"path_points", c.path_points},
           {"curve_points", c.curve_points},
           {"quadrature", c.quadrature},
           {"truncation", c.truncation},
           {"perturbation", c.perturbation},
           {"out", c.out}};
}

namespace {

void reject_unknown(const json& given, const json& known, const std::string& where) {
  if (!given.is_object()) throw ConfigError(fmt::format("{} must be an object", where.empty() ? "config" : where));
  for (const auto& [key, value] : given.items()) {
    if (!known.contains(key)) throw ConfigError(fmt::format("unknown key '{}{}'", where, key));
    if (known[key].is_object()) reject_unknown(value, known[key], where + key + ".");
  }
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad value for '{}': {}", key, e.what()));
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  reject_unknown(j, json(c), "");
  take(j, "model", c.model);
  take(j, "blend", c.blend);
  take(j, "delta", c.delta);
  take(j, "c_star", c.c_star);
  take(j, "search_grid", c.search_grid);
  take(j, "path_points", c.path_points);
  take(j, "curve_points", c.curve_points);
  take(j, "out", c.out);
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    take(q, "order", c.quadrature.order);
    take(q, "levels", c.quadrature.levels);
    take(q, "panels", c.quadrature.panels);
  }
  if (j.contains("truncation")) {
    const json& t = j["truncation"];
    take(t, "oracle_blocks", c.truncation.oracle_blocks);
    take(t, "strip_blocks", c.truncation.strip_blocks);
    take(t, "profile_blocks", c.truncation.profile_blocks);
    take(t, "mode_window", c.truncation.mode_window);
  }
  if (j.contains("perturbation")) {
    const json& p = j["perturbation"];
    take(p, "kind", c.perturbation.kind);
    take(p, "amplitude", c.perturbation.amplitude);
    take(p, "c_W", c.perturbation.c_W);
    take(p, "half_width", c.perturbation.half_width);
    take(p, "delta", c.perturbation.delta);
    take(p, "widths", c.perturbation.widths);
    take(p, "exclusion_radius", c.perturbation.exclusion_radius);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed config {}: {}", path, e.what()));
  }
  return parse_config(j);
}

void validate(const RunConfig& c) {
  static const std::set<std::string> models{"toy", "extended", "blended"};
  if (!models.count(c.model)) throw ConfigError("model must be toy, extended or blended");
  if (!(c.blend >= 0.0 && c.blend <= 1.0)) throw ConfigError("blend must lie in [0, 1]");
  if (!(c.delta >= 0.0)) throw ConfigError("delta must be non-negative");
  if (!(c.c_star > 0.0 && c.c_star < 1.0)) throw ConfigError("c_star must lie in (0, 1)");
  if (c.search_grid < 3) throw ConfigError("search_grid must be at least 3");
  if (c.path_points < 3) throw ConfigError("path_points must be at least 3");
  if (c.curve_points < 2) throw ConfigError("curve_points must be at least 2");
  static const std::set<int> orders{8, 12, 16, 20, 24, 32};
  if (!orders.count(c.quadrature.order)) throw ConfigError("quadrature.order must be one of 8, 12, 16, 20, 24, 32");
  if (c.quadrature.levels < 0 || c.quadrature.panels < 0) throw ConfigError("quadrature levels/panels must be >= 0");
  const auto& t = c.truncation;
  if (t.oracle_blocks < 4 || t.strip_blocks < 2 || t.profile_blocks < 2 || t.mode_window < 8)
    throw ConfigError("truncation sizes are too small");
  const auto& p = c.perturbation;
  if (p.kind != "compact" && p.kind != "line") throw ConfigError("perturbation.kind must be compact or line");
  if (!(p.amplitude >= 0.0)) throw ConfigError("perturbation.amplitude must be non-negative");
  if (!(p.c_W > 0.0 && p.c_W < 0.5)) throw ConfigError("perturbation.c_W must lie in (0, 1/2)");
  if (p.half_width < 1) throw ConfigError("perturbation.half_width must be positive");
  if (!(p.delta > 0.0)) throw ConfigError("perturbation.delta must be positive");
  if (p.widths.empty()) throw ConfigError("perturbation.widths must not be empty");
  for (int L : p.widths)
    if (L < 4) throw ConfigError("perturbation.widths entries must be at least 4");
  if (!(p.exclusion_radius >= 0.0)) throw ConfigError("perturbation.exclusion_radius must be non-negative");
}

}  // namespace hexcone::cli
