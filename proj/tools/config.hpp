#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace hexcone::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
  int order = 16;
  int levels = 14;
  int panels = 0;  // 0: 16 + max offset
};

struct TruncationConfig {
  int oracle_blocks = 200;  // Dirichlet oracle, blocks per side
  int strip_blocks = 8;     // exact-lead window half-width for periodic strips
  int profile_blocks = 40;  // window half-width for mode profiles
  int mode_window = 120;    // initial layer-potential window
};

struct PerturbationConfig {
  std::string kind = "compact";
  double amplitude = 1e-5;
  double c_W = 0.25;
  int half_width = 6;  // line defect truncation
  double delta = 0.025;
  std::vector<int> widths{8, 16, 32};
  double exclusion_radius = 3.0;
};

struct RunConfig {
  std::string model = "blended";
  double blend = 0.2;
  double delta = 0.05;
  double c_star = 0.9;
  int search_grid = 201;
  int path_points = 240;
  int curve_points = 65;
  QuadratureConfig quadrature;
  TruncationConfig truncation;
  PerturbationConfig perturbation;
  std::string out = "hexcone-out";
};

void to_json(nlohmann::json& j, const QuadratureConfig& c);
void to_json(nlohmann::json& j, const TruncationConfig& c);
void to_json(nlohmann::json& j, const PerturbationConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);

// Missing keys keep their defaults; unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& c);

}  // namespace hexcone::cli
