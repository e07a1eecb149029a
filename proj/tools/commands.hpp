#pragma once

#include "config.hpp"

namespace hexcone::cli {

// Exit codes shared by every subcommand.
enum Exit : int {
  kOk = 0,
  kModelInvalid = 2,
  kNumericFailure = 3,
  kModeCount = 4,
  kBoundViolated = 5,
};

struct Flags {
  bool oracle = false;
  bool no_inversion = false;
  bool override_bound = false;
};

int cmd_bands(const RunConfig& cfg, const Flags& f);
int cmd_symmetry_report(const RunConfig& cfg, const Flags& f);
int cmd_green_check(const RunConfig& cfg, const Flags& f);
int cmd_interface(const RunConfig& cfg, const Flags& f);
int cmd_robustness(const RunConfig& cfg, const Flags& f);
int cmd_band_curve(const RunConfig& cfg, const Flags& f);

}  // namespace hexcone::cli
