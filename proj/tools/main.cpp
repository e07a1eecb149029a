#include "commands.hpp"
#include "config.hpp"

#include "hexcone/parallel.hpp"
#include "hexcone/types.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>

namespace {

using namespace hexcone;
using namespace hexcone::cli;

using Command = std::function<int(const RunConfig&, const Flags&)>;

int run(const Command& cmd, const std::string& config_path, const std::string& out, int threads, const Flags& flags) {
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out.empty()) cfg.out = out;
    validate(cfg);
    if (threads > 0) set_max_threads(threads);
    std::filesystem::create_directories(cfg.out);
    nlohmann::json echo = cfg;
    std::ofstream(std::filesystem::path(cfg.out) / "effective_config.json") << echo.dump(2) << '\n';
    return cmd(cfg, flags);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kModelInvalid;
  } catch (const ModelError& e) {
    fmt::print(stderr, "model error: {}\n", e.what());
    return kModelInvalid;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "model error: {}\n", e.what());
    return kModelInvalid;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric failure: {}\n", e.what());
    return kNumericFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "numeric failure: {}\n", e.what());
    return kNumericFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-Dirac interface modes on the hexagonal lattice"};
  app.require_subcommand(1);
  app.footer("Defaults (JSON config, unknown keys rejected):\n" + nlohmann::json(RunConfig{}).dump(2));

  std::string config_path;
  std::string out;
  int threads = 0;
  Flags flags;

  const std::map<std::string, std::pair<Command, std::string>> commands{
      {"bands", {cmd_bands, "Band structure along Gamma-M-K-Gamma and the common gap report"}},
      {"symmetry-report", {cmd_symmetry_report, "Commutator norms, representation checks and cone data"}},
      {"green-check", {cmd_green_check, "Principal-value Green operator, far field and energy flux"}},
      {"interface", {cmd_interface, "Interface modes from the boundary-matching search"}},
      {"robustness", {cmd_robustness, "Defect perturbations on periodic strips of growing width"}},
      {"band-curve", {cmd_band_curve, "In-gap interface levels as a function of the longitudinal momentum"}},
  };
  Command chosen;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides the config)");
    sub->add_option("--threads", threads, "Worker cap for parallel loops")->check(CLI::NonNegativeNumber);
    sub->add_flag("--oracle", flags.oracle, "Compare with direct diagonalization of a truncated strip");
    sub->add_flag("--no-inversion", flags.no_inversion, "Control run with the same bulk on both sides");
    sub->add_flag("--override-bound", flags.override_bound, "Run robustness even when the defect is too large");
    const Command& cmd = entry.first;
    sub->callback([&chosen, &cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kModelInvalid;
  }
  return run(chosen, config_path, out, threads, flags);
}
