// reflexgrip: scenario runner, offline feedback encoder and sensor sweep.
//
// Exit codes: 0 ok, 1 configuration/input error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/export.hpp"
#include "reflexgrip/scenario.hpp"
#include "reflexgrip/tactile_sensors.hpp"

namespace fs = std::filesystem;
using namespace reflexgrip;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

int simulate(const fs::path& scenario_path, const fs::path& out_dir, std::optional<std::uint64_t> seed,
             int parallel, const std::vector<std::string>& condition_names) {
  auto scenario = harness::load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  harness::RunOptions options;
  options.parallel = parallel;
  for (const auto& name : condition_names) {
    auto c = harness::condition_from_string(name);
    if (!c) throw ConfigError("unknown condition '" + name + "'");
    options.conditions.push_back(*c);
  }
  const auto report = harness::run_simulation(scenario, out_dir, options);
  for (const auto& c : report.conditions) {
    std::cout << harness::to_string(c.condition) << ": " << c.trials << " trials, lift " << c.lift_rate
              << ", reach " << c.reach_rate << ", place " << c.place_rate << ", drops/trial "
              << c.drops_per_trial << "\n";
  }
  return 0;
}

int encode(const fs::path& input, const std::string& mode, const fs::path& out,
           const std::optional<fs::path>& calibration, const std::optional<fs::path>& scenario_path) {
  harness::Scenario scenario;
  if (scenario_path) scenario = harness::load_scenario(*scenario_path);
  if (calibration) {
    scenario.sensor_map = sensors::load_sensor_map(*calibration);
    if (!scenario_path) scenario.bellowband = haptics::BellowCalibration::from_sensor_map(scenario.sensor_map);
  }
  const auto frames = harness::read_sensor_trace(input, scenario.sensor_map);
  std::string csv;
  if (mode == "vib") {
    csv = harness::encode_vib_csv(frames, scenario.sensor_map, scenario.vib, scenario.reflex.p_g);
  } else {
    csv = harness::encode_pneu_csv(frames, scenario.sensor_map, scenario.bellowband, scenario.reflex.p_g);
  }
  if (out.has_parent_path()) harness::ensure_directory(out.parent_path());
  harness::write_file(out, csv);
  return 0;
}

int characterize(const std::optional<fs::path>& calibration, const fs::path& out, double step, double force) {
  const auto map = calibration ? sensors::load_sensor_map(*calibration) : sensors::default_sensor_map();
  if (out.has_parent_path()) harness::ensure_directory(out.parent_path());
  harness::write_file(out, harness::characterize_csv(map, step, force));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflex grasp control and haptic feedback simulator"};
  app.require_subcommand(1);

  fs::path scenario_path, out_dir;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  std::vector<std::string> conditions;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and export traces and metrics");
  sim_cmd->add_option("--scenario", scenario_path, "Scenario file")->required();
  sim_cmd->add_option("--out", out_dir, "Output directory")->required();
  sim_cmd->add_option("--seed", seed, "Override the scenario seed");
  sim_cmd->add_option("--parallel", parallel, "Trials run concurrently")->check(CLI::Range(1, 256));
  sim_cmd->add_option("--condition", conditions, "Run these conditions instead (repeatable)");

  fs::path input, encode_out;
  std::string mode;
  std::optional<fs::path> encode_cal, encode_scenario;
  auto* enc_cmd = app.add_subcommand("encode", "Re-encode a recorded sensor trace into feedback commands");
  enc_cmd->add_option("--input", input, "CSV with t, p and V_x columns")->required();
  enc_cmd->add_option("--mode", mode, "vib or pneu")->required()->check(CLI::IsMember({"vib", "pneu"}));
  enc_cmd->add_option("--out", encode_out, "Output CSV")->required();
  enc_cmd->add_option("--calibration", encode_cal, "Sensor calibration file");
  enc_cmd->add_option("--scenario", encode_scenario, "Scenario supplying [vib]/[bellowband] settings");

  std::optional<fs::path> char_cal;
  fs::path char_out;
  double step = 1.0;
  double force = 5.0;
  auto* char_cmd = app.add_subcommand("characterize", "Sweep the contact-location sensor model");
  char_cmd->add_option("--calibration", char_cal, "Sensor calibration file (default: built-in)");
  char_cmd->add_option("--out", char_out, "Output CSV")->required();
  char_cmd->add_option("--step", step, "Sweep step in mm");
  char_cmd->add_option("--force", force, "Probe force in N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim_cmd) return simulate(scenario_path, out_dir, seed, parallel, conditions);
    if (*enc_cmd) return encode(input, mode, encode_out, encode_cal, encode_scenario);
    if (*char_cmd) return characterize(char_cal, char_out, step, force);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
