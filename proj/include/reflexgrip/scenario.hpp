#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflexgrip/grasp_sim.hpp"
#include "reflexgrip/haptic_encoding.hpp"
#include "reflexgrip/reflex_control.hpp"
#include "reflexgrip/tactile_sensors.hpp"

namespace reflexgrip::harness {

// The four study arms.
enum class Condition { standard, reflex, reflex_vib, reflex_pneu };

const char* to_string(Condition c);
std::optional<Condition> condition_from_string(std::string_view name);

[[nodiscard]] constexpr bool reflexes_enabled(Condition c) { return c != Condition::standard; }

// Volitional command, linear from u_start at `start` to u_end at `end`.
struct CommandSegment {
  double start = 0.0;
  double end = 0.0;
  double u_start = 0.0;
  double u_end = 0.0;
};

struct ScheduledDisturbance {
  sim::DisturbanceEvent event;
  double t_jitter = 0.0;  // seeded uniform offset in [-t_jitter, +t_jitter]
};

struct MetricRules {
  double lift_threshold = 20.0;   // mm
  double lift_hold = 1.0;         // s
  double reach_radius = 80.0;     // mm
  double drop_floor = 5.0;        // mm; releases at or below this are not drops
  double drop_refractory = 0.25;  // s
  double histogram_bin_width = 10.0;  // deg
};

struct Scenario {
  Condition condition = Condition::reflex;
  int trial_count = 20;
  double trial_timeout = 60.0;
  std::uint64_t seed = 0;
  double grasp_angle = 50.0;     // mean, deg
  double grasp_angle_sd = 0.0;   // deg; 0 uses the mean for every trial
  MetricRules rules;

  sensors::SensorMap sensor_map = sensors::default_sensor_map();
  reflex::ReflexConfig reflex;
  sim::PlantConfig plant;
  haptics::VibConfig vib;
  haptics::BellowCalibration bellowband = haptics::BellowCalibration::from_sensor_map(sensors::default_sensor_map());

  std::vector<CommandSegment> commands;
  std::vector<ScheduledDisturbance> disturbances;

  void validate() const;  // ConfigError
  // Last segment covering t wins; zero outside all segments.
  [[nodiscard]] double volitional_command(double t) const;
  [[nodiscard]] long long tick_count() const;
};

// Relative calibration paths resolve against base_dir.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>",
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace reflexgrip::harness
