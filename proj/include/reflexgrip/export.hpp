#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reflexgrip/haptic_encoding.hpp"
#include "reflexgrip/metrics.hpp"
#include "reflexgrip/scenario.hpp"
#include "reflexgrip/tactile_sensors.hpp"
#include "reflexgrip/trial.hpp"

namespace reflexgrip::harness {

inline constexpr const char* kTraceHeader = "t,u_c,a,p,V_x,I,P1,P2,P3,P4,P5,P6,P7,P8,H,D,phase";

std::string trace_csv(const TrialRecord& record);
std::string trace_file_name(const TrialRecord& record);

// Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& contents);
void ensure_directory(const std::filesystem::path& dir);

struct RunOptions {
  std::vector<Condition> conditions;  // empty: the scenario's own condition
  int parallel = 1;
};

// Runs every trial, writes one trace CSV per trial plus report.json into
// out_dir and returns the report. Files are written by the calling thread in
// (condition, trial) order.
MetricsReport run_simulation(const Scenario& scenario, const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

// Reads t, p and V_x (by header name) from a sensor or trial trace CSV.
std::vector<sensors::SensorFrame> read_sensor_trace(const std::filesystem::path& path,
                                                    const sensors::SensorMap& map);

// Offline re-encoding of recorded frames: "t,I" at the synth rate, or
// "t,P1..P8" at the Bellowband frame rate.
std::string encode_vib_csv(const std::vector<sensors::SensorFrame>& frames, const sensors::SensorMap& map,
                           const haptics::VibConfig& cfg, double p_g);
std::string encode_pneu_csv(const std::vector<sensors::SensorFrame>& frames, const sensors::SensorMap& map,
                            const haptics::BellowCalibration& cal, double p_g);

// Voltage-vs-location sweep of both probes plus the resulting classification.
std::string characterize_csv(const sensors::SensorMap& map, double step_mm, double force_n);

}  // namespace reflexgrip::harness
