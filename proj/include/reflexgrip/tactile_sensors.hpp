#pragma once

// Contact-location and thumb-pressure sensor models.
//
// The contact-location sensor wraps the finger from the proximal dorsal end
// (0 mm) over the fingertip to the proximal palmar end (140 mm) and reports a
// single voltage. Its response is pure calibration data: two probe tables
// (point, cylinder) interpolated piecewise-linearly.

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace reflexgrip::sensors {

inline constexpr double kSensorLengthMm = 140.0;
inline constexpr double kDefaultGraspThreshold = 0.2;  // p_g, volts

enum class Probe { point, cylinder };
enum class Side { none, dorsal, palmar };

const char* to_string(Side side);
const char* to_string(Probe probe);

struct CalibrationPoint {
  double location_mm = 0.0;
  double voltage = 0.0;
};

struct SensorMap {
  std::vector<CalibrationPoint> point;
  std::vector<CalibrationPoint> cylinder;
  double baseline_voltage = 0.4;
  double fingertip_voltage = 1.65;
  double activation_force_cyl = 1.5;
  double activation_force_flat = 2.2;
  double contact_deadband = 0.02;

  [[nodiscard]] const std::vector<CalibrationPoint>& samples(Probe probe) const;
  // The point probe has no measured threshold of its own; it uses the flat one.
  [[nodiscard]] double activation_force(Probe probe) const;
  // Extremes over both probe tables.
  [[nodiscard]] double min_voltage() const;
  [[nodiscard]] double max_voltage() const;
};

// Throws NonMonotoneLocationError, MissingProbeError or ConfigError.
void validate(const SensorMap& map);

SensorMap parse_sensor_map(std::string_view text, std::string_view origin = "<calibration>");
SensorMap load_sensor_map(const std::filesystem::path& path);

// Built-in calibration: approximate probe tables.
std::string_view default_calibration_text();
const SensorMap& default_sensor_map();

// Piecewise-linear lookup; baseline below the probe's activation force.
// Throws OutOfRangeLocation outside [0, 140] mm.
double contact_to_voltage(const SensorMap& map, double location_mm, double force_n, Probe probe);

// Piezoresistive thumb sensor: linear up to saturation.
double pressure_from_force(double force_n, double k_p, double p_sat);

struct SensorFrame {
  double t = 0.0;
  double p = 0.0;    // thumb pressure, volts
  double v_x = 0.0;  // contact-location voltage
  bool contact_active = false;
};

SensorFrame make_frame(const SensorMap& map, double t, double p, double v_x);

struct ContactState {
  Side side = Side::none;
  std::optional<double> x;  // 0 = proximal end of the side, 1 = fingertip
  bool grasped = false;     // p > p_g
  double voltage = 0.0;     // V_x the state was derived from
  bool clamped = false;     // x fell outside [0, 1] before clamping
};

// Ties at exactly fingertip_voltage resolve to palmar.
ContactState classify_contact(const SensorMap& map, const SensorFrame& frame,
                              double p_g = kDefaultGraspThreshold);

}  // namespace reflexgrip::sensors
