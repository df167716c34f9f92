#pragma once

// Feedback encoders.
//
// Vibrotactile: a voice-coil tactor current. Dorsal contact is a steady
// carrier at f_hi whose amplitude falls with normalized location; palmar
// contact is the same amplitude pulsed by |sin(2*pi*4.75 Hz*t)|. Once the
// thumb pressure signals a grasp, the palmar carrier sweeps linearly from
// f_hi to f_lo over ramp_duration.
//
// Pneumatic: eight bellows, each owning a voltage band [nu_i, nu_i+1) of the
// contact-location sensor. The owning bellow and at most one neighbour share
// the actuation.

#include <array>
#include <optional>
#include <vector>

#include "reflexgrip/tactile_sensors.hpp"

namespace reflexgrip::haptics {

inline constexpr int kBellowCount = 8;

struct VibConfig {
  double amplitude = 0.5;        // A0, amperes
  double f_hi = 250.0;           // Hz
  double f_lo = 150.0;           // Hz
  double ramp_duration = 2.0;    // s
  double envelope_rate = 4.75;   // Hz
  double synth_rate = 8000.0;    // Hz

  void validate() const;
};

// A0 * sqrt(1 - x). Throws OutOfRange for x outside [0, 1].
double vib_amplitude(double x, const VibConfig& cfg = {});

// f_hi without a grasp, else the clamped linear sweep toward f_lo.
double grasp_frequency(std::optional<double> t_since_grasp, const VibConfig& cfg = {});

// Tracks grasp onset and keeps the carrier phase continuous across frequency
// changes. Phase is kept in cycles, anchored at the last onset or release.
struct GraspRampState {
  std::optional<double> grasp_onset;
  double f_current = 250.0;
  double anchor_time = 0.0;
  double anchor_cycles = 0.0;
};

// Integral of the carrier frequency from 0 to t, in cycles.
double carrier_cycles(const GraspRampState& ramp, double t, const VibConfig& cfg = {});

// Grasp loss resets the sweep to f_hi.
void update_grasp_ramp(GraspRampState& ramp, double t, bool grasped, const VibConfig& cfg = {});

double palmar_envelope(double t, const VibConfig& cfg = {});

double vib_sample(double t, const sensors::ContactState& contact, const GraspRampState& ramp,
                  const VibConfig& cfg = {});

struct VibSample {
  double t = 0.0;
  double current = 0.0;
};

// Control-rate parameter updates, closed-form evaluation at any time between
// them (zero-order hold on contact and grasp state).
class VibEncoder {
 public:
  explicit VibEncoder(VibConfig cfg = {});

  void update(double t, const sensors::ContactState& contact);
  [[nodiscard]] double sample(double t) const;
  // Samples on the synth_rate grid in [t_begin, t_end).
  [[nodiscard]] std::vector<VibSample> render(double t_begin, double t_end) const;

  [[nodiscard]] const GraspRampState& ramp() const { return ramp_; }
  [[nodiscard]] const VibConfig& config() const { return cfg_; }

 private:
  VibConfig cfg_;
  GraspRampState ramp_;
  sensors::ContactState contact_;
};

struct BellowCalibration {
  std::array<double, kBellowCount + 1> nu{};  // region boundaries, strictly increasing
  std::array<double, kBellowCount> tau{};     // nu_i < tau_i < nu_i+1
  double p_min = 0.1;
  double p_max_contact = 0.8;
  double p_max_grasp = 1.5;
  double frame_rate = 250.0;
  double envelope_offset = 0.75;
  double envelope_amplitude = 0.25;
  double envelope_rate = 3.0;
  bool literal_eq3 = false;  // reproduce the printed, discontinuous gain law

  void validate() const;
  // Bellows 1-4 split the palmar voltage range evenly, 5-8 the dorsal one;
  // each threshold sits at its region's midpoint.
  static BellowCalibration from_sensor_map(const sensors::SensorMap& map);
};

double pressure_envelope(double t, const BellowCalibration& cal);

struct BellowRegion {
  int index = 1;                // owning bellow, 1-based
  double gamma = 1.0;
  std::optional<int> neighbor;  // 1-based
  double gamma_neighbor = 0.0;
};

// Throws VoltageOutOfRange outside [nu_1, nu_9].
BellowRegion bellow_region(double v_x, const BellowCalibration& cal);
// Gains with the owning region forced to `index`; v_x must lie in its closed band.
BellowRegion bellow_gains_in_region(int index, double v_x, const BellowCalibration& cal);

struct BellowFrame {
  double t = 0.0;
  std::array<double, kBellowCount> pressures{};
};

// Bellows without actuation sit at p_min; active ones follow
// E_p(t) * [(p_max - p_min) * gamma + p_min], floored at p_min.
BellowFrame bellow_frame(double t, const sensors::ContactState& contact, const BellowCalibration& cal);

// Recomputes a frame at frame_rate and holds it in between.
class BellowEncoder {
 public:
  explicit BellowEncoder(BellowCalibration cal);

  const BellowFrame& update(double t, const sensors::ContactState& contact);
  [[nodiscard]] const BellowFrame& current() const { return frame_; }

 private:
  BellowCalibration cal_;
  BellowFrame frame_;
  long long next_frame_ = 0;
};

}  // namespace reflexgrip::haptics
