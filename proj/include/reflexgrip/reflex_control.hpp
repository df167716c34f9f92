#pragma once

// Autonomous grasp reflexes: over-grasp attenuation of the closing command,
// derivative-triggered fast-slip pulses and window-triggered slow-slip pulses,
// arbitrated with the volitional command once per control tick.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "reflexgrip/tactile_sensors.hpp"

namespace reflexgrip::reflex {

struct ReflexConfig {
  double gain_k = 3.0;          // 1/V
  double p_g = 0.2;             // V
  double q_fs = -20.0;          // V/s, fast-slip derivative threshold
  double p_ss = -0.35;          // V, slow-slip drop threshold
  double slow_window = 0.5;     // s
  double fast_pulse = 0.060;    // s
  double slow_pulse = 0.030;    // s
  double u_max = 5.0;           // V
  double tick = 0.001;          // s
  int derivative_span = 5;      // one-tick differences averaged by the estimator

  void validate() const;  // ConfigError
  [[nodiscard]] int fast_pulse_ticks() const;
  [[nodiscard]] int slow_pulse_ticks() const;
};

enum class CommandSource { volitional, over_grasp, fast_slip, slow_slip };
enum class Pulse { none, fast, slow };

const char* to_string(CommandSource source);

struct MotorCommand {
  double u = 0.0;  // volts, positive closes
  CommandSource source = CommandSource::volitional;
};

struct PressureSample {
  double t = 0.0;
  double p = 0.0;
};

// Fixed-capacity ring of the most recent pressure samples, oldest first.
class PressureHistory {
 public:
  explicit PressureHistory(std::size_t capacity = 1);

  void push(PressureSample s);
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return buf_.size(); }
  [[nodiscard]] bool empty() const { return size_ == 0; }
  [[nodiscard]] const PressureSample& operator[](std::size_t i) const;
  [[nodiscard]] const PressureSample& back() const { return (*this)[size_ - 1]; }
  // Sample whose timestamp is closest to t (earlier one on ties).
  [[nodiscard]] const PressureSample& nearest(double t) const;

 private:
  std::vector<PressureSample> buf_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct ReflexState {
  explicit ReflexState(const ReflexConfig& cfg = {});

  PressureHistory history;
  double derivative_estimate = 0.0;  // V/s
  Pulse active_pulse = Pulse::none;
  int remaining_ticks = 0;
  int fast_slip_count = 0;
  int slow_slip_count = 0;

  [[nodiscard]] double remaining(const ReflexConfig& cfg) const { return remaining_ticks * cfg.tick; }
};

// u_c * exp(-K p) while closing on palmar contact at or above p_g.
double over_grasp_modulate(double u_c, double p, sensors::Side side, const ReflexConfig& cfg);

// Backward difference over up to `span` ticks of history ending at `frame`.
// Throws InsufficientHistory when the history is empty.
double estimate_derivative(const ReflexState& state, const sensors::SensorFrame& frame,
                           int span = 5);

bool detect_fast_slip(double dpdt, const ReflexConfig& cfg);
bool detect_slow_slip(double p_now, double p_window_ago, const ReflexConfig& cfg);

// Advances `state` by one tick and returns the motor command. Throws
// NonMonotoneTime if frame.t does not increase.
MotorCommand advance(ReflexState& state, const sensors::SensorFrame& frame,
                     const sensors::ContactState& contact, double u_volitional,
                     const ReflexConfig& cfg);

std::pair<ReflexState, MotorCommand> reflex_step(ReflexState state, const sensors::SensorFrame& frame,
                                                 const sensors::ContactState& contact,
                                                 double u_volitional, const ReflexConfig& cfg);

}  // namespace reflexgrip::reflex
