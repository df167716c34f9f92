#pragma once

// Minimal deterministic plant for a reach-to-pick-and-place trial: a 1-DoF
// hand closing on a rigid cylinder, Coulomb grip capacity, deficit-driven
// slip and a scripted arm trajectory that carries whatever is in the hand.

#include <optional>
#include <vector>

#include "reflexgrip/reflex_control.hpp"
#include "reflexgrip/tactile_sensors.hpp"

namespace reflexgrip::sim {

enum class Phase { reach, grasp, lift, transport, place, done, dropped };
const char* to_string(Phase phase);

struct PlantConfig {
  // hand
  double aperture_max = 80.0;         // mm
  double aperture_initial = 50.0;     // mm
  double motor_gain = 60.0;           // mm/s per volt
  // object
  double object_diameter = 20.0;      // mm
  double object_length = 120.0;       // mm
  double object_mass = 250.0;         // g
  double contact_stiffness = 2.0;     // N/mm
  double friction_mu = 0.6;
  // thumb pressure sensor
  double pressure_gain = 0.15;        // k_p, V/N
  double pressure_sat = 2.5;          // V
  double pressure_noise = 0.0;        // V, standard deviation (applied by the harness)
  // slip
  double slip_mobility = 300.0;       // mm/s of slip per newton of deficit
  double slip_escape = 30.0;          // mm of slip before the object leaves the hand
  double sensor_pad_length = 10.0;    // mm of slip that uncovers the thumb pad
  // task geometry
  double bin_distance = 175.0;        // mm
  double bin_radius = 40.0;           // mm
  double place_tolerance = 10.0;      // mm, max release height that counts as set down
  double optimal_angle_min = 40.0;    // deg
  double optimal_angle_max = 60.0;    // deg
  double angle_falloff = 20.0;        // deg
  // arm script (s / mm)
  double reach_end = 1.0;
  double lift_start = 2.0;
  double lift_duration = 0.5;
  double lift_height = 100.0;
  double transport_start = 2.5;
  double transport_duration = 1.5;
  double place_start = 4.0;
  double place_duration = 0.5;

  void validate() const;  // ConfigError
  [[nodiscard]] double weight() const;           // N
  [[nodiscard]] double max_hand_speed() const;   // mm/s along any scripted axis
};

enum class DisturbanceKind { load_spike, mu_drop, contact_perturb };
const char* to_string(DisturbanceKind kind);

// load_spike: extra load in multiples of the object weight.
// mu_drop: fractional friction loss (0.8 leaves 20 %).
// contact_perturb: mm of penetration removed (object shifted in the grasp).
struct DisturbanceEvent {
  double t = 0.0;
  DisturbanceKind kind = DisturbanceKind::load_spike;
  double magnitude = 0.0;
  double duration = 0.0;

  [[nodiscard]] bool active_at(double time) const { return time >= t && time < t + duration; }
};

struct Disturbance {
  std::vector<DisturbanceEvent> events;
};

// Effects currently acting on the plant. Loads add, friction scales multiply.
struct DisturbanceEffects {
  double extra_load = 0.0;        // N
  double mu_scale = 1.0;
  double penetration_loss = 0.0;  // mm
};

struct Contact {
  double location_mm = 0.0;
  double normal_force = 0.0;  // N
};

struct ObjectState {
  double height = 0.0;               // mm above the table
  double displacement_to_bin = 175.0;  // mm
  bool in_hand = false;
};

struct PlantState {
  double t = 0.0;
  double aperture = 50.0;
  std::optional<Contact> contact;
  double grasp_angle = 50.0;  // deg
  ObjectState object;
  Phase phase = Phase::reach;
  double slip_velocity = 0.0;   // mm/s
  double slip_distance = 0.0;   // mm
  double fall_velocity = 0.0;   // mm/s
  bool grasp_missed = false;    // the arm left without the object
  DisturbanceEffects effects;
};

PlantState initial_state(const PlantConfig& cfg, double grasp_angle);

// 1.0 inside the optimal band, Gaussian falloff outside with a 0.1 floor.
double angle_efficiency(double grasp_angle, const PlantConfig& cfg);

// Where on the contact-location sensor the cylinder touches for a grasp angle.
double contact_location(double grasp_angle);

// Tangential load the grip can hold.
double grip_capacity(const PlantState& state, const PlantConfig& cfg);
double current_load(const PlantState& state, const PlantConfig& cfg);

double hand_height(double t, const PlantConfig& cfg);
double hand_displacement(double t, const PlantConfig& cfg);

// Composes one event's effect onto state.effects if it is active at state.t.
PlantState inject_disturbance(PlantState state, const DisturbanceEvent& event, const PlantConfig& cfg);

// Advances by dt. Throws InvalidTick for non-positive or non-finite dt.
PlantState plant_step(PlantState state, const reflex::MotorCommand& cmd, const Disturbance& dist,
                      const PlantConfig& cfg, double dt);

// Noise-free sensor readout of the plant.
sensors::SensorFrame emit_sensor_frame(const PlantState& state, const sensors::SensorMap& map,
                                       const PlantConfig& cfg);

}  // namespace reflexgrip::sim
