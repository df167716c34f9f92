#include "reflexgrip/grasp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reflexgrip/errors.hpp"

namespace reflexgrip::sim {
namespace {

constexpr double kGravity = 9810.0;  // mm/s^2
constexpr double kRamp = 0.25;       // accel/decel fraction of each scripted move

// Trapezoidal-velocity progress in [0, 1] for normalized time u.
double trapezoid(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double v_peak = 1.0 / (1.0 - kRamp);
  if (u < kRamp) return 0.5 * v_peak * u * u / kRamp;
  if (u <= 1.0 - kRamp) return v_peak * (u - 0.5 * kRamp);
  const double rest = 1.0 - u;
  return 1.0 - 0.5 * v_peak * rest * rest / kRamp;
}

void release(PlantState& s, const PlantConfig& cfg) {
  s.object.in_hand = false;
  s.contact.reset();
  const bool set_down = s.phase == Phase::place && s.object.height <= cfg.place_tolerance &&
                        s.object.displacement_to_bin <= cfg.bin_radius;
  if (set_down) {
    s.phase = Phase::done;
    s.fall_velocity = 0.0;
  } else {
    s.phase = Phase::dropped;
    s.fall_velocity = s.slip_velocity;
  }
  s.slip_velocity = 0.0;
}

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::reach: return "reach";
    case Phase::grasp: return "grasp";
    case Phase::lift: return "lift";
    case Phase::transport: return "transport";
    case Phase::place: return "place";
    case Phase::done: return "done";
    default: return "dropped";
  }
}

const char* to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::mu_drop: return "mu_drop";
    case DisturbanceKind::contact_perturb: return "contact_perturb";
    default: return "load_spike";
  }
}

void PlantConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("[plant] ") + what);
  };
  require(aperture_max > 0.0, "aperture_max must be > 0");
  require(aperture_initial >= 0.0 && aperture_initial <= aperture_max, "aperture_initial outside [0, aperture_max]");
  require(motor_gain > 0.0, "motor_gain must be > 0");
  require(object_diameter > 0.0 && object_diameter < aperture_max, "object_diameter must be in (0, aperture_max)");
  require(object_length > 0.0, "object_length must be > 0");
  require(object_mass > 0.0, "object_mass must be > 0");
  require(contact_stiffness > 0.0, "contact_stiffness must be > 0");
  require(friction_mu > 0.0, "friction_mu must be > 0");
  require(pressure_gain > 0.0 && pressure_sat > 0.0, "pressure gain and saturation must be > 0");
  require(pressure_noise >= 0.0, "pressure_noise must be >= 0");
  require(slip_mobility > 0.0 && slip_escape > 0.0 && sensor_pad_length > 0.0, "slip parameters must be > 0");
  require(bin_distance > 0.0 && bin_radius > 0.0 && place_tolerance >= 0.0, "bin geometry must be positive");
  require(0.0 <= optimal_angle_min && optimal_angle_min <= optimal_angle_max && optimal_angle_max <= 90.0,
          "optimal angle range must lie inside [0, 90]");
  require(angle_falloff > 0.0, "angle_falloff must be > 0");
  require(reach_end >= 0.0 && reach_end <= lift_start, "reach_end must precede lift_start");
  require(lift_duration > 0.0 && transport_duration > 0.0 && place_duration > 0.0, "move durations must be > 0");
  require(lift_height > 0.0, "lift_height must be > 0");
  require(lift_start + lift_duration <= transport_start, "transport must start after the lift ends");
  require(transport_start + transport_duration <= place_start, "place must start after transport ends");
}

double PlantConfig::weight() const { return object_mass * 1e-3 * kGravity * 1e-3; }

double PlantConfig::max_hand_speed() const {
  const double v_peak = 1.0 / (1.0 - kRamp);
  return v_peak * std::max({lift_height / lift_duration, bin_distance / transport_duration,
                            lift_height / place_duration});
}

PlantState initial_state(const PlantConfig& cfg, double grasp_angle) {
  PlantState s;
  s.aperture = cfg.aperture_initial;
  s.grasp_angle = grasp_angle;
  s.object.displacement_to_bin = cfg.bin_distance;
  return s;
}

double angle_efficiency(double grasp_angle, const PlantConfig& cfg) {
  double outside = 0.0;
  if (grasp_angle < cfg.optimal_angle_min) outside = cfg.optimal_angle_min - grasp_angle;
  if (grasp_angle > cfg.optimal_angle_max) outside = grasp_angle - cfg.optimal_angle_max;
  const double z = outside / cfg.angle_falloff;
  return 0.1 + 0.9 * std::exp(-z * z);
}

double contact_location(double grasp_angle) {
  // 0 deg touches the fingertip (70 mm), 90 deg the palmar base.
  const double tip = 0.5 * sensors::kSensorLengthMm;
  return std::clamp(tip + tip * grasp_angle / 90.0, 0.0, sensors::kSensorLengthMm);
}

double grip_capacity(const PlantState& state, const PlantConfig& cfg) {
  if (!state.contact) return 0.0;
  return 2.0 * cfg.friction_mu * state.effects.mu_scale * state.contact->normal_force *
         angle_efficiency(state.grasp_angle, cfg);
}

double current_load(const PlantState& state, const PlantConfig& cfg) {
  return cfg.weight() + state.effects.extra_load;
}

double hand_height(double t, const PlantConfig& cfg) {
  if (t < cfg.lift_start) return 0.0;
  if (t < cfg.place_start) return cfg.lift_height * trapezoid((t - cfg.lift_start) / cfg.lift_duration);
  return cfg.lift_height * (1.0 - trapezoid((t - cfg.place_start) / cfg.place_duration));
}

double hand_displacement(double t, const PlantConfig& cfg) {
  return cfg.bin_distance * (1.0 - trapezoid((t - cfg.transport_start) / cfg.transport_duration));
}

PlantState inject_disturbance(PlantState state, const DisturbanceEvent& event, const PlantConfig& cfg) {
  if (!event.active_at(state.t)) return state;
  switch (event.kind) {
    case DisturbanceKind::load_spike:
      state.effects.extra_load += event.magnitude * cfg.weight();
      break;
    case DisturbanceKind::mu_drop:
      state.effects.mu_scale *= std::max(0.0, 1.0 - event.magnitude);
      break;
    case DisturbanceKind::contact_perturb:
      state.effects.penetration_loss += event.magnitude;
      break;
  }
  return state;
}

PlantState plant_step(PlantState s, const reflex::MotorCommand& cmd, const Disturbance& dist,
                      const PlantConfig& cfg, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    std::ostringstream os;
    os << "invalid plant tick dt=" << dt;
    throw InvalidTick(os.str());
  }

  s.effects = {};
  for (const auto& e : dist.events) s = inject_disturbance(std::move(s), e, cfg);

  const double t_next = s.t + dt;
  s.aperture = std::clamp(s.aperture - cfg.motor_gain * cmd.u * dt, 0.0, cfg.aperture_max);

  if (s.phase == Phase::reach && t_next >= cfg.reach_end) s.phase = Phase::grasp;

  const bool aligned = (s.phase == Phase::grasp && !s.grasp_missed) || s.object.in_hand;
  s.contact.reset();
  if (aligned) {
    const double penetration = cfg.object_diameter - s.aperture - s.effects.penetration_loss;
    if (penetration > 0.0) {
      s.contact = Contact{contact_location(s.grasp_angle), cfg.contact_stiffness * penetration};
    }
  }

  if (s.phase == Phase::grasp && !s.grasp_missed && t_next >= cfg.lift_start) {
    if (s.contact && grip_capacity(s, cfg) >= current_load(s, cfg)) {
      s.object.in_hand = true;
      s.phase = Phase::lift;
    } else {
      s.grasp_missed = true;
      s.contact.reset();
    }
  }

  if (s.object.in_hand) {
    if (t_next >= cfg.place_start) {
      s.phase = Phase::place;
    } else if (t_next >= cfg.transport_start) {
      s.phase = Phase::transport;
    }
    if (!s.contact) {
      release(s, cfg);
    } else {
      const double deficit = current_load(s, cfg) - grip_capacity(s, cfg);
      s.slip_velocity = deficit > 0.0 ? cfg.slip_mobility * deficit : 0.0;
      s.slip_distance += s.slip_velocity * dt;
      s.object.height = std::max(0.0, hand_height(t_next, cfg) - s.slip_distance);
      s.object.displacement_to_bin = hand_displacement(t_next, cfg);
      if (s.slip_distance >= cfg.slip_escape) release(s, cfg);
    }
  } else if (s.phase == Phase::dropped) {
    s.fall_velocity += kGravity * dt;
    s.object.height = std::max(0.0, s.object.height - s.fall_velocity * dt);
    if (s.object.height == 0.0) s.fall_velocity = 0.0;
  }

  s.t = t_next;
  return s;
}

sensors::SensorFrame emit_sensor_frame(const PlantState& state, const sensors::SensorMap& map,
                                       const PlantConfig& cfg) {
  if (!state.contact) return sensors::make_frame(map, state.t, 0.0, map.baseline_voltage);
  const double force = state.contact->normal_force;
  const double uncovered = std::clamp(state.slip_distance / cfg.sensor_pad_length, 0.0, 1.0);
  const double p = sensors::pressure_from_force(force, cfg.pressure_gain, cfg.pressure_sat) * (1.0 - uncovered);
  const double v_x = sensors::contact_to_voltage(map, state.contact->location_mm, force, sensors::Probe::cylinder);
  return sensors::make_frame(map, state.t, p, v_x);
}

}  // namespace reflexgrip::sim
