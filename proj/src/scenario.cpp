#include "reflexgrip/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/structured_text.hpp"

namespace reflexgrip::harness {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::standard: return "standard";
    case Condition::reflex_vib: return "reflex_vib";
    case Condition::reflex_pneu: return "reflex_pneu";
    default: return "reflex";
  }
}

std::optional<Condition> condition_from_string(std::string_view name) {
  for (auto c : {Condition::standard, Condition::reflex, Condition::reflex_vib, Condition::reflex_pneu}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

void Scenario::validate() const {
  if (trial_count < 1) throw ConfigError("[trial] trial_count must be >= 1");
  if (!(trial_timeout > 0.0)) throw ConfigError("[trial] trial_timeout must be > 0");
  if (!(grasp_angle >= 0.0 && grasp_angle <= 90.0)) throw ConfigError("[trial] grasp_angle must lie in [0, 90]");
  if (!(grasp_angle_sd >= 0.0)) throw ConfigError("[trial] grasp_angle_sd must be >= 0");
  if (!(rules.lift_threshold >= 0.0 && rules.lift_hold > 0.0 && rules.reach_radius > 0.0 &&
        rules.drop_floor >= 0.0 && rules.drop_refractory >= 0.0)) {
    throw ConfigError("[trial] metric thresholds must be non-negative");
  }
  if (!(rules.histogram_bin_width > 0.0 && rules.histogram_bin_width <= 90.0)) {
    throw ConfigError("[trial] histogram_bin_width must be in (0, 90]");
  }
  sensors::validate(sensor_map);
  reflex.validate();
  plant.validate();
  vib.validate();
  bellowband.validate();
  for (const auto& seg : commands) {
    if (!(seg.end > seg.start)) throw ConfigError("[[command_segment]] end must be after start");
    if (!std::isfinite(seg.u_start) || !std::isfinite(seg.u_end)) {
      throw ConfigError("[[command_segment]] command must be finite");
    }
  }
  for (const auto& d : disturbances) {
    const auto& e = d.event;
    if (!(e.t >= 0.0 && e.t <= trial_timeout)) throw ConfigError("[[disturbance]] t outside the trial");
    if (!std::isfinite(e.magnitude) || !(e.duration >= 0.0) || !(d.t_jitter >= 0.0)) {
      throw ConfigError("[[disturbance]] magnitude must be finite, duration and t_jitter >= 0");
    }
  }
}

double Scenario::volitional_command(double t) const {
  double u = 0.0;
  for (const auto& seg : commands) {
    if (t >= seg.start && t < seg.end) {
      const double w = (t - seg.start) / (seg.end - seg.start);
      u = seg.u_start + w * (seg.u_end - seg.u_start);
    }
  }
  return u;
}

long long Scenario::tick_count() const { return std::llround(trial_timeout / reflex.tick); }

namespace {

void read_trial(const text::Table& t, Scenario& s, const std::filesystem::path& base_dir) {
  t.require_known_keys({"condition", "trial_count", "trial_timeout", "seed", "grasp_angle", "grasp_angle_sd",
                        "calibration", "lift_threshold", "lift_hold", "reach_radius", "drop_floor",
                        "drop_refractory", "histogram_bin_width"});
  if (t.has("condition")) {
    const auto name = t.string_or("condition", "");
    const auto c = condition_from_string(name);
    if (!c) throw ConfigError(t.where(t.find("condition")->line) + ": unknown condition '" + name + "'");
    s.condition = *c;
  }
  const double count = t.number_or("trial_count", s.trial_count);
  if (count != std::floor(count) || count < 1 || count > 1e6) throw ConfigError("[trial] trial_count must be a positive integer");
  s.trial_count = static_cast<int>(count);
  s.trial_timeout = t.number_or("trial_timeout", s.trial_timeout);
  const double seed = t.number_or("seed", 0.0);
  if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15) {
    throw ConfigError("[trial] seed must be a non-negative integer");
  }
  s.seed = static_cast<std::uint64_t>(seed);
  s.grasp_angle = t.number_or("grasp_angle", s.grasp_angle);
  s.grasp_angle_sd = t.number_or("grasp_angle_sd", s.grasp_angle_sd);
  s.rules.lift_threshold = t.number_or("lift_threshold", s.rules.lift_threshold);
  s.rules.lift_hold = t.number_or("lift_hold", s.rules.lift_hold);
  s.rules.reach_radius = t.number_or("reach_radius", s.rules.reach_radius);
  s.rules.drop_floor = t.number_or("drop_floor", s.rules.drop_floor);
  s.rules.drop_refractory = t.number_or("drop_refractory", s.rules.drop_refractory);
  s.rules.histogram_bin_width = t.number_or("histogram_bin_width", s.rules.histogram_bin_width);
  if (t.has("calibration")) {
    std::filesystem::path cal = t.string_or("calibration", "");
    if (cal.is_relative()) cal = base_dir / cal;
    s.sensor_map = sensors::load_sensor_map(cal);
  }
}

void read_reflex(const text::Table& t, reflex::ReflexConfig& r) {
  t.require_known_keys({"K", "p_g", "q_fs", "p_ss", "slow_window", "fast_pulse", "slow_pulse", "u_max", "tick",
                        "derivative_span"});
  r.gain_k = t.number_or("K", r.gain_k);
  r.p_g = t.number_or("p_g", r.p_g);
  r.q_fs = t.number_or("q_fs", r.q_fs);
  r.p_ss = t.number_or("p_ss", r.p_ss);
  r.slow_window = t.number_or("slow_window", r.slow_window);
  r.fast_pulse = t.number_or("fast_pulse", r.fast_pulse);
  r.slow_pulse = t.number_or("slow_pulse", r.slow_pulse);
  r.u_max = t.number_or("u_max", r.u_max);
  r.tick = t.number_or("tick", r.tick);
  const double span = t.number_or("derivative_span", r.derivative_span);
  if (span != std::floor(span) || span < 1 || span > 1000) throw ConfigError("[reflex] derivative_span must be an integer >= 1");
  r.derivative_span = static_cast<int>(span);
}

void read_plant(const text::Table& t, sim::PlantConfig& p) {
  struct Field {
    const char* key;
    double sim::PlantConfig::*member;
  };
  static constexpr Field kFields[] = {
      {"aperture_max", &sim::PlantConfig::aperture_max},
      {"aperture_initial", &sim::PlantConfig::aperture_initial},
      {"motor_gain", &sim::PlantConfig::motor_gain},
      {"object_diameter", &sim::PlantConfig::object_diameter},
      {"object_length", &sim::PlantConfig::object_length},
      {"object_mass", &sim::PlantConfig::object_mass},
      {"contact_stiffness", &sim::PlantConfig::contact_stiffness},
      {"friction_mu", &sim::PlantConfig::friction_mu},
      {"pressure_gain", &sim::PlantConfig::pressure_gain},
      {"pressure_sat", &sim::PlantConfig::pressure_sat},
      {"pressure_noise", &sim::PlantConfig::pressure_noise},
      {"slip_mobility", &sim::PlantConfig::slip_mobility},
      {"slip_escape", &sim::PlantConfig::slip_escape},
      {"sensor_pad_length", &sim::PlantConfig::sensor_pad_length},
      {"bin_distance", &sim::PlantConfig::bin_distance},
      {"bin_radius", &sim::PlantConfig::bin_radius},
      {"place_tolerance", &sim::PlantConfig::place_tolerance},
      {"optimal_angle_min", &sim::PlantConfig::optimal_angle_min},
      {"optimal_angle_max", &sim::PlantConfig::optimal_angle_max},
      {"angle_falloff", &sim::PlantConfig::angle_falloff},
      {"reach_end", &sim::PlantConfig::reach_end},
      {"lift_start", &sim::PlantConfig::lift_start},
      {"lift_duration", &sim::PlantConfig::lift_duration},
      {"lift_height", &sim::PlantConfig::lift_height},
      {"transport_start", &sim::PlantConfig::transport_start},
      {"transport_duration", &sim::PlantConfig::transport_duration},
      {"place_start", &sim::PlantConfig::place_start},
      {"place_duration", &sim::PlantConfig::place_duration},
  };
  for (const auto& e : t.entries) {
    bool known = false;
    for (const auto& f : kFields) known = known || e.key == f.key;
    if (!known) throw ConfigError(t.where(e.line) + ": unknown key '" + e.key + "'");
  }
  for (const auto& f : kFields) p.*f.member = t.number_or(f.key, p.*f.member);
}

void read_vib(const text::Table& t, haptics::VibConfig& v) {
  t.require_known_keys({"A0", "f_hi", "f_lo", "ramp_duration", "envelope_rate", "synth_rate"});
  v.amplitude = t.number_or("A0", v.amplitude);
  v.f_hi = t.number_or("f_hi", v.f_hi);
  v.f_lo = t.number_or("f_lo", v.f_lo);
  v.ramp_duration = t.number_or("ramp_duration", v.ramp_duration);
  v.envelope_rate = t.number_or("envelope_rate", v.envelope_rate);
  v.synth_rate = t.number_or("synth_rate", v.synth_rate);
}

void read_bellowband(const text::Table& t, haptics::BellowCalibration& b) {
  t.require_known_keys({"nu", "tau", "p_min", "p_max_contact", "p_max_grasp", "frame_rate", "literal_eq3",
                        "envelope_offset", "envelope_amplitude", "envelope_rate"});
  if (auto nu = t.list("nu")) {
    if (nu->size() != b.nu.size()) throw ConfigError("[bellowband] nu needs exactly 9 values");
    std::copy(nu->begin(), nu->end(), b.nu.begin());
  }
  if (auto tau = t.list("tau")) {
    if (tau->size() != b.tau.size()) throw ConfigError("[bellowband] tau needs exactly 8 values");
    std::copy(tau->begin(), tau->end(), b.tau.begin());
  } else if (t.has("nu")) {
    for (std::size_t i = 0; i < b.tau.size(); ++i) b.tau[i] = 0.5 * (b.nu[i] + b.nu[i + 1]);
  }
  b.p_min = t.number_or("p_min", b.p_min);
  b.p_max_contact = t.number_or("p_max_contact", b.p_max_contact);
  b.p_max_grasp = t.number_or("p_max_grasp", b.p_max_grasp);
  b.frame_rate = t.number_or("frame_rate", b.frame_rate);
  b.literal_eq3 = t.boolean_or("literal_eq3", b.literal_eq3);
  b.envelope_offset = t.number_or("envelope_offset", b.envelope_offset);
  b.envelope_amplitude = t.number_or("envelope_amplitude", b.envelope_amplitude);
  b.envelope_rate = t.number_or("envelope_rate", b.envelope_rate);
}

ScheduledDisturbance read_disturbance(const text::Table& t) {
  t.require_known_keys({"t", "kind", "magnitude", "duration", "t_jitter"});
  ScheduledDisturbance d;
  d.event.t = t.number("t");
  const auto kind = t.string_or("kind", "");
  if (kind == "load_spike") {
    d.event.kind = sim::DisturbanceKind::load_spike;
  } else if (kind == "mu_drop") {
    d.event.kind = sim::DisturbanceKind::mu_drop;
  } else if (kind == "contact_perturb") {
    d.event.kind = sim::DisturbanceKind::contact_perturb;
  } else {
    throw ConfigError(t.where(t.line) + ": kind must be load_spike, mu_drop or contact_perturb");
  }
  d.event.magnitude = t.number("magnitude");
  d.event.duration = t.number("duration");
  d.t_jitter = t.number_or("t_jitter", 0.0);
  return d;
}

CommandSegment read_segment(const text::Table& t) {
  t.require_known_keys({"start", "end", "u", "u_start", "u_end"});
  CommandSegment seg;
  seg.start = t.number("start");
  seg.end = t.number("end");
  if (t.has("u")) {
    if (t.has("u_start") || t.has("u_end")) throw ConfigError(t.where(t.line) + ": give either u or u_start/u_end");
    seg.u_start = seg.u_end = t.number("u");
  } else {
    seg.u_start = t.number("u_start");
    seg.u_end = t.number("u_end");
  }
  return seg;
}

}  // namespace

Scenario parse_scenario(std::string_view text_in, std::string_view origin, const std::filesystem::path& base_dir) {
  const auto doc = text::parse(text_in, origin);
  doc.require_known_sections({"trial", "reflex", "plant", "vib", "bellowband", "disturbance", "command_segment"});
  if (const auto* root = doc.find(""); root && (!root->entries.empty() || !root->rows.empty())) {
    throw ConfigError(std::string(origin) + ": content before the first section header");
  }
  for (const auto& t : doc.tables) {
    const bool repeated_kind = t.name == "disturbance" || t.name == "command_segment";
    if (!t.name.empty() && repeated_kind != t.repeated) {
      throw ConfigError(t.where(t.line) + (repeated_kind ? ": use [[" + t.name + "]]" : ": use [" + t.name + "]"));
    }
    if (!t.name.empty() && !t.rows.empty()) throw ConfigError(t.where(t.rows.front().line) + ": unexpected data row");
  }

  Scenario s;
  if (const auto* t = doc.find("trial")) read_trial(*t, s, base_dir);
  s.bellowband = haptics::BellowCalibration::from_sensor_map(s.sensor_map);
  if (const auto* t = doc.find("reflex")) read_reflex(*t, s.reflex);
  if (const auto* t = doc.find("plant")) read_plant(*t, s.plant);
  if (const auto* t = doc.find("vib")) read_vib(*t, s.vib);
  if (const auto* t = doc.find("bellowband")) read_bellowband(*t, s.bellowband);
  for (const auto* t : doc.all("disturbance")) s.disturbances.push_back(read_disturbance(*t));
  for (const auto* t : doc.all("command_segment")) s.commands.push_back(read_segment(*t));
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(text::read_file(path), path.string(), path.parent_path());
}

}  // namespace reflexgrip::harness
