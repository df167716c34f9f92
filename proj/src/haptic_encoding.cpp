#include "reflexgrip/haptic_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "reflexgrip/errors.hpp"

namespace reflexgrip::haptics {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sin_cycles(double cycles) { return std::sin(kTwoPi * (cycles - std::floor(cycles))); }

}  // namespace

void VibConfig::validate() const {
  if (!(amplitude > 0.0)) throw ConfigError("[vib] A0 must be > 0");
  if (!(f_hi > f_lo && f_lo > 0.0)) throw ConfigError("[vib] require f_hi > f_lo > 0");
  if (!(ramp_duration > 0.0)) throw ConfigError("[vib] ramp_duration must be > 0");
  if (!(envelope_rate > 0.0)) throw ConfigError("[vib] envelope_rate must be > 0");
  if (!(synth_rate > 2.0 * f_hi)) throw ConfigError("[vib] synth_rate must exceed twice f_hi");
}

double vib_amplitude(double x, const VibConfig& cfg) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "normalized location " << x << " outside [0, 1]";
    throw OutOfRange(os.str());
  }
  return cfg.amplitude * std::sqrt(1.0 - x);
}

double grasp_frequency(std::optional<double> t_since_grasp, const VibConfig& cfg) {
  if (!t_since_grasp) return cfg.f_hi;
  const double t = std::max(0.0, *t_since_grasp);
  return std::max(cfg.f_lo, cfg.f_hi - (cfg.f_hi - cfg.f_lo) * t / cfg.ramp_duration);
}

double carrier_cycles(const GraspRampState& ramp, double t, const VibConfig& cfg) {
  const double since = t - ramp.anchor_time;
  if (!ramp.grasp_onset) return ramp.anchor_cycles + cfg.f_hi * since;
  const double tau = std::max(0.0, since);
  const double span = cfg.ramp_duration;
  const double df = cfg.f_hi - cfg.f_lo;
  if (tau <= span) return ramp.anchor_cycles + cfg.f_hi * tau - df * tau * tau / (2.0 * span);
  return ramp.anchor_cycles + cfg.f_hi * span - 0.5 * df * span + cfg.f_lo * (tau - span);
}

void update_grasp_ramp(GraspRampState& ramp, double t, bool grasped, const VibConfig& cfg) {
  if (grasped != ramp.grasp_onset.has_value()) {
    ramp.anchor_cycles = carrier_cycles(ramp, t, cfg);
    ramp.anchor_time = t;
    ramp.grasp_onset = grasped ? std::optional<double>(t) : std::nullopt;
  }
  ramp.f_current = grasp_frequency(ramp.grasp_onset ? std::optional<double>(t - *ramp.grasp_onset)
                                                    : std::nullopt,
                                   cfg);
}

double palmar_envelope(double t, const VibConfig& cfg) {
  return std::abs(sin_cycles(cfg.envelope_rate * t));
}

double vib_sample(double t, const sensors::ContactState& contact, const GraspRampState& ramp,
                  const VibConfig& cfg) {
  if (contact.side == sensors::Side::none || !contact.x) return 0.0;
  const double a = vib_amplitude(*contact.x, cfg);
  if (contact.side == sensors::Side::dorsal) return a * sin_cycles(cfg.f_hi * t);
  return palmar_envelope(t, cfg) * a * sin_cycles(carrier_cycles(ramp, t, cfg));
}

VibEncoder::VibEncoder(VibConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  ramp_.f_current = cfg_.f_hi;
}

void VibEncoder::update(double t, const sensors::ContactState& contact) {
  update_grasp_ramp(ramp_, t, contact.grasped, cfg_);
  contact_ = contact;
}

double VibEncoder::sample(double t) const { return vib_sample(t, contact_, ramp_, cfg_); }

std::vector<VibSample> VibEncoder::render(double t_begin, double t_end) const {
  std::vector<VibSample> out;
  auto k = static_cast<long long>(std::ceil(t_begin * cfg_.synth_rate - 1e-9));
  for (;; ++k) {
    const double t = static_cast<double>(k) / cfg_.synth_rate;
    if (t >= t_end) break;
    out.push_back({t, sample(t)});
  }
  return out;
}

void BellowCalibration::validate() const {
  for (int i = 0; i < kBellowCount; ++i) {
    if (!(nu[i] < nu[i + 1])) throw ConfigError("[bellowband] nu must be strictly increasing");
    if (!(nu[i] < tau[i] && tau[i] < nu[i + 1])) {
      throw ConfigError("[bellowband] tau_" + std::to_string(i + 1) + " must lie strictly inside its region");
    }
  }
  if (!(p_min > 0.0 && p_min < p_max_contact && p_max_contact < p_max_grasp)) {
    throw ConfigError("[bellowband] require 0 < p_min < p_max_contact < p_max_grasp");
  }
  if (!(frame_rate > 0.0)) throw ConfigError("[bellowband] frame_rate must be > 0");
  if (!(envelope_amplitude >= 0.0 && envelope_amplitude <= envelope_offset)) {
    throw ConfigError("[bellowband] envelope must stay non-negative");
  }
}

BellowCalibration BellowCalibration::from_sensor_map(const sensors::SensorMap& map) {
  BellowCalibration cal;
  const double lo = map.min_voltage();
  const double tip = map.fingertip_voltage;
  const double hi = map.max_voltage();
  constexpr int kHalf = kBellowCount / 2;
  for (int i = 0; i <= kHalf; ++i) {
    cal.nu[i] = lo + (tip - lo) * i / kHalf;
    cal.nu[kHalf + i] = tip + (hi - tip) * i / kHalf;
  }
  for (int i = 0; i < kBellowCount; ++i) cal.tau[i] = 0.5 * (cal.nu[i] + cal.nu[i + 1]);
  return cal;
}

double pressure_envelope(double t, const BellowCalibration& cal) {
  return cal.envelope_amplitude * sin_cycles(cal.envelope_rate * t) + cal.envelope_offset;
}

BellowRegion bellow_gains_in_region(int index, double v_x, const BellowCalibration& cal) {
  if (index < 1 || index > kBellowCount) throw OutOfRange("bellow index outside 1..8");
  const double lo = cal.nu[index - 1];
  const double hi = cal.nu[index];
  const double tau = cal.tau[index - 1];
  if (!(v_x >= lo && v_x <= hi)) throw VoltageOutOfRange("voltage outside the requested bellow region");

  BellowRegion r;
  r.index = index;
  if (v_x < tau) {
    if (index == 1) return r;
    r.neighbor = index - 1;
    r.gamma = 0.5 + 0.5 * (v_x - lo) / (tau - lo);
  } else {
    if (index == kBellowCount) return r;
    r.neighbor = index + 1;
    r.gamma = cal.literal_eq3 ? 0.5 + 0.5 * (v_x - tau) / (hi - tau) : 1.0 - 0.5 * (v_x - tau) / (hi - tau);
  }
  r.gamma_neighbor = 1.0 - r.gamma;
  return r;
}

BellowRegion bellow_region(double v_x, const BellowCalibration& cal) {
  if (!(v_x >= cal.nu.front() && v_x <= cal.nu.back())) {
    std::ostringstream os;
    os << "V_x = " << v_x << " V outside [" << cal.nu.front() << ", " << cal.nu.back() << "] V";
    throw VoltageOutOfRange(os.str());
  }
  int index = kBellowCount;
  for (int i = 1; i < kBellowCount; ++i) {
    if (v_x < cal.nu[i]) {
      index = i;
      break;
    }
  }
  return bellow_gains_in_region(index, v_x, cal);
}

BellowFrame bellow_frame(double t, const sensors::ContactState& contact, const BellowCalibration& cal) {
  BellowFrame frame;
  frame.t = t;
  frame.pressures.fill(cal.p_min);
  if (contact.side == sensors::Side::none) return frame;

  const double v = std::clamp(contact.voltage, cal.nu.front(), cal.nu.back());
  const auto region = bellow_region(v, cal);
  const double p_max = contact.grasped ? cal.p_max_grasp : cal.p_max_contact;
  const double envelope = pressure_envelope(t, cal);
  auto command = [&](double gamma) {
    return std::max(cal.p_min, envelope * ((p_max - cal.p_min) * gamma + cal.p_min));
  };
  frame.pressures[region.index - 1] = command(region.gamma);
  if (region.neighbor) frame.pressures[*region.neighbor - 1] = command(region.gamma_neighbor);
  return frame;
}

BellowEncoder::BellowEncoder(BellowCalibration cal) : cal_(cal) {
  cal_.validate();
  frame_.pressures.fill(cal_.p_min);
}

const BellowFrame& BellowEncoder::update(double t, const sensors::ContactState& contact) {
  const auto k = static_cast<long long>(std::floor(t * cal_.frame_rate + 1e-9));
  if (k >= next_frame_) {
    frame_ = bellow_frame(t, contact, cal_);
    next_frame_ = k + 1;
  }
  return frame_;
}

}  // namespace reflexgrip::haptics
