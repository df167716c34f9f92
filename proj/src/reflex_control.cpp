#include "reflexgrip/reflex_control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reflexgrip/errors.hpp"

namespace reflexgrip::reflex {

void ReflexConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("[reflex] ") + what);
  };
  require(gain_k > 0.0, "K must be > 0");
  require(q_fs < 0.0, "q_fs must be < 0");
  require(p_ss < 0.0, "p_ss must be < 0");
  require(tick > 0.0, "tick must be > 0");
  require(slow_pulse > 0.0 && fast_pulse > slow_pulse, "require fast_pulse > slow_pulse > 0");
  require(slow_window >= tick, "slow_window must be at least one tick");
  require(u_max > 0.0, "u_max must be > 0");
  require(p_g >= 0.0, "p_g must be >= 0");
  require(derivative_span >= 1, "derivative_span must be >= 1");
  require(slow_pulse_ticks() >= 1, "slow_pulse shorter than one tick");
}

int ReflexConfig::fast_pulse_ticks() const { return static_cast<int>(std::lround(fast_pulse / tick)); }
int ReflexConfig::slow_pulse_ticks() const { return static_cast<int>(std::lround(slow_pulse / tick)); }

const char* to_string(CommandSource source) {
  switch (source) {
    case CommandSource::over_grasp: return "over_grasp";
    case CommandSource::fast_slip: return "fast_slip";
    case CommandSource::slow_slip: return "slow_slip";
    default: return "volitional";
  }
}

PressureHistory::PressureHistory(std::size_t capacity) : buf_(std::max<std::size_t>(capacity, 1)) {}

void PressureHistory::push(PressureSample s) {
  buf_[(head_ + size_) % buf_.size()] = s;
  if (size_ < buf_.size()) {
    ++size_;
  } else {
    head_ = (head_ + 1) % buf_.size();
  }
}

const PressureSample& PressureHistory::operator[](std::size_t i) const {
  return buf_[(head_ + i) % buf_.size()];
}

const PressureSample& PressureHistory::nearest(double t) const {
  // First index with timestamp >= t.
  std::size_t lo = 0;
  std::size_t hi = size_;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if ((*this)[mid].t < t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == size_) return back();
  if (lo == 0) return (*this)[0];
  const auto& after = (*this)[lo];
  const auto& before = (*this)[lo - 1];
  return (after.t - t) < (t - before.t) ? after : before;
}

ReflexState::ReflexState(const ReflexConfig& cfg)
    : history(static_cast<std::size_t>(std::ceil(cfg.slow_window / cfg.tick)) +
              static_cast<std::size_t>(cfg.derivative_span) + 2) {}

double over_grasp_modulate(double u_c, double p, sensors::Side side, const ReflexConfig& cfg) {
  if (u_c >= 0.0 && p >= cfg.p_g && side == sensors::Side::palmar) {
    return u_c * std::exp(-cfg.gain_k * p);
  }
  return u_c;
}

double estimate_derivative(const ReflexState& state, const sensors::SensorFrame& frame, int span) {
  const auto& h = state.history;
  if (h.empty()) throw InsufficientHistory("pressure derivative needs at least two samples");
  const std::size_t back = std::min<std::size_t>(static_cast<std::size_t>(std::max(span, 1)), h.size());
  const auto& ref = h[h.size() - back];
  const double dt = frame.t - ref.t;
  if (!(dt > 0.0)) throw NonMonotoneTime("pressure samples must have increasing timestamps");
  return (frame.p - ref.p) / dt;
}

bool detect_fast_slip(double dpdt, const ReflexConfig& cfg) { return dpdt <= cfg.q_fs; }

bool detect_slow_slip(double p_now, double p_window_ago, const ReflexConfig& cfg) {
  return (p_now - p_window_ago) < cfg.p_ss;
}

MotorCommand advance(ReflexState& state, const sensors::SensorFrame& frame,
                     const sensors::ContactState& contact, double u_volitional,
                     const ReflexConfig& cfg) {
  auto& h = state.history;
  if (!h.empty() && !(frame.t > h.back().t)) {
    std::ostringstream os;
    os << "reflex tick at t=" << frame.t << " s does not follow t=" << h.back().t << " s";
    throw NonMonotoneTime(os.str());
  }

  std::optional<double> dpdt;
  if (!h.empty()) {
    dpdt = estimate_derivative(state, frame, cfg.derivative_span);
    state.derivative_estimate = *dpdt;
  }
  std::optional<double> p_window_ago;
  // Half a tick of slack absorbs accumulated rounding in t.
  if (!h.empty() && frame.t - h[0].t >= cfg.slow_window - 0.5 * cfg.tick) {
    p_window_ago = h.nearest(frame.t - cfg.slow_window).p;
  }
  h.push({frame.t, frame.p});

  // Deliberate opening always wins.
  if (u_volitional < 0.0) {
    state.active_pulse = Pulse::none;
    state.remaining_ticks = 0;
    return {std::max(u_volitional, -cfg.u_max), CommandSource::volitional};
  }

  const bool fast = dpdt && detect_fast_slip(*dpdt, cfg);
  const bool slow = p_window_ago && detect_slow_slip(frame.p, *p_window_ago, cfg);

  if (fast && state.active_pulse != Pulse::fast) {
    state.active_pulse = Pulse::fast;
    state.remaining_ticks = cfg.fast_pulse_ticks();
    ++state.fast_slip_count;
  } else if (slow && state.active_pulse == Pulse::none) {
    state.active_pulse = Pulse::slow;
    state.remaining_ticks = cfg.slow_pulse_ticks();
    ++state.slow_slip_count;
  }

  if (state.active_pulse != Pulse::none) {
    const auto source = state.active_pulse == Pulse::fast ? CommandSource::fast_slip : CommandSource::slow_slip;
    if (--state.remaining_ticks <= 0) {
      state.active_pulse = Pulse::none;
      state.remaining_ticks = 0;
    }
    return {cfg.u_max, source};
  }

  const double u = over_grasp_modulate(u_volitional, frame.p, contact.side, cfg);
  return {std::min(u, cfg.u_max), u != u_volitional ? CommandSource::over_grasp : CommandSource::volitional};
}

std::pair<ReflexState, MotorCommand> reflex_step(ReflexState state, const sensors::SensorFrame& frame,
                                                 const sensors::ContactState& contact,
                                                 double u_volitional, const ReflexConfig& cfg) {
  const auto cmd = advance(state, frame, contact, u_volitional, cfg);
  return {std::move(state), cmd};
}

}  // namespace reflexgrip::reflex
