#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/reflex_control.hpp"

using namespace reflexgrip;
using namespace reflexgrip::reflex;
using sensors::ContactState;
using sensors::SensorFrame;
using sensors::Side;

namespace {

ContactState palmar(double p) {
  ContactState c;
  c.side = Side::palmar;
  c.x = 0.5;
  c.grasped = p > 0.2;
  c.voltage = 1.0;
  return c;
}

struct Tick {
  MotorCommand cmd;
  Pulse pulse;
};

// Runs the reflex loop over a scripted pressure sequence.
std::vector<Tick> drive(const std::function<double(int)>& pressure, int ticks, ReflexState& state,
                        const ReflexConfig& cfg = {}, double u_vol = 0.0) {
  std::vector<Tick> out;
  for (int k = 0; k < ticks; ++k) {
    const double p = pressure(k);
    const SensorFrame f{k * cfg.tick, p, 1.0, true};
    out.push_back({advance(state, f, palmar(p), u_vol, cfg), state.active_pulse});
  }
  return out;
}

int count_source(const std::vector<Tick>& ticks, CommandSource s) {
  int n = 0;
  for (const auto& t : ticks) n += t.cmd.source == s;
  return n;
}

// Index of the first tick driven by `s`, or -1.
int first_of(const std::vector<Tick>& ticks, CommandSource s) {
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (ticks[i].cmd.source == s) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_CASE("over-grasp law") {
  const ReflexConfig cfg;
  // exp(-0.6) to 20 digits.
  CHECK(over_grasp_modulate(1.0, 0.2, Side::palmar, cfg) == Catch::Approx(0.54881163609402643263).epsilon(1e-15));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::uniform_real_distribution<double> p(0.2, 3.3);
  for (int i = 0; i < 200; ++i) {
    const double uc = u(rng);
    const double pv = p(rng);
    const long double expected = static_cast<long double>(uc) * std::exp(-3.0L * static_cast<long double>(pv));
    const double got = over_grasp_modulate(uc, pv, Side::palmar, cfg);
    CHECK(std::abs(got - static_cast<double>(expected)) <= 1e-12 * std::abs(static_cast<double>(expected)));
  }
}

TEST_CASE("over-grasp guard branches pass through") {
  const ReflexConfig cfg;
  CHECK(over_grasp_modulate(1.0, 0.19, Side::palmar, cfg) == 1.0);
  CHECK(over_grasp_modulate(1.0, 1.0, Side::dorsal, cfg) == 1.0);
  CHECK(over_grasp_modulate(1.0, 1.0, Side::none, cfg) == 1.0);
  CHECK(over_grasp_modulate(-1.0, 1.0, Side::palmar, cfg) == -1.0);
}

TEST_CASE("derivative estimate") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  CHECK_THROWS_AS(estimate_derivative(s, {0.0, 1.0, 1.0, true}, 5), InsufficientHistory);

  SECTION("constant pressure") {
    drive([](int) { return 1.0; }, 20, s, cfg);
    CHECK(estimate_derivative(s, {0.020, 1.0, 1.0, true}, 5) == 0.0);
  }
  SECTION("steady ramp") {
    drive([](int k) { return 2.0 - 0.02 * k; }, 20, s, cfg);
    CHECK(estimate_derivative(s, {0.020, 2.0 - 0.02 * 20, 1.0, true}, 5) == Catch::Approx(-20.0));
  }
  SECTION("short history uses what exists") {
    drive([](int) { return 1.0; }, 1, s, cfg);
    CHECK(estimate_derivative(s, {0.001, 0.9, 1.0, true}, 5) == Catch::Approx(-100.0));
  }
}

TEST_CASE("slip detector boundaries") {
  const ReflexConfig cfg;
  CHECK(detect_fast_slip(-20.0, cfg));
  CHECK(detect_fast_slip(-25.0, cfg));
  CHECK_FALSE(detect_fast_slip(-19.999, cfg));
  // 0.25 - 0.6 rounds to the same double as -0.35.
  REQUIRE(0.25 - 0.6 == -0.35);
  CHECK_FALSE(detect_slow_slip(0.25, 0.6, cfg));
  CHECK_FALSE(detect_slow_slip(0.0, 0.35, cfg));
  CHECK(detect_slow_slip(0.0, 0.3501, cfg));
}

TEST_CASE("fast-slip pulse lasts 60 ticks") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  const auto ticks = drive([](int k) { return k < 100 ? 1.0 : 0.7; }, 400, s, cfg);
  const int start = first_of(ticks, CommandSource::fast_slip);
  CHECK(start == 100);
  CHECK(count_source(ticks, CommandSource::fast_slip) == 60);
  for (int k = start; k < start + 60; ++k) CHECK(ticks[k].cmd.u == cfg.u_max);
  CHECK(ticks[start + 60].cmd.source != CommandSource::fast_slip);
  CHECK(s.fast_slip_count == 1);
  CHECK(s.slow_slip_count == 0);
}

TEST_CASE("slow-slip pulse lasts 30 ticks") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  int trigger = -1;
  std::vector<Tick> ticks;
  // 1 V for 0.6 s, then a 7.8125 V/s decline (exact in binary) until the
  // reflex fires; the grip then recovers to 0.1 V above the trigger level.
  double hold = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double p = k < 600 ? 1.0 : 1.0 - (k - 600) / 128.0;
    if (trigger >= 0) p = hold;
    const SensorFrame f{k * cfg.tick, p, 1.0, true};
    ticks.push_back({advance(s, f, palmar(p), 0.0, cfg), s.active_pulse});
    if (trigger < 0 && ticks.back().cmd.source == CommandSource::slow_slip) {
      trigger = k;
      hold = p + 0.1;
    }
  }
  REQUIRE(trigger > 600);
  // 45 / 128 is the first step count whose drop exceeds 0.35 V.
  CHECK(trigger == 645);
  CHECK(count_source(ticks, CommandSource::slow_slip) == 30);
  CHECK(count_source(ticks, CommandSource::fast_slip) == 0);
  for (int k = trigger; k < trigger + 30; ++k) CHECK(ticks[k].cmd.u == cfg.u_max);
  CHECK(s.slow_slip_count == 1);
}

TEST_CASE("fast slip during a slow pulse restarts as a full fast pulse") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  int slow_start = -1;
  std::vector<Tick> ticks;
  for (int k = 0; k < 1000; ++k) {
    double p = k < 600 ? 1.0 : 1.0 - (k - 600) / 128.0;
    if (slow_start >= 0) p = k < slow_start + 10 ? 1.2 : 1.05;
    const SensorFrame f{k * cfg.tick, p, 1.0, true};
    ticks.push_back({advance(s, f, palmar(p), 0.0, cfg), s.active_pulse});
    if (slow_start < 0 && ticks.back().cmd.source == CommandSource::slow_slip) {
      slow_start = k;
    }
  }
  REQUIRE(slow_start > 0);
  CHECK(count_source(ticks, CommandSource::slow_slip) == 10);
  CHECK(first_of(ticks, CommandSource::fast_slip) == slow_start + 10);
  CHECK(count_source(ticks, CommandSource::fast_slip) == 60);
  for (int k = slow_start; k < slow_start + 70; ++k) CHECK(ticks[k].cmd.u == cfg.u_max);
  CHECK(ticks[slow_start + 70].cmd.u != cfg.u_max);
  CHECK(s.fast_slip_count == 1);
  CHECK(s.slow_slip_count == 1);
}

TEST_CASE("no retrigger during a fast pulse") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  // Two sharp drops 20 ticks apart.
  const auto ticks = drive([](int k) { return k < 100 ? 2.0 : (k < 120 ? 1.5 : 1.0); }, 300, s, cfg);
  CHECK(count_source(ticks, CommandSource::fast_slip) == 60);
  CHECK(s.fast_slip_count == 1);
}

TEST_CASE("opening cancels a pulse") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  drive([](int k) { return k < 100 ? 1.0 : 0.7; }, 110, s, cfg);
  REQUIRE(s.active_pulse == Pulse::fast);
  const auto cmd = advance(s, {0.110, 0.7, 1.0, true}, palmar(0.7), -1.0, cfg);
  CHECK(cmd.u == -1.0);
  CHECK(cmd.source == CommandSource::volitional);
  CHECK(s.active_pulse == Pulse::none);
}

TEST_CASE("volitional pass-through and clamping") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  ContactState none;
  const auto a = advance(s, {0.0, 0.0, 0.4, false}, none, 0.7, cfg);
  CHECK(a.u == 0.7);
  CHECK(a.source == CommandSource::volitional);
  const auto b = advance(s, {0.001, 0.0, 0.4, false}, none, 9.0, cfg);
  CHECK(b.u == cfg.u_max);
  const auto c = advance(s, {0.002, 0.0, 0.4, false}, none, -9.0, cfg);
  CHECK(c.u == -cfg.u_max);
  const auto d = advance(s, {0.003, 0.5, 1.0, true}, palmar(0.5), 1.0, cfg);
  CHECK(d.source == CommandSource::over_grasp);
  CHECK(d.u == Catch::Approx(std::exp(-1.5)));
}

TEST_CASE("time must increase") {
  const ReflexConfig cfg;
  ReflexState s(cfg);
  advance(s, {0.010, 1.0, 1.0, true}, palmar(1.0), 0.0, cfg);
  CHECK_THROWS_AS(advance(s, {0.010, 1.0, 1.0, true}, palmar(1.0), 0.0, cfg), NonMonotoneTime);
  CHECK_THROWS_AS(advance(s, {0.005, 1.0, 1.0, true}, palmar(1.0), 0.0, cfg), NonMonotoneTime);
}

TEST_CASE("reflex_step is deterministic and bounded") {
  const ReflexConfig cfg;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.0, 2.5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<std::pair<double, double>> inputs;
  for (int k = 0; k < 3000; ++k) inputs.emplace_back(p(rng), u(rng));

  auto run = [&] {
    ReflexState s(cfg);
    std::vector<double> out;
    for (int k = 0; k < 3000; ++k) {
      const auto [pv, uv] = inputs[k];
      auto [next, cmd] = reflex_step(s, {k * cfg.tick, pv, 1.0, true}, palmar(pv), uv, cfg);
      s = std::move(next);
      CHECK(std::abs(cmd.u) <= cfg.u_max);
      out.push_back(cmd.u);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("config validation") {
  ReflexConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.fast_pulse_ticks() == 60);
  CHECK(cfg.slow_pulse_ticks() == 30);
  cfg.tick = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
