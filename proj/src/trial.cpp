#include "reflexgrip/trial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "reflexgrip/metrics.hpp"

namespace reflexgrip::harness {
namespace {

// Portable draws: std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t run_seed, int trial_index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialRecord run_trial(const Scenario& sc, int trial_index) {
  sc.validate();
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.condition = sc.condition;
  rec.seed = trial_seed(sc.seed, trial_index);
  rec.tick = sc.reflex.tick;

  std::mt19937_64 rng(rec.seed);
  rec.grasp_angle = sc.grasp_angle;
  if (sc.grasp_angle_sd > 0.0) {
    rec.grasp_angle = std::clamp(sc.grasp_angle + sc.grasp_angle_sd * standard_normal(rng), 0.0, 90.0);
  }
  sim::Disturbance dist;
  for (const auto& d : sc.disturbances) {
    auto e = d.event;
    if (d.t_jitter > 0.0) e.t = std::max(0.0, e.t + d.t_jitter * (2.0 * uniform01(rng) - 1.0));
    dist.events.push_back(e);
  }

  const auto& map = sc.sensor_map;
  const double tick = sc.reflex.tick;
  const bool reflexes = reflexes_enabled(sc.condition);
  const bool vib_on = sc.condition == Condition::reflex_vib;
  const bool pneu_on = sc.condition == Condition::reflex_pneu;

  auto plant = sim::initial_state(sc.plant, rec.grasp_angle);
  reflex::ReflexState reflex_state(sc.reflex);
  haptics::VibEncoder vib(sc.vib);
  haptics::BellowEncoder bellows(sc.bellowband);

  const long long ticks = sc.tick_count();
  rec.trace.reserve(static_cast<std::size_t>(std::min<long long>(ticks, 10000)) + 1);
  for (long long k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * tick;
    plant.t = t;

    auto frame = sim::emit_sensor_frame(plant, map, sc.plant);
    if (sc.plant.pressure_noise > 0.0) {
      frame.p = std::max(0.0, frame.p + sc.plant.pressure_noise * standard_normal(rng));
    }
    const auto contact = sensors::classify_contact(map, frame, sc.reflex.p_g);

    TraceRow row;
    row.t = t;
    row.aperture = plant.aperture;
    row.p = frame.p;
    row.v_x = frame.v_x;
    row.height = plant.object.height;
    row.displacement = plant.object.displacement_to_bin;
    row.phase = plant.phase;
    row.in_hand = plant.object.in_hand;

    if (plant.phase == sim::Phase::done) {
      rec.trace.push_back(row);
      break;
    }

    const double u_vol = sc.volitional_command(t);
    reflex::MotorCommand cmd{std::clamp(u_vol, -sc.reflex.u_max, sc.reflex.u_max),
                             reflex::CommandSource::volitional};
    if (reflexes) cmd = reflex::advance(reflex_state, frame, contact, u_vol, sc.reflex);
    row.u_c = cmd.u;
    row.source = cmd.source;

    if (vib_on) {
      vib.update(t, contact);
      row.current = vib.sample(t);
    }
    if (pneu_on) row.bellows = bellows.update(t, contact).pressures;

    rec.trace.push_back(row);
    plant = sim::plant_step(std::move(plant), cmd, dist, sc.plant, tick);
  }

  rec.duration = rec.trace.empty() ? 0.0 : rec.trace.back().t + (rec.trace.back().phase == sim::Phase::done ? 0.0 : tick);
  rec.fast_slips = reflex_state.fast_slip_count;
  rec.slow_slips = reflex_state.slow_slip_count;
  rec.milestones = compute_milestones(rec.trace, tick, sc.rules);
  rec.drops = rec.milestones.lifted ? count_drops(rec.trace, sc.rules.drop_floor, sc.rules.drop_refractory) : 0;
  return rec;
}

}  // namespace reflexgrip::harness
