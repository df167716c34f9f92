#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "reflexgrip/grasp_sim.hpp"
#include "reflexgrip/haptic_encoding.hpp"
#include "reflexgrip/reflex_control.hpp"
#include "reflexgrip/scenario.hpp"

namespace reflexgrip::harness {

// One control tick as logged. I and P1..P8 are zero when the condition does
// not wear that display.
struct TraceRow {
  double t = 0.0;
  double u_c = 0.0;
  double aperture = 0.0;
  double p = 0.0;
  double v_x = 0.0;
  double current = 0.0;
  std::array<double, haptics::kBellowCount> bellows{};
  double height = 0.0;
  double displacement = 0.0;
  sim::Phase phase = sim::Phase::reach;
  bool in_hand = false;
  reflex::CommandSource source = reflex::CommandSource::volitional;
};

struct Milestones {
  bool lifted = false;
  bool reached = false;
  bool placed = false;
  std::optional<double> lift_time;
  std::optional<double> reach_time;
  std::optional<double> place_time;
};

struct TrialRecord {
  int trial_index = 0;
  Condition condition = Condition::reflex;
  std::uint64_t seed = 0;
  double grasp_angle = 0.0;
  double tick = 0.001;
  std::vector<TraceRow> trace;
  Milestones milestones;
  int drops = 0;
  int fast_slips = 0;
  int slow_slips = 0;
  double duration = 0.0;
};

// Seed used for trial `trial_index` of a run seeded with `run_seed`.
std::uint64_t trial_seed(std::uint64_t run_seed, int trial_index);

// Runs the fixed-tick loop until the object is placed or the timeout passes.
TrialRecord run_trial(const Scenario& scenario, int trial_index);

}  // namespace reflexgrip::harness
