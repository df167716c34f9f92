#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reflexgrip/scenario.hpp"
#include "reflexgrip/trial.hpp"

namespace reflexgrip::harness {

// Throws DataError when the outcomes violate placed => reached => lifted.
Milestones compute_milestones(std::span<const TraceRow> trace, double tick, const MetricRules& rules);

// Release events (in_hand true -> false) above the floor, at least
// `refractory` seconds apart.
int count_drops(std::span<const TraceRow> trace, double floor_mm, double refractory_s);

// Angle histogram over [0, 90] deg.
struct Histogram {
  double lower = 0.0;
  double bin_width = 10.0;
  std::vector<double> mass;  // sums to 1

  [[nodiscard]] std::size_t bins() const { return mass.size(); }
};

// Throws EmptyInput when `angles` is empty.
Histogram grasp_histogram(std::span<const double> angles, double bin_width);

// Earth mover's distance on the linear angle axis, in degrees.
// Throws BinMismatch unless both use the same bins.
double emd(const Histogram& a, const Histogram& b);

struct TrialSummary {
  Condition condition = Condition::reflex;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double grasp_angle = 0.0;
  Milestones milestones;
  int drops = 0;
  int fast_slips = 0;
  int slow_slips = 0;
  double duration = 0.0;
  bool reflex_commands = false;  // any tick driven by a reflex
};

TrialSummary summarize(const TrialRecord& record);

struct ConditionReport {
  Condition condition = Condition::reflex;
  int trials = 0;
  double lift_rate = 0.0;
  double reach_rate = 0.0;
  double place_rate = 0.0;
  std::optional<double> mean_lift_time;
  std::optional<double> mean_reach_time;
  std::optional<double> mean_place_time;
  double drops_per_trial = 0.0;
  double fast_slips_per_trial = 0.0;
  double slow_slips_per_trial = 0.0;
  Histogram all_grasps;
  std::optional<Histogram> successful_grasps;  // lifted trials only
  std::optional<double> emd_successful_vs_all;
};

struct MetricsReport {
  std::vector<ConditionReport> conditions;
  std::vector<TrialSummary> trials;  // sorted by (condition, trial index)
};

// Groups by condition; independent of input order. Throws EmptyInput.
MetricsReport build_report(std::vector<TrialSummary> trials, double bin_width);

std::string report_json(const MetricsReport& report);

}  // namespace reflexgrip::harness
