#include "reflexgrip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "reflexgrip/errors.hpp"

namespace reflexgrip::harness {

Milestones compute_milestones(std::span<const TraceRow> trace, double tick, const MetricRules& rules) {
  Milestones m;
  const long long hold_ticks = std::max<long long>(1, std::llround(rules.lift_hold / tick));
  long long run = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& row = trace[i];
    if (!m.lifted) {
      run = row.height > rules.lift_threshold ? run + 1 : 0;
      if (run >= hold_ticks) {
        m.lifted = true;
        m.lift_time = trace[i + 1 - static_cast<std::size_t>(run)].t;
      }
    }
    if (!m.reached && row.in_hand && row.displacement <= rules.reach_radius) {
      m.reached = true;
      m.reach_time = row.t;
    }
    if (!m.placed && row.phase == sim::Phase::done) {
      m.placed = true;
      m.place_time = row.t;
    }
  }

  if (m.placed && !m.reached) throw DataError("trial placed the object without reaching the end bin");
  if (m.reached && !m.lifted) throw DataError("trial reached the end bin without a qualifying lift");
  if (m.reach_time && m.lift_time && *m.reach_time < *m.lift_time) {
    throw DataError("reach milestone precedes the lift milestone");
  }
  if (m.place_time && m.reach_time && *m.place_time < *m.reach_time) {
    throw DataError("place milestone precedes the reach milestone");
  }
  return m;
}

int count_drops(std::span<const TraceRow> trace, double floor_mm, double refractory_s) {
  int drops = 0;
  std::optional<double> last;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i - 1].in_hand && !trace[i].in_hand)) continue;
    if (trace[i].height <= floor_mm) continue;
    if (last && trace[i].t - *last < refractory_s) continue;
    ++drops;
    last = trace[i].t;
  }
  return drops;
}

Histogram grasp_histogram(std::span<const double> angles, double bin_width) {
  if (angles.empty()) throw EmptyInput("grasp histogram needs at least one grasp angle");
  if (!(bin_width > 0.0 && bin_width <= 90.0)) throw BinMismatch("bin width must lie in (0, 90] deg");
  Histogram h;
  h.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::ceil(90.0 / bin_width - 1e-9));
  h.mass.assign(bins, 0.0);
  for (double a : angles) {
    if (!(a >= 0.0 && a <= 90.0)) {
      std::ostringstream os;
      os << "grasp angle " << a << " deg outside [0, 90]";
      throw OutOfRange(os.str());
    }
    const auto i = std::min(bins - 1, static_cast<std::size_t>(std::floor(a / bin_width)));
    h.mass[i] += 1.0;
  }
  for (auto& m : h.mass) m /= static_cast<double>(angles.size());
  return h;
}

double emd(const Histogram& a, const Histogram& b) {
  if (a.bins() != b.bins() || a.bin_width != b.bin_width || a.lower != b.lower) {
    throw BinMismatch("histograms use different binning");
  }
  double carried = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < a.bins(); ++i) {
    carried += a.mass[i] - b.mass[i];
    cost += std::abs(carried);
  }
  return cost * a.bin_width;
}

TrialSummary summarize(const TrialRecord& record) {
  TrialSummary s;
  s.condition = record.condition;
  s.trial_index = record.trial_index;
  s.seed = record.seed;
  s.grasp_angle = record.grasp_angle;
  s.milestones = record.milestones;
  s.drops = record.drops;
  s.fast_slips = record.fast_slips;
  s.slow_slips = record.slow_slips;
  s.duration = record.duration;
  s.reflex_commands = std::any_of(record.trace.begin(), record.trace.end(), [](const TraceRow& r) {
    return r.source != reflex::CommandSource::volitional;
  });
  return s;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

ConditionReport aggregate(Condition condition, const std::vector<TrialSummary>& trials, double bin_width) {
  ConditionReport r;
  r.condition = condition;
  r.trials = static_cast<int>(trials.size());
  std::vector<double> lift_times, reach_times, place_times, angles, successful;
  double drops = 0.0, fast = 0.0, slow = 0.0;
  int lifted = 0, reached = 0, placed = 0;
  for (const auto& t : trials) {
    const auto& m = t.milestones;
    lifted += m.lifted;
    reached += m.reached;
    placed += m.placed;
    if (m.lift_time) lift_times.push_back(*m.lift_time);
    if (m.reach_time) reach_times.push_back(*m.reach_time);
    if (m.place_time) place_times.push_back(*m.place_time);
    drops += t.drops;
    fast += t.fast_slips;
    slow += t.slow_slips;
    angles.push_back(t.grasp_angle);
    if (m.lifted) successful.push_back(t.grasp_angle);
  }
  const double n = static_cast<double>(trials.size());
  r.lift_rate = lifted / n;
  r.reach_rate = reached / n;
  r.place_rate = placed / n;
  r.mean_lift_time = mean_of(lift_times);
  r.mean_reach_time = mean_of(reach_times);
  r.mean_place_time = mean_of(place_times);
  r.drops_per_trial = drops / n;
  r.fast_slips_per_trial = fast / n;
  r.slow_slips_per_trial = slow / n;
  r.all_grasps = grasp_histogram(angles, bin_width);
  if (!successful.empty()) {
    r.successful_grasps = grasp_histogram(successful, bin_width);
    r.emd_successful_vs_all = emd(*r.successful_grasps, r.all_grasps);
  }
  return r;
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json histogram_json(const Histogram& h) {
  return {{"lower_deg", h.lower}, {"bin_width_deg", h.bin_width}, {"mass", h.mass}};
}

}  // namespace

MetricsReport build_report(std::vector<TrialSummary> trials, double bin_width) {
  if (trials.empty()) throw EmptyInput("no trials to report");
  std::sort(trials.begin(), trials.end(), [](const TrialSummary& a, const TrialSummary& b) {
    return std::pair(a.condition, a.trial_index) < std::pair(b.condition, b.trial_index);
  });
  std::map<Condition, std::vector<TrialSummary>> groups;
  for (const auto& t : trials) groups[t.condition].push_back(t);

  MetricsReport report;
  for (const auto& [condition, group] : groups) report.conditions.push_back(aggregate(condition, group, bin_width));
  report.trials = std::move(trials);
  return report;
}

std::string report_json(const MetricsReport& report) {
  nlohmann::ordered_json root;
  root["conditions"] = nlohmann::ordered_json::array();
  for (const auto& c : report.conditions) {
    nlohmann::ordered_json j;
    j["condition"] = to_string(c.condition);
    j["trials"] = c.trials;
    j["lift_rate"] = c.lift_rate;
    j["reach_rate"] = c.reach_rate;
    j["place_rate"] = c.place_rate;
    j["mean_lift_time_s"] = optional_json(c.mean_lift_time);
    j["mean_reach_time_s"] = optional_json(c.mean_reach_time);
    j["mean_place_time_s"] = optional_json(c.mean_place_time);
    j["drops_per_trial"] = c.drops_per_trial;
    j["fast_slips_per_trial"] = c.fast_slips_per_trial;
    j["slow_slips_per_trial"] = c.slow_slips_per_trial;
    j["grasp_histogram_all"] = histogram_json(c.all_grasps);
    j["grasp_histogram_successful"] =
        c.successful_grasps ? histogram_json(*c.successful_grasps) : nlohmann::ordered_json(nullptr);
    j["emd_successful_vs_all_deg"] = optional_json(c.emd_successful_vs_all);
    root["conditions"].push_back(std::move(j));
  }
  root["trials"] = nlohmann::ordered_json::array();
  for (const auto& t : report.trials) {
    nlohmann::ordered_json j;
    j["condition"] = to_string(t.condition);
    j["trial"] = t.trial_index;
    j["seed"] = t.seed;
    j["grasp_angle_deg"] = t.grasp_angle;
    j["lifted"] = t.milestones.lifted;
    j["reached"] = t.milestones.reached;
    j["placed"] = t.milestones.placed;
    j["lift_time_s"] = optional_json(t.milestones.lift_time);
    j["reach_time_s"] = optional_json(t.milestones.reach_time);
    j["place_time_s"] = optional_json(t.milestones.place_time);
    j["drops"] = t.drops;
    j["fast_slips"] = t.fast_slips;
    j["slow_slips"] = t.slow_slips;
    j["duration_s"] = t.duration;
    root["trials"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

}  // namespace reflexgrip::harness
