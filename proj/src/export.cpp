#include "reflexgrip/export.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/structured_text.hpp"

namespace reflexgrip::harness {
namespace {

void put(fmt::memory_buffer& buf, double v) { fmt::format_to(std::back_inserter(buf), "{:.6f}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string trace_csv(const TrialRecord& record) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kTraceHeader);
  for (const auto& r : record.trace) {
    for (double v : {r.t, r.u_c, r.aperture, r.p, r.v_x, r.current}) {
      put(buf, v);
      buf.push_back(',');
    }
    for (double v : r.bellows) {
      put(buf, v);
      buf.push_back(',');
    }
    put(buf, r.height);
    buf.push_back(',');
    put(buf, r.displacement);
    fmt::format_to(std::back_inserter(buf), ",{}\n", sim::to_string(r.phase));
  }
  return fmt::to_string(buf);
}

std::string trace_file_name(const TrialRecord& record) {
  return fmt::format("trial_{}_{:03d}.csv", to_string(record.condition), record.trial_index);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

MetricsReport run_simulation(const Scenario& scenario, const std::filesystem::path& out_dir,
                             const RunOptions& options) {
  scenario.validate();
  ensure_directory(out_dir);

  std::vector<Condition> conditions = options.conditions;
  if (conditions.empty()) conditions.push_back(scenario.condition);
  const int parallel = std::max(1, options.parallel);

  struct Job {
    Condition condition;
    int index;
  };
  std::vector<Job> jobs;
  for (auto c : conditions) {
    for (int i = 0; i < scenario.trial_count; ++i) jobs.push_back({c, i});
  }

  struct Output {
    std::string name;
    std::string csv;
    TrialSummary summary;
  };
  auto work = [&scenario](Job job) {
    Scenario sc = scenario;
    sc.condition = job.condition;
    const auto record = run_trial(sc, job.index);
    return Output{trace_file_name(record), trace_csv(record), summarize(record)};
  };

  std::vector<TrialSummary> summaries;
  for (std::size_t begin = 0; begin < jobs.size(); begin += static_cast<std::size_t>(parallel)) {
    const std::size_t end = std::min(jobs.size(), begin + static_cast<std::size_t>(parallel));
    std::vector<Output> batch;
    if (parallel == 1) {
      batch.push_back(work(jobs[begin]));
    } else {
      std::vector<std::future<Output>> futures;
      for (std::size_t j = begin; j < end; ++j) futures.push_back(std::async(std::launch::async, work, jobs[j]));
      for (auto& f : futures) batch.push_back(f.get());
    }
    for (auto& out : batch) {
      write_file(out_dir / out.name, out.csv);
      summaries.push_back(out.summary);
    }
  }

  auto report = build_report(std::move(summaries), scenario.rules.histogram_bin_width);
  write_file(out_dir / "report.json", report_json(report));
  return report;
}

std::vector<sensors::SensorFrame> read_sensor_trace(const std::filesystem::path& path,
                                                    const sensors::SensorMap& map) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty sensor trace");
  const auto header = split_csv_line(line);
  auto column = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ct = column("t"), cp = column("p"), cv = column("V_x");

  std::vector<sensors::SensorFrame> frames;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    auto number = [&](std::size_t i) {
      if (i >= cells.size()) throw ParseError(fmt::format("{}:{}: too few columns", path.string(), line_no));
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        throw ParseError(fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, cells[i]));
      }
    };
    const double t = number(ct);
    if (!frames.empty() && !(t > frames.back().t)) {
      throw ParseError(fmt::format("{}:{}: timestamps must increase", path.string(), line_no));
    }
    frames.push_back(sensors::make_frame(map, t, std::max(0.0, number(cp)), number(cv)));
  }
  return frames;
}

std::string encode_vib_csv(const std::vector<sensors::SensorFrame>& frames, const sensors::SensorMap& map,
                           const haptics::VibConfig& cfg, double p_g) {
  haptics::VibEncoder encoder(cfg);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,I\n");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    encoder.update(f.t, sensors::classify_contact(map, f, p_g));
    double next = 0.0;
    if (i + 1 < frames.size()) {
      next = frames[i + 1].t;
    } else {
      next = f.t + (i > 0 ? f.t - frames[i - 1].t : 1.0 / cfg.synth_rate);
    }
    for (const auto& s : encoder.render(f.t, next)) {
      put(buf, s.t);
      buf.push_back(',');
      put(buf, s.current);
      buf.push_back('\n');
    }
  }
  return fmt::to_string(buf);
}

std::string encode_pneu_csv(const std::vector<sensors::SensorFrame>& frames, const sensors::SensorMap& map,
                            const haptics::BellowCalibration& cal, double p_g) {
  cal.validate();
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,P1,P2,P3,P4,P5,P6,P7,P8\n");
  long long next_frame = 0;
  for (const auto& f : frames) {
    // Hold the latest sample until the next Bellowband frame is due.
    const auto k = static_cast<long long>(std::floor(f.t * cal.frame_rate + 1e-9));
    if (k < next_frame) continue;
    next_frame = k + 1;
    const auto frame = haptics::bellow_frame(f.t, sensors::classify_contact(map, f, p_g), cal);
    put(buf, frame.t);
    for (double p : frame.pressures) {
      buf.push_back(',');
      put(buf, p);
    }
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

std::string characterize_csv(const sensors::SensorMap& map, double step_mm, double force_n) {
  if (!(step_mm > 0.0)) throw ConfigError("sweep step must be > 0");
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "location_mm,point_V,cylinder_V,cylinder_side,cylinder_x\n");
  const auto steps = static_cast<long long>(std::floor(sensors::kSensorLengthMm / step_mm + 1e-9));
  for (long long i = 0; i <= steps; ++i) {
    const double loc = std::min(sensors::kSensorLengthMm, static_cast<double>(i) * step_mm);
    const double vp = sensors::contact_to_voltage(map, loc, force_n, sensors::Probe::point);
    const double vc = sensors::contact_to_voltage(map, loc, force_n, sensors::Probe::cylinder);
    const auto contact = sensors::classify_contact(map, sensors::make_frame(map, 0.0, 0.0, vc));
    put(buf, loc);
    buf.push_back(',');
    put(buf, vp);
    buf.push_back(',');
    put(buf, vc);
    fmt::format_to(std::back_inserter(buf), ",{},", sensors::to_string(contact.side));
    if (contact.x) put(buf, *contact.x);
    buf.push_back('\n');
  }
  return fmt::to_string(buf);
}

}  // namespace reflexgrip::harness
