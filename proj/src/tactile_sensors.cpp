#include "reflexgrip/tactile_sensors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/structured_text.hpp"

namespace reflexgrip::sensors {

const char* to_string(Side side) {
  switch (side) {
    case Side::dorsal: return "dorsal";
    case Side::palmar: return "palmar";
    default: return "none";
  }
}

const char* to_string(Probe probe) { return probe == Probe::point ? "point" : "cylinder"; }

const std::vector<CalibrationPoint>& SensorMap::samples(Probe probe) const {
  return probe == Probe::point ? point : cylinder;
}

double SensorMap::activation_force(Probe probe) const {
  return probe == Probe::point ? activation_force_flat : activation_force_cyl;
}

double SensorMap::min_voltage() const {
  double lo = point.empty() ? cylinder.front().voltage : point.front().voltage;
  for (const auto* table : {&point, &cylinder}) {
    for (const auto& s : *table) lo = std::min(lo, s.voltage);
  }
  return lo;
}

double SensorMap::max_voltage() const {
  double hi = point.empty() ? cylinder.front().voltage : point.front().voltage;
  for (const auto* table : {&point, &cylinder}) {
    for (const auto& s : *table) hi = std::max(hi, s.voltage);
  }
  return hi;
}

namespace {

void validate_table(const std::vector<CalibrationPoint>& table, Probe probe) {
  const std::string name = to_string(probe);
  if (table.empty()) throw MissingProbeError("calibration has no samples for probe '" + name + "'");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].location_mm > table[i - 1].location_mm)) {
      std::ostringstream os;
      os << "probe '" << name << "': location " << table[i].location_mm
         << " mm does not increase after " << table[i - 1].location_mm << " mm";
      throw NonMonotoneLocationError(os.str());
    }
  }
  if (table.front().location_mm != 0.0 || table.back().location_mm != kSensorLengthMm) {
    throw ConfigError("probe '" + name + "': samples must span [0, 140] mm");
  }
  for (const auto& s : table) {
    if (!std::isfinite(s.voltage)) throw ConfigError("probe '" + name + "': non-finite voltage");
  }
}

std::vector<CalibrationPoint> read_rows(const text::Table* table) {
  std::vector<CalibrationPoint> out;
  if (!table) return out;
  table->require_known_keys({});
  for (const auto& row : table->rows) {
    if (row.values.size() != 2) {
      throw ParseError(table->where(row.line) + ": expected 'location_mm, voltage'");
    }
    out.push_back({row.values[0], row.values[1]});
  }
  return out;
}

double interpolate(const std::vector<CalibrationPoint>& table, double location_mm) {
  auto upper = std::upper_bound(table.begin(), table.end(), location_mm,
                                [](double loc, const CalibrationPoint& s) { return loc < s.location_mm; });
  if (upper == table.begin()) return table.front().voltage;
  if (upper == table.end()) return table.back().voltage;
  const auto& hi = *upper;
  const auto& lo = *(upper - 1);
  if (location_mm == lo.location_mm) return lo.voltage;
  const double w = (location_mm - lo.location_mm) / (hi.location_mm - lo.location_mm);
  return lo.voltage + w * (hi.voltage - lo.voltage);
}

}  // namespace

void validate(const SensorMap& map) {
  validate_table(map.point, Probe::point);
  validate_table(map.cylinder, Probe::cylinder);
  if (!(map.baseline_voltage > 0.0)) throw ConfigError("baseline_voltage must be > 0");
  if (!(map.fingertip_voltage > map.min_voltage() && map.fingertip_voltage < map.max_voltage())) {
    throw ConfigError("fingertip_voltage must lie strictly inside the calibrated voltage range");
  }
  if (!(map.activation_force_cyl > 0.0) || !(map.activation_force_flat > 0.0)) {
    throw ConfigError("activation forces must be > 0");
  }
  if (!(map.contact_deadband >= 0.0)) throw ConfigError("contact_deadband must be >= 0");
}

SensorMap parse_sensor_map(std::string_view text, std::string_view origin) {
  const auto doc = text::parse(text, origin);
  doc.require_known_sections({"point", "cylinder"});
  SensorMap map;
  if (const auto* root = doc.find("")) {
    root->require_known_keys({"baseline_voltage", "fingertip_voltage", "activation_force_cyl",
                              "activation_force_flat", "contact_deadband"});
    map.baseline_voltage = root->number_or("baseline_voltage", map.baseline_voltage);
    map.fingertip_voltage = root->number_or("fingertip_voltage", map.fingertip_voltage);
    map.activation_force_cyl = root->number_or("activation_force_cyl", map.activation_force_cyl);
    map.activation_force_flat = root->number_or("activation_force_flat", map.activation_force_flat);
    map.contact_deadband = root->number_or("contact_deadband", map.contact_deadband);
  }
  for (const char* name : {"point", "cylinder"}) {
    if (doc.all(name).size() > 1) throw ParseError(std::string(origin) + ": repeated section [" + name + "]");
  }
  map.point = read_rows(doc.find("point"));
  map.cylinder = read_rows(doc.find("cylinder"));
  validate(map);
  return map;
}

SensorMap load_sensor_map(const std::filesystem::path& path) {
  return parse_sensor_map(text::read_file(path), path.string());
}

const SensorMap& default_sensor_map() {
  static const SensorMap map = parse_sensor_map(default_calibration_text(), "<default calibration>");
  return map;
}

double contact_to_voltage(const SensorMap& map, double location_mm, double force_n, Probe probe) {
  if (!(location_mm >= 0.0 && location_mm <= kSensorLengthMm)) {
    std::ostringstream os;
    os << "contact location " << location_mm << " mm outside [0, 140] mm";
    throw OutOfRangeLocation(os.str());
  }
  if (force_n < map.activation_force(probe)) return map.baseline_voltage;
  return interpolate(map.samples(probe), location_mm);
}

double pressure_from_force(double force_n, double k_p, double p_sat) {
  return std::min(p_sat, k_p * std::max(0.0, force_n));
}

SensorFrame make_frame(const SensorMap& map, double t, double p, double v_x) {
  return {t, p, v_x, std::abs(v_x - map.baseline_voltage) > map.contact_deadband};
}

ContactState classify_contact(const SensorMap& map, const SensorFrame& frame, double p_g) {
  ContactState state;
  state.voltage = frame.v_x;
  state.grasped = frame.p > p_g;
  if (std::abs(frame.v_x - map.baseline_voltage) <= map.contact_deadband) return state;

  double x = 0.0;
  if (frame.v_x > map.fingertip_voltage) {
    state.side = Side::dorsal;
    x = (map.max_voltage() - frame.v_x) / (map.max_voltage() - map.fingertip_voltage);
  } else {
    state.side = Side::palmar;
    x = (frame.v_x - map.min_voltage()) / (map.fingertip_voltage - map.min_voltage());
  }
  state.clamped = x < 0.0 || x > 1.0;
  state.x = std::clamp(x, 0.0, 1.0);
  return state;
}

}  // namespace reflexgrip::sensors
