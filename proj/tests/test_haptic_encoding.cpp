#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "reflexgrip/errors.hpp"
#include "reflexgrip/haptic_encoding.hpp"

using namespace reflexgrip;
using namespace reflexgrip::haptics;
using sensors::ContactState;
using sensors::Side;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ContactState contact(Side side, double x, bool grasped = false, double v = 1.0) {
  ContactState c;
  c.side = side;
  c.x = x;
  c.grasped = grasped;
  c.voltage = v;
  return c;
}

// Magnitude of the discrete-time Fourier transform at frequency f.
double dft_magnitude(const std::vector<VibSample>& s, double f) {
  double re = 0.0;
  double im = 0.0;
  for (const auto& v : s) {
    re += v.current * std::cos(2.0 * kPi * f * v.t);
    im -= v.current * std::sin(2.0 * kPi * f * v.t);
  }
  return std::hypot(re, im);
}

// Times of rising zero crossings, linearly interpolated.
std::vector<double> rising_crossings(const std::vector<VibSample>& s) {
  std::vector<double> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1].current < 0.0 && s[i].current >= 0.0) {
      const double w = -s[i - 1].current / (s[i].current - s[i - 1].current);
      out.push_back(s[i - 1].t + w * (s[i].t - s[i - 1].t));
    }
  }
  return out;
}

BellowCalibration unit_calibration() {
  BellowCalibration cal;
  for (int i = 0; i <= kBellowCount; ++i) cal.nu[i] = i;
  cal.tau = {0.5, 1.25, 2.75, 3.5, 4.25, 5.75, 6.5, 7.25};
  return cal;
}

// E_p(1/12 s) = 0.25 sin(pi/2) + 0.75 = 1.
constexpr double kEnvelopePeak = 1.0 / 12.0;

}  // namespace

TEST_CASE("vibration amplitude") {
  CHECK(vib_amplitude(0.0) == 0.5);
  CHECK(vib_amplitude(1.0) == 0.0);
  CHECK(vib_amplitude(0.75) == 0.25);
  CHECK_THROWS_AS(vib_amplitude(-0.01), OutOfRange);
  CHECK_THROWS_AS(vib_amplitude(1.01), OutOfRange);
}

TEST_CASE("grasp frequency ramp") {
  CHECK(grasp_frequency(std::nullopt) == 250.0);
  CHECK(grasp_frequency(0.0) == 250.0);
  CHECK(grasp_frequency(1.0) == 200.0);
  CHECK(grasp_frequency(2.0) == 150.0);
  CHECK(grasp_frequency(3.0) == 150.0);
}

TEST_CASE("vib_sample examples") {
  const GraspRampState ramp;
  // sin(2 pi 250 t) = 1 at t = 1 ms.
  CHECK(vib_sample(0.001, contact(Side::dorsal, 0.0), ramp) == Approx(0.5).epsilon(1e-12));
  CHECK(vib_sample(0.001, ContactState{}, ramp) == 0.0);
  // |sin(2 pi 4.75 t)| = 0 at t = 0 and t = 1 / 9.5.
  for (double x : {0.0, 0.3, 0.9}) {
    CHECK(vib_sample(0.0, contact(Side::palmar, x), ramp) == 0.0);
    CHECK(std::abs(vib_sample(1.0 / 9.5, contact(Side::palmar, x), ramp)) < 1e-12);
  }
}

TEST_CASE("waveform stays within A0") {
  VibEncoder enc;
  for (int k = 0; k < 3000; ++k) {
    const double t = k * 0.001;
    const bool grasped = (k / 700) % 2 == 1;
    const Side side = k % 900 < 450 ? Side::palmar : Side::dorsal;
    enc.update(t, contact(side, (k % 101) / 100.0, grasped));
    for (const auto& s : enc.render(t, t + 0.001)) CHECK(std::abs(s.current) <= 0.5);
  }
}

TEST_CASE("dorsal peak and spectrum") {
  VibEncoder enc;
  for (double x : {0.0, 0.3, 0.75}) {
    enc.update(0.0, contact(Side::dorsal, x));
    const auto s = enc.render(0.0, 1.0);
    REQUIRE(s.size() == 8000);
    double peak = 0.0;
    for (const auto& v : s) peak = std::max(peak, std::abs(v.current));
    CHECK(peak == Approx(0.5 * std::sqrt(1.0 - x)).epsilon(0.01));

    double best_f = 0.0;
    double best = -1.0;
    for (int f = 100; f <= 400; ++f) {
      const double m = dft_magnitude(s, f);
      if (m > best) {
        best = m;
        best_f = f;
      }
    }
    CHECK(best_f == 250.0);
  }
}

TEST_CASE("dorsal carrier ignores the grasp ramp") {
  VibEncoder enc;
  enc.update(0.0, contact(Side::dorsal, 0.0, true));
  const auto c = rising_crossings(enc.render(0.5, 1.5));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(1.0 / (c[i] - c[i - 1]) == Approx(250.0).margin(2.0));
}

TEST_CASE("palmar carrier follows the ramp") {
  VibEncoder enc;
  enc.update(0.0, contact(Side::palmar, 0.2, false));
  enc.update(0.5, contact(Side::palmar, 0.2, true));
  const VibConfig cfg;
  const auto s = enc.render(0.0, 3.0);
  const auto c = rising_crossings(s);
  int checked = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double mid = 0.5 * (c[i] + c[i - 1]);
    // Skip periods straddling an envelope zero or the grasp onset.
    if (palmar_envelope(c[i - 1], cfg) < 0.2 || palmar_envelope(c[i], cfg) < 0.2) continue;
    if (c[i - 1] < 0.5 && c[i] > 0.5) continue;
    const double expected = mid < 0.5 ? 250.0 : grasp_frequency(mid - 0.5);
    INFO("t = " << mid);
    CHECK(1.0 / (c[i] - c[i - 1]) == Approx(expected).margin(2.0));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("phase is continuous across grasp changes") {
  VibEncoder enc;
  enc.update(0.0, contact(Side::palmar, 0.0, false));
  const double before = enc.sample(0.3);
  enc.update(0.3, contact(Side::palmar, 0.0, true));
  CHECK(enc.sample(0.3) == Approx(before).margin(1e-12));
  const double grasped = enc.sample(1.1);
  enc.update(1.1, contact(Side::palmar, 0.0, false));
  CHECK(enc.sample(1.1) == Approx(grasped).margin(1e-12));
  CHECK(enc.ramp().f_current == 250.0);
}

TEST_CASE("palmar envelope zeros are 1/9.5 s apart") {
  VibEncoder enc;
  enc.update(0.0, contact(Side::palmar, 0.0));
  const auto s = enc.render(0.0, 2.0);
  // Mean power over one 4 ms carrier period.
  const int w = 32;
  std::vector<double> power(s.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += s[i].current * s[i].current;
    if (i >= static_cast<std::size_t>(w)) acc -= s[i - w].current * s[i - w].current;
    power[i] = acc / w;
  }
  std::vector<double> minima;
  // Minima over a +/-25 ms neighbourhood; ripple from the carrier is shorter.
  const std::size_t r = 200;
  for (std::size_t i = r; i + r < s.size(); ++i) {
    const auto lo = power.begin() + static_cast<long>(i - r);
    const auto hi = power.begin() + static_cast<long>(i + r + 1);
    if (std::min_element(lo, hi) == power.begin() + static_cast<long>(i)) {
      minima.push_back(s[i].t - 0.5 * (w - 1) / 8000.0);  // centre of the averaging window
    }
  }
  REQUIRE(minima.size() >= 16);
  for (std::size_t i = 1; i < minima.size(); ++i) {
    CHECK(std::abs((minima[i] - minima[i - 1]) - 1.0 / 9.5) <= 0.001);
  }
}

TEST_CASE("default bellow calibration") {
  const auto cal = BellowCalibration::from_sensor_map(sensors::default_sensor_map());
  CHECK_NOTHROW(cal.validate());
  CHECK(cal.nu.front() == Approx(0.20));
  CHECK(cal.nu[4] == 1.65);
  CHECK(cal.nu.back() == Approx(3.30));
  for (int i = 0; i < kBellowCount; ++i) CHECK(cal.tau[i] == Approx(0.5 * (cal.nu[i] + cal.nu[i + 1])));
}

TEST_CASE("bellow regions") {
  const auto cal = unit_calibration();

  SECTION("tent peak at tau") {
    for (int i = 1; i <= kBellowCount; ++i) {
      const auto r = bellow_region(cal.tau[i - 1], cal);
      CHECK(r.index == i);
      CHECK(r.gamma == 1.0);
      CHECK(r.gamma_neighbor == 0.0);
    }
  }
  SECTION("even split at interior boundaries from either side") {
    for (int i = 1; i < kBellowCount; ++i) {
      const auto upper = bellow_region(cal.nu[i], cal);
      const auto lower = bellow_gains_in_region(i, cal.nu[i], cal);
      CHECK(upper.index == i + 1);
      CHECK(upper.gamma == 0.5);
      CHECK(*upper.neighbor == i);
      CHECK(lower.index == i);
      CHECK(lower.gamma == 0.5);
      CHECK(*lower.neighbor == i + 1);
    }
  }
  SECTION("edge bellows") {
    const auto first = bellow_region(0.2, cal);
    CHECK(first.index == 1);
    CHECK(first.gamma == 1.0);
    CHECK_FALSE(first.neighbor);
    const auto last = bellow_region(8.0, cal);
    CHECK(last.index == 8);
    CHECK_FALSE(last.neighbor);
  }
  SECTION("outside the calibrated range") {
    CHECK_THROWS_AS(bellow_region(-0.01, cal), VoltageOutOfRange);
    CHECK_THROWS_AS(bellow_region(8.01, cal), VoltageOutOfRange);
  }
}

TEST_CASE("literal gain law at hand-evaluated points") {
  auto cal = unit_calibration();
  cal.literal_eq3 = true;
  struct Probe {
    double v;
    int index;
    double gamma;
    int neighbor;  // 0 for none
  };
  const Probe probes[] = {
      {0.2, 1, 1.0, 0},         {0.5, 1, 0.5, 2},         {0.75, 1, 0.75, 2},   {1.0, 2, 0.5, 1},
      {1.125, 2, 0.75, 1},      {1.25, 2, 0.5, 3},        {1.625, 2, 0.75, 3},  {2.5, 3, 5.0 / 6.0, 2},
      {2.875, 3, 0.75, 4},      {3.25, 4, 0.75, 3},       {3.75, 4, 0.75, 5},   {4.0, 5, 0.5, 4},
      {4.5, 5, 2.0 / 3.0, 6},   {5.5, 6, 5.0 / 6.0, 5},   {5.875, 6, 0.75, 7},  {6.25, 7, 0.75, 6},
      {6.75, 7, 0.75, 8},       {7.0, 8, 0.5, 7},         {7.125, 8, 0.75, 7},  {7.5, 8, 1.0, 0},
  };
  for (const auto& p : probes) {
    INFO("V_x = " << p.v);
    const auto r = bellow_region(p.v, cal);
    CHECK(r.index == p.index);
    CHECK(std::abs(r.gamma - p.gamma) <= 1e-12);
    CHECK(r.neighbor.value_or(0) == p.neighbor);
    if (p.neighbor) CHECK(std::abs(r.gamma_neighbor - (1.0 - p.gamma)) <= 1e-12);

    const auto f = bellow_frame(kEnvelopePeak, contact(Side::palmar, 0.5, false, p.v), cal);
    CHECK(std::abs(f.pressures[p.index - 1] - (0.7 * p.gamma + 0.1)) <= 1e-12);
  }
}

TEST_CASE("bellow frame examples") {
  const auto cal = unit_calibration();
  const double t = kEnvelopePeak;
  REQUIRE(pressure_envelope(t, cal) == Approx(1.0).epsilon(1e-15));

  const auto peak = bellow_frame(t, contact(Side::palmar, 0.5, false, 2.75), cal);
  CHECK(peak.pressures[2] == Approx(0.8).epsilon(1e-12));
  const auto grasped = bellow_frame(t, contact(Side::palmar, 0.5, true, 2.75), cal);
  CHECK(grasped.pressures[2] == Approx(1.5).epsilon(1e-12));
  const auto split = bellow_frame(t, contact(Side::palmar, 0.5, false, 3.0), cal);
  CHECK(split.pressures[2] == Approx(0.45).epsilon(1e-12));
  CHECK(split.pressures[3] == Approx(0.45).epsilon(1e-12));

  for (double tt = 0.0; tt < 1.0; tt += 0.01) {
    const auto idle = bellow_frame(tt, ContactState{}, cal);
    for (double p : idle.pressures) CHECK(p == 0.1);
  }
}

TEST_CASE("bellow sweep properties") {
  const auto cal = BellowCalibration::from_sensor_map(sensors::default_sensor_map());
  const double lo = cal.nu.front();
  const double hi = cal.nu.back();

  auto max_step = [&](int n, bool grasped, const BellowCalibration& c) {
    double worst = 0.0;
    std::array<double, kBellowCount> prev{};
    for (int k = 0; k <= n; ++k) {
      const double v = lo + (hi - lo) * k / n;
      const auto r = bellow_region(v, c);
      CHECK(r.gamma + r.gamma_neighbor == 1.0);
      if (r.neighbor) CHECK(std::abs(*r.neighbor - r.index) == 1);

      const auto f = bellow_frame(kEnvelopePeak, contact(Side::palmar, 0.5, grasped, v), c);
      int active = 0;
      for (int b = 0; b < kBellowCount; ++b) {
        if (f.pressures[b] != c.p_min) {
          ++active;
          CHECK((b + 1 == r.index || (r.neighbor && b + 1 == *r.neighbor)));
        }
        if (k > 0) worst = std::max(worst, std::abs(f.pressures[b] - prev[b]));
      }
      CHECK(active <= 2);
      prev = f.pressures;
    }
    return worst;
  };

  for (bool grasped : {false, true}) {
    const double coarse = max_step(10000, grasped, cal);
    const double fine = max_step(100000, grasped, cal);
    CHECK(coarse < 0.01);
    CHECK(fine < 0.2 * coarse);
  }

  auto literal = cal;
  literal.literal_eq3 = true;
  CHECK(max_step(100000, false, literal) > 0.2);
}

TEST_CASE("grasped pressure dominates contact-only pointwise") {
  const auto cal = BellowCalibration::from_sensor_map(sensors::default_sensor_map());
  for (int k = 0; k <= 1000; ++k) {
    const double v = cal.nu.front() + (cal.nu.back() - cal.nu.front()) * k / 1000.0;
    const double t = k * 0.0007;
    const auto a = bellow_frame(t, contact(Side::palmar, 0.5, false, v), cal);
    const auto b = bellow_frame(t, contact(Side::palmar, 0.5, true, v), cal);
    for (int i = 0; i < kBellowCount; ++i) CHECK(b.pressures[i] >= a.pressures[i]);
  }
}

TEST_CASE("bellow encoder holds frames between updates") {
  BellowEncoder enc(unit_calibration());
  const auto c = contact(Side::palmar, 0.5, false, 2.75);
  const auto first = enc.update(0.0, c).pressures;
  for (int k = 1; k < 4; ++k) CHECK(enc.update(k * 0.001, c).pressures == first);
  CHECK(enc.update(0.004, c).pressures != first);
}
