// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wapat/experiments.hpp"

using namespace wapat;

namespace {

WaveData noisy_trace(std::size_t nt, std::size_t ns, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  WaveData d(DataKind::AttenuatedPressure, TimeGrid::from_duration(6.0, nt), make_circle_sensors(1.7, ns));
  for (double& v : d.values) v = u(rng);
  return d;
}

/// Reduced constant-law circle scenario, a few seconds end to end.
ScenarioConfig small_config() {
  ScenarioConfig c;
  c.name = "small";
  c.model = ConstantLaw{0.45};
  c.geometry.kind = GeometryKind::Circle;
  c.duration = 6.0;
  c.forward_times = 250;
  c.forward_sensors = 300;
  c.inverse_times = 221;
  c.inverse_sensors = 283;
  c.phantom_grid = 128;
  c.image_size = 48;
  c.forward_order = 8;
  c.forward_quadrature = {200.0, 4000};
  c.taylor_order = 6;
  c.inverse_quadrature = {200.0, 3000};
  return c;
}

}  // namespace

TEST_CASE("noise has the configured standard deviation") {
  const WaveData clean = noisy_trace(443, 256, 1);
  CHECK(add_noise(clean, 0.0, 7).values == clean.values);
  const WaveData a = add_noise(clean, 0.2, 7);
  CHECK(a.values == add_noise(clean, 0.2, 7).values);
  CHECK(a.values != add_noise(clean, 0.2, 8).values);

  double peak = 0.0, sum = 0.0, sum2 = 0.0, bound = 0.0;
  for (double v : clean.values) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double e = a.values[i] - clean.values[i];
    sum += e;
    sum2 += e * e;
    bound = std::max(bound, std::abs(e));
  }
  const double n = static_cast<double>(a.values.size());
  REQUIRE(n >= 1e5);
  const double std = std::sqrt(sum2 / n - (sum / n) * (sum / n));
  CHECK(std::abs(std - 0.2 * peak) <= 0.02 * 0.2 * peak);
  CHECK(bound <= 0.2 * peak * std::sqrt(3.0));
  CHECK_THROWS_AS(add_noise(clean, -0.1, 1), InputError);
}

TEST_CASE("resampling reproduces identity, constants and linears") {
  const WaveData d = noisy_trace(100, 64, 2);
  CHECK(resample_data(d, d.time, d.sensors).values == d.values);

  const TimeGrid tc = TimeGrid::from_duration(6.0, 77);
  const SensorArray sc = make_circle_sensors(1.7, 50);
  WaveData lin = d;
  for (std::size_t i = 0; i < d.num_times(); ++i)
    for (std::size_t j = 0; j < d.num_sensors(); ++j) lin.at(i, j) = 2.5 - 0.75 * d.time.time(i);
  const WaveData r = resample_data(lin, tc, sc);
  CHECK(r.kind == lin.kind);
  for (std::size_t i = 0; i < tc.count; ++i)
    for (std::size_t j = 0; j < sc.size(); ++j) CHECK(r.at(i, j) == doctest::Approx(2.5 - 0.75 * tc.time(i)).epsilon(1e-12));
}

TEST_CASE("resampling along a line is exact for data linear in x") {
  const TimeGrid t = TimeGrid::from_duration(8.0, 40);
  WaveData d(DataKind::Pressure, t, make_line_sensors(10.2, 1.7, 96));
  for (std::size_t i = 0; i < t.count; ++i)
    for (std::size_t j = 0; j < 96; ++j) d.at(i, j) = 1.0 + 0.3 * d.sensors.points[j].x + t.time(i);
  const SensorArray coarse = make_line_sensors(10.2, 1.7, 85);
  const WaveData r = resample_data(d, TimeGrid::from_duration(8.0, 33), coarse);
  for (std::size_t i = 0; i < r.num_times(); ++i)
    for (std::size_t j = 0; j < 85; ++j)
      CHECK(r.at(i, j) == doctest::Approx(1.0 + 0.3 * coarse.points[j].x + r.time.time(i)).epsilon(1e-12));
}

TEST_CASE("circle resampling is periodic in the angle") {
  const TimeGrid t = TimeGrid::from_duration(6.0, 20);
  const std::size_t n = 896;
  WaveData d(DataKind::Pressure, t, make_circle_sensors(1.7, n));
  const std::vector<double> th = d.sensors.arc_parameter();
  for (std::size_t i = 0; i < t.count; ++i)
    for (std::size_t j = 0; j < n; ++j) d.at(i, j) = std::cos(th[j]);
  const SensorArray target = make_circle_sensors(1.7, 849);
  const std::vector<double> tt = target.arc_parameter();
  const WaveData r = resample_data(d, t, target);
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < target.size(); ++j) CHECK(std::abs(r.at(3, j) - std::cos(tt[j])) <= h * h / 8.0 + 1e-12);
}

TEST_CASE("resampling errors") {
  const WaveData d = noisy_trace(100, 64, 3);
  CHECK_THROWS_AS(resample_data(d, TimeGrid::from_duration(6.0, 120), d.sensors), InputError);
  CHECK_THROWS_AS(resample_data(d, d.time, make_circle_sensors(1.7, 80)), InputError);
  CHECK_THROWS_AS(resample_data(d, TimeGrid::from_duration(7.0, 90), d.sensors), InputError);
  CHECK_THROWS_AS(resample_data(d, d.time, make_line_sensors(10.2, 1.7, 32)), InputError);
}

TEST_CASE("relative L2 error") {
  Image2D truth(ImageGrid::square(16, 1.0));
  for (std::size_t i = 0; i < truth.values.size(); ++i) truth.values[i] = std::sin(0.1 * static_cast<double>(i)) + 0.5;
  Image2D twice = truth, zero(truth.grid);
  for (double& v : twice.values) v *= 2.0;
  CHECK(rel_l2_error(truth, truth) == 0.0);
  CHECK(rel_l2_error(twice, truth) == doctest::Approx(1.0));
  CHECK(rel_l2_error(zero, truth) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rel_l2_error(truth, zero), InputError);
  CHECK_THROWS_AS(rel_l2_error(Image2D(ImageGrid::square(8, 1.0)), truth), InputError);

  std::vector<char> mask(truth.values.size(), 0);
  mask[5] = 1;
  Image2D off = truth;
  off.values[6] += 10.0;
  CHECK(rel_l2_error(off, truth, &mask) == 0.0);
}

TEST_CASE("cross sections") {
  Image2D c(ImageGrid::square(20, 1.0));
  std::fill(c.values.begin(), c.values.end(), 0.7);
  const CrossSection s = cross_section(c, Axis::X, 0.3);
  CHECK(s.values.size() == 20);
  for (double v : s.values) CHECK(v == 0.7);
  CHECK(s.coordinate.front() == doctest::Approx(-0.95));

  const Image2D sl = rasterize(make_shepp_logan(256, 1.0), ImageGrid::square(128, 1.0), 1);
  const CrossSection mid = cross_section(sl, Axis::X, 0.0);
  auto contains = [&](double plateau) {
    return std::any_of(mid.values.begin(), mid.values.end(), [&](double v) { return std::abs(v - plateau) < 1e-12; });
  };
  CHECK(contains(2.0));   // skull
  CHECK(contains(1.02));  // brain
  CHECK(contains(1.0));   // ventricles

  const Image2D disk = rasterize(make_disk(0.5, 1.0, 64, 1.0), ImageGrid::square(40, 1.0), 3);
  const CrossSection sym = cross_section(disk, Axis::X, 0.1);
  CHECK(sym.values == std::vector<double>(sym.values.rbegin(), sym.values.rend()));
  const CrossSection col = cross_section(sl, Axis::Y, 0.0);
  CHECK(col.values.size() == 128);
  CHECK(col.coordinate.front() == doctest::Approx(sl.grid.origin.y));

  CHECK_THROWS_AS(cross_section(c, Axis::X, 1.2), InputError);
  CHECK_THROWS_AS(cross_section(c, Axis::Y, -1.01), InputError);
}

TEST_CASE("scenario configs are validated") {
  ScenarioConfig c = small_config();
  CHECK_NOTHROW(c.check());
  c.inverse_times = c.forward_times;
  c.inverse_sensors = c.forward_sensors;
  CHECK_THROWS_AS(c.check(), InputError);
  c.avoid_inverse_crime = false;
  CHECK_NOTHROW(c.check());
  CHECK(c.inverse_time() == c.forward_time());

  ScenarioConfig bad = small_config();
  bad.geometry.radius = 1.2;
  CHECK_THROWS_AS(bad.check(), InputError);
  bad = small_config();
  bad.model = PowerLaw{0.005, 2.0};
  CHECK_THROWS_AS(run_scenario(bad), UnsupportedError);
}

TEST_CASE("scenario errors name the failing stage") {
  ScenarioConfig c = small_config();
  c.model = PowerLaw{0.005, 2.0};
  try {
    (void)simulate_scenario(c);
    FAIL("expected UnsupportedError");
  } catch (const UnsupportedError& e) {
    CHECK(std::string(e.what()).rfind("build_system: ", 0) == 0);
  }
}

TEST_CASE("scenarios are deterministic and avoid the inverse crime") {
  ScenarioConfig c = small_config();
  c.noise = 0.2;
  c.seed = 42;
  const ScenarioResult a = run_scenario(c);
  const ScenarioResult b = run_scenario(c);
  CHECK(a.data.values == b.data.values);
  for (const char* m : {"naive", "full"}) {
    CHECK(a.methods.at(m).image.values == b.methods.at(m).image.values);
    CHECK(a.error(m) == b.error(m));
  }
  CHECK(a.methods.count("compensated") == 0);
  CHECK(a.data.num_times() == 221);
  CHECK(a.data.num_sensors() == 283);

  c.noise = 0.0;
  const ScenarioResult avoided = run_scenario(c);
  CHECK(avoided.error("full") < avoided.error("naive"));
  c.avoid_inverse_crime = false;
  const ScenarioResult crime = run_scenario(c);
  CHECK(crime.data.num_times() == 250);
  MESSAGE("full error: avoided " << avoided.error("full") << ", crime " << crime.error("full"));
  CHECK(crime.error("full") >= 0.7 * avoided.error("full"));
}

TEST_CASE("constant circle scenario recovers the plateau") {
  ScenarioConfig c;
  c.name = "constant-circle";
  const ScenarioResult r = run_scenario(c);
  CHECK(r.error("naive") > r.error("full"));
  // The skull rim is one or two pixels wide in the truth row; the plateau is
  // the brain interior (1.0 and 1.02) away from jumps.
  const std::vector<double>& t = r.truth_section.values;
  std::size_t plateau = 0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const bool flat = t[i - 1] == t[i] && t[i + 1] == t[i];
    if (flat && (std::abs(t[i] - 1.0) < 1e-12 || std::abs(t[i] - 1.02) < 1e-12)) {
      ++plateau;
      CHECK(std::abs(r.methods.at("full").section.values[i] - t[i]) <= 0.15 * t[i]);
    }
  }
  CHECK(plateau >= 40);
}
