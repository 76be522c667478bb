// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wapat/experiments.hpp"
#include "wapat/reconstruction.hpp"
#include "wapat/wavefield.hpp"

using namespace wapat;

namespace {

WaveData random_pressure(const TimeGrid& tg, const SensorArray& s, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WaveData p(DataKind::Pressure, tg, s);
  for (double& v : p.values) v = u(rng);
  return p;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

/// Lossless disk data at reduced resolution, shared across tests.
struct DiskCase {
  Phantom phantom = make_disk(0.4, 1.0, 128, 1.0, 2);
  TimeGrid time = TimeGrid::from_duration(6.0, 443);
  SensorArray sensors = make_circle_sensors(1.7, 400);
  ImageGrid grid = ImageGrid::square(48, 1.0);
  WaveData p = spectral_forward(phantom, time, sensors);
  Image2D truth = rasterize(phantom, grid, 4);
};

const DiskCase& disk_case() {
  static const DiskCase c;
  return c;
}

std::vector<char> support(const Image2D& truth) {
  std::vector<char> m;
  for (double v : truth.values) m.push_back(v != 0.0 ? 1 : 0);
  return m;
}

WaveData constant_attenuated(const WaveData& p, double k_inf) {
  WaveData q = time_integrate(p);
  for (std::size_t i = 0; i < q.num_times(); ++i)
    for (std::size_t j = 0; j < q.num_sensors(); ++j) q.at(i, j) *= std::exp(-k_inf * q.time.time(i));
  q.kind = DataKind::AttenuatedIntegrated;
  return time_differentiate(q);
}

SphericalTraces ball_traces(const SphericalArray& a, Vec3 centre, double r0, const TimeGrid& tg, bool integrated) {
  SphericalTraces tr{tg, a, std::vector<double>(tg.count * a.size())};
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = norm(a.points[j] - centre);
    for (std::size_t i = 0; i < tg.count; ++i) {
      const double t = tg.time(i);
      tr.values[i * a.size() + j] = integrated ? ball_nwave_integrated(r0, d, t) : ball_nwave_pressure(r0, d, t);
    }
  }
  return tr;
}

// The N-wave jumps, so the time step has to be comparable to the sensor
// spacing (about 0.27 for 500 points at R = 1.7) or the derivative spikes
// alias between sensors.
const TimeGrid kBallTime = TimeGrid::from_duration(4.0, 80);

}  // namespace

TEST_CASE("time integration") {
  const TimeGrid tg = TimeGrid::from_duration(6.0, 443);
  const SensorArray s = make_circle_sensors(1.7, 8);
  WaveData ones(DataKind::Pressure, tg, s);
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  const WaveData q = time_integrate(ones);
  CHECK(q.kind == DataKind::Integrated);
  for (std::size_t i = 0; i < tg.count; ++i) CHECK(q.at(i, 5) == doctest::Approx(static_cast<double>(i + 1) * tg.dt));

  const WaveData zero = time_integrate(WaveData(DataKind::AttenuatedPressure, tg, s));
  CHECK(zero.kind == DataKind::AttenuatedIntegrated);
  for (double v : zero.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(time_integrate(q), InputError);
}

TEST_CASE("time integration of the N-wave matches the analytic integral") {
  const TimeGrid tg = TimeGrid::from_duration(6.0, 443);
  WaveData p(DataKind::Pressure, tg, make_circle_sensors(1.7, 8));
  for (std::size_t i = 0; i < tg.count; ++i)
    for (std::size_t j = 0; j < 8; ++j) p.at(i, j) = ball_nwave_pressure(0.5, 1.7, tg.time(i));
  const WaveData q = time_integrate(p);
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < tg.count; ++i) {
    err = std::max(err, std::abs(q.at(i, 0) - ball_nwave_integrated(0.5, 1.7, tg.time(i))));
    peak = std::max(peak, q.at(i, 0));
  }
  CHECK(err <= tg.dt * 0.5 / 3.4 * 2.0);
  CHECK(peak == doctest::Approx(0.25 / 6.8).epsilon(0.01));
}

TEST_CASE("time differentiation") {
  const TimeGrid tg = TimeGrid::from_duration(2.0, 100);
  const SensorArray s = make_circle_sensors(1.0, 8);
  WaveData ramp(DataKind::Integrated, tg, s), square(DataKind::Integrated, tg, s);
  for (std::size_t i = 0; i < tg.count; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      ramp.at(i, j) = static_cast<double>(i + 1) * tg.dt;
      square.at(i, j) = tg.time(i) * tg.time(i);
    }
  const WaveData one = time_differentiate(ramp);
  CHECK(one.kind == DataKind::Pressure);
  for (double v : one.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const WaveData lin = time_differentiate(square);
  for (std::size_t i = 0; i < tg.count; ++i) CHECK(lin.at(i, 2) == doctest::Approx(2.0 * tg.time(i) - tg.dt).epsilon(1e-12));

  CHECK_THROWS_AS(time_differentiate(WaveData(DataKind::Integrated, {0.1, 1}, s)), InputError);
  CHECK_THROWS_AS(time_differentiate(WaveData(DataKind::Pressure, tg, s)), InputError);
}

TEST_CASE("differentiate after integrate is the identity") {
  const TimeGrid tg = TimeGrid::from_duration(6.0, 443);
  const WaveData p = random_pressure(tg, make_circle_sensors(1.7, 32), 11);
  const WaveData back = time_differentiate(time_integrate(p));
  CHECK(back.kind == DataKind::Pressure);
  double err = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) err = std::max(err, std::abs(back.values[i] - p.values[i]));
  CHECK(err <= 1e-14 * 443);
}

TEST_CASE("2D back-projection is linear and vanishes on zero data") {
  const TimeGrid tg = TimeGrid::from_duration(3.0, 120);
  const SensorArray s = make_circle_sensors(1.2, 64);
  const ImageGrid grid = ImageGrid::square(16, 0.8);
  const WaveData a = random_pressure(tg, s, 1), b = random_pressure(tg, s, 2);
  WaveData zero(DataKind::Pressure, tg, s);
  for (double v : ubp_2d(zero, grid).values) CHECK(v == 0.0);

  WaveData a3 = a, sum = a;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    a3.values[i] = 3.0 * a.values[i];
    sum.values[i] = a.values[i] + b.values[i];
  }
  const Image2D ha = ubp_2d(a, grid), hb = ubp_2d(b, grid);
  std::vector<double> h3 = ha.values, hsum = ha.values;
  for (std::size_t i = 0; i < h3.size(); ++i) {
    h3[i] = 3.0 * ha.values[i];
    hsum[i] = ha.values[i] + hb.values[i];
  }
  CHECK(rel_diff(ubp_2d(a3, grid).values, h3) <= 1e-12);
  CHECK(rel_diff(ubp_2d(sum, grid).values, hsum) <= 1e-12);
  CHECK(ha.method == "naive-ubp");
  CHECK(ha.fingerprint == data_fingerprint(a));
}

TEST_CASE("2D back-projection rejects points outside the measurement curve") {
  const TimeGrid tg = TimeGrid::from_duration(3.0, 50);
  const WaveData c = random_pressure(tg, make_circle_sensors(1.2, 64), 3);
  CHECK_THROWS_AS(ubp_2d(c, ImageGrid::square(16, 1.0)), InputError);
  const WaveData l = random_pressure(tg, make_line_sensors(4.0, 0.5, 64), 3);
  CHECK_THROWS_AS(ubp_2d(l, ImageGrid::square(16, 1.0)), InputError);
  CHECK_NOTHROW(ubp_2d(l, ImageGrid{16, 16, 0.05, {-0.4, -0.45}}));
}

TEST_CASE("2D back-projection is schedule independent") {
  const TimeGrid tg = TimeGrid::from_duration(3.0, 120);
  const WaveData p = random_pressure(tg, make_circle_sensors(1.2, 64), 5);
  UbpOptions serial, parallel;
  serial.execution = Execution::Serial;
  parallel.execution = Execution::Parallel;
  CHECK(ubp_2d(p, ImageGrid::square(24, 0.8), serial).values == ubp_2d(p, ImageGrid::square(24, 0.8), parallel).values);
}

TEST_CASE("lossless disk round trip and quadrature convergence") {
  const DiskCase& c = disk_case();
  const Image2D h = ubp_2d(c.p, c.grid);
  const std::vector<char> mask = support(c.truth);
  CHECK(rel_l2_error(h, c.truth, &mask) <= 0.15);

  UbpOptions fine;
  fine.u_step = 0.25;
  CHECK(rel_diff(ubp_2d(c.p, c.grid, fine).values, h.values) <= 1e-3);
}

TEST_CASE("constant attenuation compensation on the disk") {
  const DiskCase& c = disk_case();
  const std::vector<char> mask = support(c.truth);
  const double lossless = rel_l2_error(ubp_2d(c.p, c.grid), c.truth, &mask);
  const WaveData pa = constant_attenuated(c.p, 0.45);
  const Image2D constant = reconstruct_constant(pa, 0.45, c.grid);
  CHECK(constant.method == "const-atten");
  const double err = rel_l2_error(constant, c.truth, &mask);
  CHECK(err <= 1.25 * lossless);
  CHECK(rel_l2_error(reconstruct_naive(pa, c.grid), c.truth, &mask) > err);

  const Image2D compensated = reconstruct_compensated(pa, 0.45, c.grid);
  CHECK(compensated.method == "compensated");
  CHECK(compensated.values == constant.values);

  const AttenuationSystem sys = build_system(ConstantLaw{0.45}, c.time);
  const Image2D full = reconstruct_full(pa, sys, c.grid);
  CHECK(full.method == "full");
  CHECK(rel_diff(full.values, constant.values) <= 1e-8);
}

TEST_CASE("pipelines reduce to plain back-projection without attenuation") {
  const TimeGrid tg = TimeGrid::from_duration(3.0, 120);
  const WaveData p = random_pressure(tg, make_circle_sensors(1.2, 64), 9);
  const ImageGrid grid = ImageGrid::square(16, 0.8);
  const Image2D naive = reconstruct_naive(p, grid);
  CHECK(rel_diff(reconstruct_constant(p, 0.0, grid).values, naive.values) <= 1e-12);
  const AttenuationSystem id = build_system(ConstantLaw{0.0}, tg);
  CHECK(rel_diff(reconstruct_full(p, id, grid).values, naive.values) <= 1e-10);

  WaveData zero(DataKind::AttenuatedPressure, tg, p.sensors);
  for (double v : reconstruct_compensated(zero, 0.45, grid).values) CHECK(v == 0.0);
  CHECK_THROWS_AS(reconstruct_full(p, build_system(ConstantLaw{0.0}, TimeGrid::from_duration(3.0, 100)), grid),
                  InputError);
}

TEST_CASE("3D back-projection of the ball N-wave") {
  const SphericalArray a = make_fibonacci_sphere(1.7, 500);
  double area = 0.0;
  for (double w : a.weights) area += w;
  CHECK(area == doctest::Approx(4.0 * std::numbers::pi * 1.7 * 1.7));
  const TimeGrid tg = kBallTime;
  const SphericalTraces tr = ball_traces(a, {0, 0, 0}, 0.5, tg, false);
  const std::vector<double> v = ubp_3d_points(tr, {{0, 0, 0}, {1.0, 0, 0}, {0, 0.6, 0.8}});
  CHECK(v[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(v[1]) <= 0.1);
  CHECK(std::abs(v[2]) <= 0.1);

  SphericalTraces zero = tr;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  for (double x : ubp_3d_points(zero, {{0, 0, 0}, {0.3, 0.2, 0.1}})) CHECK(x == 0.0);
  CHECK_THROWS_AS(ubp_3d_points(tr, {{1.8, 0, 0}}), InputError);
  CHECK(ubp_3d_points(tr, {{0.1, 0.2, 0.3}}, Execution::Serial) == ubp_3d_points(tr, {{0.1, 0.2, 0.3}}, Execution::Parallel));
}

TEST_CASE("3D back-projection is translation equivariant") {
  const SphericalArray a = make_fibonacci_sphere(1.7, 500);
  const TimeGrid tg = kBallTime;
  const VolumeGrid vg = VolumeGrid::cube(21, 1.05);
  std::vector<Vec3> line;
  for (std::size_t ix = 0; ix < vg.n; ++ix) line.push_back(vg.position(ix, 10, 10));
  auto centroid = [&](Vec3 c) {
    const std::vector<double> v = ubp_3d_points(ball_traces(a, c, 0.5, tg, false), line);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0.5) {
        num += line[i].x * v[i];
        den += v[i];
      }
    }
    return num / den;
  };
  const double shift = centroid({0.2, 0, 0}) - centroid({0, 0, 0});
  CHECK(std::abs(shift - 0.2) <= vg.spacing);

  const Volume vol = ubp_3d_spherical(ball_traces(a, {0, 0, 0}, 0.5, tg, false), VolumeGrid::cube(5, 1.0));
  CHECK(vol.values.size() == 125);
  CHECK(vol.at(2, 2, 2) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("3D constant-attenuation route") {
  const SphericalArray a = make_fibonacci_sphere(1.7, 500);
  const TimeGrid tg = kBallTime;
  const double k = 0.45;
  SphericalTraces qa = ball_traces(a, {0, 0, 0}, 0.5, tg, true);
  for (std::size_t i = 0; i < tg.count; ++i)
    for (std::size_t j = 0; j < a.size(); ++j) qa.values[i * a.size() + j] *= std::exp(-k * tg.time(i));
  const std::vector<double> v = ubp_3d_constant_points(qa, k, {{0, 0, 0}, {1.0, 0, 0}});
  CHECK(v[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(v[1]) <= 0.1);

  // k_inf = 0 agrees with the plain formula applied to analytic p = q'.
  const SphericalTraces q = ball_traces(a, {0, 0, 0}, 0.5, tg, true);
  const SphericalTraces p = ball_traces(a, {0, 0, 0}, 0.5, tg, false);
  const std::vector<Vec3> pts{{0, 0, 0}, {0.2, 0.1, 0}, {0.9, 0, 0}};
  const std::vector<double> via_q = ubp_3d_constant_points(q, 0.0, pts);
  const std::vector<double> via_p = ubp_3d_points(p, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(via_q[i] - via_p[i]) <= 0.05);
}
