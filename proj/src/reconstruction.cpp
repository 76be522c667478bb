// SPDX-License-Identifier: Apache-2.0

#include "wapat/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wapat {
namespace {

DataKind integrated_kind(DataKind k) {
  switch (k) {
    case DataKind::Pressure: return DataKind::Integrated;
    case DataKind::AttenuatedPressure: return DataKind::AttenuatedIntegrated;
    default: throw InputError("time_integrate: input must be (attenuated) pressure, got " + to_string(k));
  }
}

DataKind pressure_kind(DataKind k) {
  switch (k) {
    case DataKind::Integrated: return DataKind::Pressure;
    case DataKind::AttenuatedIntegrated: return DataKind::AttenuatedPressure;
    default: throw InputError("time_differentiate: input must be (attenuated) integrated pressure, got " + to_string(k));
  }
}

bool is_pressure(DataKind k) { return k == DataKind::Pressure || k == DataKind::AttenuatedPressure; }

template <class F>
void for_each_index(std::size_t n, Execution execution, F&& f) {
  const long count = static_cast<long>(n);
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  }
}

/// Linear interpolation of samples y_i at t_i = (i + 1) dt, constant beyond the ends.
double interp_time(const std::vector<double>& y, double dt, double t) {
  const double s = t / dt - 1.0;
  if (s <= 0.0) return y.front();
  const std::size_t last = y.size() - 1;
  if (s >= static_cast<double>(last)) return y.back();
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * y[i] + f * y[i + 1];
}

/// Central differences, one-sided at both ends.
std::vector<double> derivative(const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / dt;
  d[n - 1] = (y[n - 1] - y[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
  return d;
}

void check_inside(const SensorArray& s, const ImageGrid& grid) {
  const double x0 = grid.origin.x, y0 = grid.origin.y;
  const double x1 = grid.position(grid.nx - 1, 0).x, y1 = grid.position(0, grid.ny - 1).y;
  if (s.kind == GeometryKind::Circle) {
    const double far = std::hypot(std::max(std::abs(x0), std::abs(x1)), std::max(std::abs(y0), std::abs(y1)));
    if (!(far < s.radius)) throw InputError("ubp_2d: image point on or outside the measurement circle");
  } else {
    if (!(y0 > -s.standoff)) throw InputError("ubp_2d: image point on or below the measurement line");
  }
}

/// Inner integral I(d) = int_0^{sqrt(T^2 - d^2)} g(sqrt(d^2 + u^2)) / sqrt(d^2 + u^2) du.
double inner_integral(const std::vector<double>& g, double dt, double duration, double d, double du_target) {
  if (d >= duration) return 0.0;
  const double upper = std::sqrt(duration * duration - d * d);
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(upper / du_target)));
  const double du = upper / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double u = static_cast<double>(k) * du;
    const double t = std::sqrt(d * d + u * u);
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    acc += w * interp_time(g, dt, t) / t;
  }
  return acc * du;
}

struct RadiusTable {
  double d0 = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double operator()(double d) const {
    if (values.size() == 1) return values[0];
    const double s = std::clamp((d - d0) / step, 0.0, static_cast<double>(values.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(s), values.size() - 2);
    const double f = s - static_cast<double>(i);
    return (1.0 - f) * values[i] + f * values[i + 1];
  }
};

}  // namespace

WaveData time_integrate(const WaveData& p) {
  WaveData q(integrated_kind(p.kind), p.time, p.sensors);
  const std::size_t ns = p.num_sensors();
  std::vector<double> acc(ns, 0.0);
  for (std::size_t i = 0; i < p.num_times(); ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      acc[j] += p.at(i, j);
      q.at(i, j) = p.time.dt * acc[j];
    }
  }
  return q;
}

WaveData time_differentiate(const WaveData& q) {
  if (q.num_times() < 2) throw InputError("time_differentiate: need at least two time samples");
  WaveData p(pressure_kind(q.kind), q.time, q.sensors);
  const std::size_t ns = q.num_sensors();
  for (std::size_t i = 0; i < q.num_times(); ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      const double prev = i == 0 ? 0.0 : q.at(i - 1, j);
      p.at(i, j) = (q.at(i, j) - prev) / q.time.dt;
    }
  }
  return p;
}

Image2D ubp_2d(const WaveData& p, const ImageGrid& grid, const UbpOptions& options) {
  if (!is_pressure(p.kind)) throw InputError("ubp_2d: input must be (attenuated) pressure, got " + to_string(p.kind));
  if (grid.size() == 0) throw InputError("ubp_2d: empty image grid");
  if (!(options.u_step > 0.0) || !(options.radius_step > 0.0)) throw InputError("ubp_2d: steps must be positive");
  p.check();
  const SensorArray& s = p.sensors;
  check_inside(s, grid);

  const std::size_t nt = p.num_times();
  const std::size_t ns = p.num_sensors();
  const double dt = p.time.dt;
  const double duration = p.time.duration();
  const double x0 = grid.origin.x, y0 = grid.origin.y;
  const double x1 = grid.position(grid.nx - 1, 0).x, y1 = grid.position(0, grid.ny - 1).y;

  std::vector<RadiusTable> tables(ns);
  for_each_index(ns, options.execution, [&](std::size_t j) {
    std::vector<double> f(nt);
    for (std::size_t i = 0; i < nt; ++i) f[i] = p.at(i, j) / p.time.time(i);
    const std::vector<double> g = derivative(f, dt);

    const Vec2 xi = s.points[j];
    const double cx = std::clamp(xi.x, x0, x1), cy = std::clamp(xi.y, y0, y1);
    const double dmin = std::hypot(xi.x - cx, xi.y - cy);
    const double dmax = std::hypot(std::max(std::abs(xi.x - x0), std::abs(xi.x - x1)),
                                   std::max(std::abs(xi.y - y0), std::abs(xi.y - y1)));
    const double target = options.radius_step * dt;
    const auto intervals = static_cast<std::size_t>(std::ceil((dmax - dmin) / target));
    RadiusTable& tab = tables[j];
    tab.d0 = dmin;
    tab.step = intervals == 0 ? 1.0 : (dmax - dmin) / static_cast<double>(intervals);
    tab.values.resize(intervals + 1);
    for (std::size_t n = 0; n <= intervals; ++n) {
      const double d = dmin + static_cast<double>(n) * tab.step;
      tab.values[n] = inner_integral(g, dt, duration, d, options.u_step * dt);
    }
  });

  Image2D out(grid);
  out.method = "naive-ubp";
  out.fingerprint = data_fingerprint(p);
  const double scale = -4.0 / s.omega0();
  for_each_index(grid.size(), options.execution, [&](std::size_t idx) {
    const Vec2 x = grid.position(idx % grid.nx, idx / grid.nx);
    double acc = 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
      const Vec2 r = s.points[j] - x;
      acc += s.weights[j] * dot(s.normals[j], r) * tables[j](norm(r));
    }
    out.values[idx] = scale * acc;
  });
  return out;
}

// --- 3D -------------------------------------------------------------------

SphericalArray make_fibonacci_sphere(double radius, std::size_t count) {
  if (!(radius > 0.0) || count == 0) throw InputError("fibonacci sphere: radius and count must be positive");
  SphericalArray a;
  a.radius = radius;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double n = static_cast<double>(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double z = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(j);
    const Vec3 u{rho * std::cos(phi), rho * std::sin(phi), z};
    a.normals.push_back(u);
    a.points.push_back(radius * u);
    a.weights.push_back(4.0 * std::numbers::pi * radius * radius / n);
  }
  return a;
}

VolumeGrid VolumeGrid::cube(std::size_t n, double half_extent) {
  if (n == 0 || !(half_extent > 0.0)) throw InputError("volume grid: size and extent must be positive");
  const double spacing = 2.0 * half_extent / static_cast<double>(n);
  const double o = -half_extent + 0.5 * spacing;
  return {n, spacing, {o, o, o}};
}

namespace {

void check_traces(const SphericalTraces& tr, const std::vector<Vec3>& points) {
  const std::size_t ns = tr.sensors.size();
  if (ns == 0 || tr.time.count < 2) throw InputError("ubp_3d: need sensors and at least two time samples");
  if (tr.values.size() != tr.time.count * ns) throw InputError("ubp_3d: payload size does not match N_T x N_S");
  for (const Vec3& x : points) {
    if (!(norm(x) < tr.sensors.radius)) throw InputError("ubp_3d: image point on or outside the measurement sphere");
  }
}

/// h(x) = 2 / (4 pi) sum_j w_j kernel_j(d_j) n_j . (xi_j - x) / d_j^3.
std::vector<double> backproject_3d(const SphericalTraces& tr, const std::vector<std::vector<double>>& kernel,
                                   const std::vector<Vec3>& points, Execution execution) {
  const SphericalArray& s = tr.sensors;
  std::vector<double> out(points.size(), 0.0);
  const double scale = 2.0 / (4.0 * std::numbers::pi);
  for_each_index(points.size(), execution, [&](std::size_t idx) {
    const Vec3 x = points[idx];
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const Vec3 r = s.points[j] - x;
      const double d = norm(r);
      acc += s.weights[j] * interp_time(kernel[j], tr.time.dt, d) * dot(s.normals[j], r) / (d * d * d);
    }
    out[idx] = scale * acc;
  });
  return out;
}

}  // namespace

std::vector<double> ubp_3d_points(const SphericalTraces& p, const std::vector<Vec3>& points, Execution execution) {
  check_traces(p, points);
  const std::size_t nt = p.time.count, ns = p.sensors.size();
  // Tabulate p - t p' per sensor; linear interpolation of the table at t = d
  // equals the interpolated combination up to O(dt^2).
  std::vector<std::vector<double>> kernel(ns, std::vector<double>(nt));
  for (std::size_t j = 0; j < ns; ++j) {
    std::vector<double> y(nt);
    for (std::size_t i = 0; i < nt; ++i) y[i] = p.at(i, j);
    const std::vector<double> dy = derivative(y, p.time.dt);
    for (std::size_t i = 0; i < nt; ++i) kernel[j][i] = y[i] - p.time.time(i) * dy[i];
  }
  return backproject_3d(p, kernel, points, execution);
}

Volume ubp_3d_spherical(const SphericalTraces& p, const VolumeGrid& grid, Execution execution) {
  std::vector<Vec3> points;
  points.reserve(grid.n * grid.n * grid.n);
  for (std::size_t iz = 0; iz < grid.n; ++iz)
    for (std::size_t iy = 0; iy < grid.n; ++iy)
      for (std::size_t ix = 0; ix < grid.n; ++ix) points.push_back(grid.position(ix, iy, iz));
  return {grid, ubp_3d_points(p, points, execution)};
}

std::vector<double> ubp_3d_constant_points(const SphericalTraces& qa, double k_inf, const std::vector<Vec3>& points,
                                           Execution execution) {
  if (!(k_inf >= 0.0)) throw InputError("ubp_3d_constant: k_inf must be non-negative");
  check_traces(qa, points);
  const std::size_t nt = qa.time.count, ns = qa.sensors.size();
  const double dt = qa.time.dt;
  std::vector<std::vector<double>> kernel(ns, std::vector<double>(nt));
  for (std::size_t j = 0; j < ns; ++j) {
    std::vector<double> y(nt);
    for (std::size_t i = 0; i < nt; ++i) y[i] = qa.at(i, j);
    const std::vector<double> dy = derivative(y, dt);
    const std::vector<double> ddy = derivative(dy, dt);
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = qa.time.time(i);
      const double e = std::exp(k_inf * t);
      const double q1 = e * (k_inf * y[i] + dy[i]);
      const double q2 = e * (k_inf * k_inf * y[i] + 2.0 * k_inf * dy[i] + ddy[i]);
      kernel[j][i] = q1 - t * q2;
    }
  }
  return backproject_3d(qa, kernel, points, execution);
}

// --- pipelines ------------------------------------------------------------

Image2D reconstruct_naive(const WaveData& pa, const ImageGrid& grid, const UbpOptions& options) {
  Image2D img = ubp_2d(pa, grid, options);
  img.method = "naive-ubp";
  return img;
}

namespace {

Image2D rescaled(const WaveData& pa, double k_inf, const ImageGrid& grid, const UbpOptions& options,
                 const char* method) {
  if (!is_pressure(pa.kind)) throw InputError(std::string(method) + ": input must be (attenuated) pressure");
  if (!(k_inf >= 0.0)) throw InputError(std::string(method) + ": k_inf must be non-negative");
  WaveData q = time_integrate(pa);
  q.kind = DataKind::Integrated;
  for (std::size_t i = 0; i < q.num_times(); ++i) {
    const double e = std::exp(k_inf * q.time.time(i));
    for (std::size_t j = 0; j < q.num_sensors(); ++j) q.at(i, j) *= e;
  }
  Image2D img = ubp_2d(time_differentiate(q), grid, options);
  img.method = method;
  img.fingerprint = data_fingerprint(pa);
  return img;
}

}  // namespace

Image2D reconstruct_constant(const WaveData& pa, double k_inf, const ImageGrid& grid, const UbpOptions& options) {
  return rescaled(pa, k_inf, grid, options, "const-atten");
}

Image2D reconstruct_compensated(const WaveData& pa, double k_inf, const ImageGrid& grid,
                                const UbpOptions& options) {
  return rescaled(pa, k_inf, grid, options, "compensated");
}

Image2D reconstruct_full(const WaveData& pa, const AttenuationSystem& system, const ImageGrid& grid,
                         const Regularization& reg, const UbpOptions& options) {
  if (!is_pressure(pa.kind)) throw InputError("reconstruct_full: input must be (attenuated) pressure");
  if (!(pa.time == system.grid())) throw InputError("reconstruct_full: system built for a different time grid");
  WaveData qa = time_integrate(pa);
  qa.kind = DataKind::AttenuatedIntegrated;
  const WaveData q = invert_attenuation(system, qa, reg, options.execution);
  Image2D img = ubp_2d(time_differentiate(q), grid, options);
  img.method = "full";
  img.fingerprint = data_fingerprint(pa);
  return img;
}

}  // namespace wapat
