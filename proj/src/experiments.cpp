// SPDX-License-Identifier: Apache-2.0

#include "wapat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace wapat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs `f`, prefixing any library error with the stage name.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConditioningError& e) {
    throw ConditioningError(name + ": " + e.what(), e.condition_number());
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(name + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  }
}

/// Bracketing index and weight of `x` in the ascending `nodes`, tolerance `tol`.
std::pair<std::size_t, double> bracket(const std::vector<double>& nodes, double x, double tol, const char* what) {
  const std::size_t n = nodes.size();
  if (n == 1) {
    if (std::abs(x - nodes[0]) > tol) throw InputError(std::string("resample_data: extrapolation in ") + what);
    return {0, 0.0};
  }
  if (x < nodes.front() - tol || x > nodes.back() + tol) {
    throw InputError(std::string("resample_data: extrapolation in ") + what);
  }
  x = std::clamp(x, nodes.front(), nodes.back());
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  i = std::min(i, n - 2);
  const double w = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
  return {i, w};
}

}  // namespace

WaveData add_noise(const WaveData& data, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw InputError("add_noise: level must be non-negative");
  WaveData out = data;
  if (level == 0.0) return out;
  double peak = 0.0;
  for (double v : data.values) peak = std::max(peak, std::abs(v));
  const double a = level * peak * std::sqrt(3.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-a, a);
  for (double& v : out.values) v += dist(rng);
  return out;
}

WaveData resample_data(const WaveData& data, const TimeGrid& time, const SensorArray& sensors) {
  data.check();
  const SensorArray& src = data.sensors;
  if (sensors.kind != src.kind) throw InputError("resample_data: geometry kinds differ");
  if (time.count > data.num_times() || sensors.size() > data.num_sensors()) {
    throw InputError("resample_data: target grid must be coarser or equal in both axes");
  }
  if (time == data.time && sensors.points.size() == src.points.size()) {
    bool same = true;
    for (std::size_t j = 0; j < src.size() && same; ++j) {
      same = src.points[j].x == sensors.points[j].x && src.points[j].y == sensors.points[j].y;
    }
    if (same) return data;
  }

  std::vector<double> t_src(data.num_times());
  for (std::size_t i = 0; i < t_src.size(); ++i) t_src[i] = data.time.time(i);
  const double t_tol = 1e-9 * data.time.duration();

  // Sort source sensors by arc parameter; close the circle periodically.
  const std::vector<double> arc = src.arc_parameter();
  std::vector<std::size_t> order(arc.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return arc[a] < arc[b]; });
  std::vector<double> s_src;
  for (std::size_t j : order) s_src.push_back(arc[j]);
  const bool periodic = src.kind == GeometryKind::Circle;
  if (periodic) {
    if (std::abs(sensors.radius - src.radius) > 1e-12 * src.radius) throw InputError("resample_data: circle radii differ");
    s_src.push_back(s_src.front() + 2.0 * std::numbers::pi);
    order.push_back(order.front());
    if (s_src.front() > 0.0) {
      s_src.insert(s_src.begin(), s_src[s_src.size() - 2] - 2.0 * std::numbers::pi);
      order.insert(order.begin(), order[order.size() - 2]);
    }
  } else if (std::abs(sensors.standoff - src.standoff) > 1e-12 * std::max(1.0, src.standoff)) {
    throw InputError("resample_data: line standoffs differ");
  }
  const double s_tol = 1e-9 * (s_src.back() - s_src.front() + 1.0);

  const std::vector<double> arc_dst = sensors.arc_parameter();
  WaveData out(data.kind, time, sensors);
  std::vector<std::pair<std::size_t, double>> sb(sensors.size());
  for (std::size_t j = 0; j < sensors.size(); ++j) sb[j] = bracket(s_src, arc_dst[j], s_tol, "sensor position");
  for (std::size_t i = 0; i < time.count; ++i) {
    const auto [it, wt] = bracket(t_src, time.time(i), t_tol, "time");
    const std::size_t it1 = std::min(it + 1, t_src.size() - 1);
    for (std::size_t j = 0; j < sensors.size(); ++j) {
      const auto [is, ws] = sb[j];
      const std::size_t a = order[is], b = order[std::min(is + 1, order.size() - 1)];
      const double v0 = (1.0 - ws) * data.at(it, a) + ws * data.at(it, b);
      const double v1 = (1.0 - ws) * data.at(it1, a) + ws * data.at(it1, b);
      out.at(i, j) = (1.0 - wt) * v0 + wt * v1;
    }
  }
  return out;
}

double rel_l2_error(const Image2D& image, const Image2D& truth, const std::vector<char>* mask) {
  if (!(image.grid == truth.grid) || image.values.size() != truth.values.size()) {
    throw InputError("rel_l2_error: images are on different grids");
  }
  if (mask != nullptr && mask->size() != truth.values.size()) throw InputError("rel_l2_error: mask size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    if (mask != nullptr && (*mask)[i] == 0) continue;
    const double d = image.values[i] - truth.values[i];
    num += d * d;
    den += truth.values[i] * truth.values[i];
  }
  if (den == 0.0) throw InputError("rel_l2_error: truth is zero");
  return std::sqrt(num / den);
}

CrossSection cross_section(const Image2D& image, Axis axis, double coordinate) {
  const ImageGrid& g = image.grid;
  const double o = axis == Axis::X ? g.origin.y : g.origin.x;
  const std::size_t n = axis == Axis::X ? g.ny : g.nx;
  const double s = (coordinate - o) / g.spacing;
  if (!(s >= -0.5) || !(s <= static_cast<double>(n) - 0.5)) throw InputError("cross_section: coordinate outside the grid");
  const auto k = std::min(static_cast<std::size_t>(std::lround(std::max(0.0, s))), n - 1);
  CrossSection c;
  if (axis == Axis::X) {
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      c.coordinate.push_back(g.position(ix, k).x);
      c.values.push_back(image.at(ix, k));
    }
  } else {
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
      c.coordinate.push_back(g.position(k, iy).y);
      c.values.push_back(image.at(k, iy));
    }
  }
  return c;
}

// --- scenarios ------------------------------------------------------------

void ScenarioConfig::check() const {
  check_model(model);
  if (!(duration > 0.0)) throw InputError("config: duration must be positive");
  if (forward_times < 2 || inverse_times < 2) throw InputError("config: time resolutions must be at least 2");
  if (forward_sensors < 8 || inverse_sensors < 8) throw InputError("config: sensor counts must be at least 8");
  if (avoid_inverse_crime && forward_times == inverse_times && forward_sensors == inverse_sensors) {
    throw InputError("config: forward and inversion resolutions must differ when avoiding inverse crimes");
  }
  if (inverse_times > forward_times || inverse_sensors > forward_sensors) {
    throw InputError("config: inversion resolution must not exceed the forward resolution");
  }
  if (image_size < 8) throw InputError("config: image_size must be at least 8");
  if (!(image_half_extent > 0.0)) throw InputError("config: image_half_extent must be positive");
  if (phantom_grid < 16) throw InputError("config: phantom_grid must be at least 16");
  if (phantom_supersample < 1) throw InputError("config: phantom_supersample must be at least 1");
  if (phantom == PhantomKind::Disk && !(disk_radius > 0.0 && disk_radius < image_half_extent)) {
    throw InputError("config: disk_radius must lie in (0, image_half_extent)");
  }
  if (!(noise >= 0.0)) throw InputError("config: noise must be non-negative");
  if (forward_order < 1 || taylor_order < 1) throw InputError("config: Taylor orders must be at least 1");
  if (regularization.kind == Regularization::Kind::Tikhonov && !(regularization.lambda > 0.0)) {
    throw InputError("config: regularization lambda must be positive");
  }
  if (geometry.kind == GeometryKind::Circle && !(geometry.radius > std::sqrt(2.0) * image_half_extent)) {
    throw InputError("config: geometry radius must enclose the image square");
  }
  if (geometry.kind == GeometryKind::Line && !(geometry.standoff > image_half_extent)) {
    throw InputError("config: geometry standoff must exceed image_half_extent");
  }
}

TimeGrid ScenarioConfig::forward_time() const { return TimeGrid::from_duration(duration, forward_times); }

TimeGrid ScenarioConfig::inverse_time() const {
  return TimeGrid::from_duration(duration, avoid_inverse_crime ? inverse_times : forward_times);
}

SensorArray ScenarioConfig::forward_array() const {
  SensorSpec s = geometry;
  s.count = forward_sensors;
  return make_sensors(s);
}

SensorArray ScenarioConfig::inverse_array() const {
  SensorSpec s = geometry;
  s.count = avoid_inverse_crime ? inverse_sensors : forward_sensors;
  return make_sensors(s);
}

ImageGrid ScenarioConfig::image_grid() const { return ImageGrid::square(image_size, image_half_extent); }

ForwardProducts simulate_scenario(const ScenarioConfig& config) {
  stage("config", [&] { config.check(); });
  ForwardProducts out;
  auto start = Clock::now();
  out.phantom = stage("phantom", [&] {
    if (config.phantom == PhantomKind::Disk) {
      return make_disk(config.disk_radius, 1.0, config.phantom_grid, config.image_half_extent,
                       config.phantom_supersample);
    }
    return make_shepp_logan(config.phantom_grid, config.image_half_extent, config.phantom_supersample);
  });
  out.truth = rasterize(out.phantom, config.image_grid(), 4);
  out.truth.method = "truth";
  out.seconds["phantom"] = seconds_since(start);

  const TimeGrid time = config.forward_time();
  // Built first so that unsupported laws fail before the expensive forward solve.
  start = Clock::now();
  const AttenuationSystem system = stage("build_system", [&] {
    return build_system(config.model, time, {config.forward_order, config.forward_quadrature, ConvolutionMode::FullLine});
  });
  out.seconds["forward_system"] = seconds_since(start);

  start = Clock::now();
  const WaveData p = stage("spectral_forward",
                           [&] { return spectral_forward(out.phantom, time, config.forward_array(), config.forward); });
  out.seconds["spectral_forward"] = seconds_since(start);

  start = Clock::now();
  out.attenuated = stage("apply_attenuation", [&] {
    return time_differentiate(apply_attenuation(system, time_integrate(p), config.forward.execution));
  });
  out.seconds["apply_attenuation"] = seconds_since(start);
  return out;
}

WaveData measure(const ScenarioConfig& config, const WaveData& forward_data) {
  const WaveData noisy = stage("add_noise", [&] { return add_noise(forward_data, config.noise, config.seed); });
  return stage("resample", [&] { return resample_data(noisy, config.inverse_time(), config.inverse_array()); });
}

ScenarioResult reconstruct_scenario(const ScenarioConfig& config, const Image2D& truth, const WaveData& data,
                                    const AttenuationSystem* system) {
  ScenarioResult r;
  r.config = config;
  r.truth = truth;
  r.data = data;
  r.truth_section = cross_section(truth, Axis::X, config.cross_section_y);
  const ImageGrid grid = config.image_grid();

  auto run = [&](const std::string& name, auto&& method) {
    const auto start = Clock::now();
    MethodResult m;
    m.image = stage(name, method);
    m.seconds = seconds_since(start);
    m.error = rel_l2_error(m.image, truth);
    m.section = cross_section(m.image, Axis::X, config.cross_section_y);
    r.methods[name] = std::move(m);
  };

  run("naive", [&] { return reconstruct_naive(data, grid, config.ubp); });
  if (!std::holds_alternative<ConstantLaw>(config.model)) {
    const double k_inf = stage("compensated", [&] { return k_infinity(config.model); });
    run("compensated", [&] { return reconstruct_compensated(data, k_inf, grid, config.ubp); });
  }

  std::optional<AttenuationSystem> owned;
  if (system == nullptr) {
    const auto start = Clock::now();
    const SystemOptions options = config.avoid_inverse_crime
                                      ? SystemOptions{config.taylor_order, config.inverse_quadrature,
                                                      ConvolutionMode::FullLine}
                                      : SystemOptions{config.forward_order, config.forward_quadrature,
                                                      ConvolutionMode::FullLine};
    owned.emplace(stage("build_system", [&] { return build_system(config.model, data.time, options); }));
    system = &*owned;
    r.seconds["build_system"] = seconds_since(start);
  }
  run("full", [&] { return reconstruct_full(data, *system, grid, config.regularization, config.ubp); });
  return r;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto start = Clock::now();
  const ForwardProducts fwd = simulate_scenario(config);
  const WaveData data = measure(config, fwd.attenuated);
  ScenarioResult r = reconstruct_scenario(config, fwd.truth, data);
  for (const auto& [k, v] : fwd.seconds) r.seconds[k] = v;
  r.seconds["total"] = seconds_since(start);
  return r;
}

}  // namespace wapat
