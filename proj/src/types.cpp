// SPDX-License-Identifier: Apache-2.0

#include "wapat/types.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace wapat {

std::vector<double> SensorArray::arc_parameter() const {
  std::vector<double> s(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (kind == GeometryKind::Circle) {
      double a = std::atan2(points[j].y, points[j].x);
      if (a < 0.0) a += 2.0 * std::numbers::pi;
      s[j] = a;
    } else {
      s[j] = points[j].x;
    }
  }
  return s;
}

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::Pressure: return "pressure";
    case DataKind::Integrated: return "integrated";
    case DataKind::AttenuatedPressure: return "attenuated-pressure";
    case DataKind::AttenuatedIntegrated: return "attenuated-integrated";
  }
  return "unknown";
}

std::vector<double> WaveData::trace(std::size_t j) const {
  if (j >= num_sensors()) throw InputError("trace: sensor index out of range");
  std::vector<double> out(num_times());
  for (std::size_t i = 0; i < num_times(); ++i) out[i] = at(i, j);
  return out;
}

void WaveData::set_trace(std::size_t j, std::span<const double> trace) {
  if (j >= num_sensors()) throw InputError("set_trace: sensor index out of range");
  if (trace.size() != num_times()) throw InputError("set_trace: trace length does not match the time grid");
  for (std::size_t i = 0; i < num_times(); ++i) at(i, j) = trace[i];
}

void WaveData::check() const {
  if (!(time.dt > 0.0) || time.count == 0) throw InputError("wave data: empty or invalid time grid");
  if (sensors.size() == 0) throw InputError("wave data: no sensors");
  if (sensors.normals.size() != sensors.size() || sensors.weights.size() != sensors.size()) {
    throw InputError("wave data: sensor normals/weights do not match sensor count");
  }
  if (values.size() != time.count * sensors.size()) {
    throw InputError("wave data: payload size does not match N_T x N_S");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("wave data: non-finite sample");
  }
}

std::string data_fingerprint(const WaveData& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* bytes, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const auto kind = static_cast<std::uint32_t>(data.kind);
  mix(&kind, sizeof kind);
  mix(&data.time.dt, sizeof data.time.dt);
  const std::uint64_t count = data.time.count;
  mix(&count, sizeof count);
  for (const Vec2& p : data.sensors.points) mix(&p, sizeof p);
  if (!data.values.empty()) mix(data.values.data(), data.values.size() * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ImageGrid ImageGrid::square(std::size_t n, double half_extent) {
  if (n == 0 || !(half_extent > 0.0)) throw InputError("image grid: size and extent must be positive");
  const double spacing = 2.0 * half_extent / static_cast<double>(n);
  return {n, n, spacing, {-half_extent + 0.5 * spacing, -half_extent + 0.5 * spacing}};
}

}  // namespace wapat
