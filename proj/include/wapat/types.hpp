// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared by all modules: time sampling, sensor geometry,
// time-by-sensor wave data and 2D images.

#ifndef WAPAT_TYPES_HPP
#define WAPAT_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wapat {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for the given attenuation law.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Linear system too ill-conditioned to solve without regularization.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// Serial reference path or OpenMP path. Both produce bitwise identical
/// results; the serial path is kept for testing.
enum class Execution { Serial, Parallel };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Uniform sampling t_i = i * dt, i = 1..count (stored 0-based).
struct TimeGrid {
  double dt = 0.0;
  std::size_t count = 0;

  static TimeGrid from_duration(double duration, std::size_t count) {
    if (!(duration > 0.0) || count == 0) {
      throw InputError("time grid: duration must be positive and count non-zero");
    }
    return {duration / static_cast<double>(count), count};
  }

  /// Time of the sample with 0-based index `i`.
  double time(std::size_t i) const { return static_cast<double>(i + 1) * dt; }
  double duration() const { return static_cast<double>(count) * dt; }
  bool operator==(const TimeGrid&) const = default;
};

enum class GeometryKind { Circle, Line };

/// Measurement points on a curve with outward normals and curve-length
/// quadrature weights.
struct SensorArray {
  GeometryKind kind = GeometryKind::Circle;
  double radius = 0.0;    // circle
  double length = 0.0;    // line, total length
  double standoff = 0.0;  // line, distance below the origin
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }

  /// Solid-angle constant of the back-projection formula:
  /// 4 pi for closed circles, 2 pi for lines.
  double omega0() const {
    return kind == GeometryKind::Circle ? 4.0 * std::numbers::pi : 2.0 * std::numbers::pi;
  }

  /// Curve parameter of each point: angle for circles, abscissa for lines.
  std::vector<double> arc_parameter() const;
};

enum class DataKind { Pressure, Integrated, AttenuatedPressure, AttenuatedIntegrated };

std::string to_string(DataKind kind);

/// Time-by-sensor sample matrix, row-major with time as the slow index.
struct WaveData {
  DataKind kind = DataKind::Pressure;
  TimeGrid time;
  SensorArray sensors;
  std::vector<double> values;

  WaveData() = default;
  WaveData(DataKind k, TimeGrid t, SensorArray s)
      : kind(k), time(t), sensors(std::move(s)), values(time.count * sensors.size(), 0.0) {}

  std::size_t num_times() const { return time.count; }
  std::size_t num_sensors() const { return sensors.size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * num_sensors() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * num_sensors() + j]; }

  /// Copy of the trace recorded by sensor `j`.
  std::vector<double> trace(std::size_t j) const;
  void set_trace(std::size_t j, std::span<const double> trace);

  /// Throws InputError when the payload size disagrees with the metadata or
  /// an entry is not finite.
  void check() const;
};

/// Hex FNV-1a digest of kind, grid, geometry and payload.
std::string data_fingerprint(const WaveData& data);

/// Pixel-centre grid: x = origin.x + ix * spacing, y = origin.y + iy * spacing.
struct ImageGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double spacing = 0.0;
  Vec2 origin;

  /// n x n pixels tiling the square (-half_extent, half_extent)^2.
  static ImageGrid square(std::size_t n, double half_extent);

  Vec2 position(std::size_t ix, std::size_t iy) const {
    return {origin.x + static_cast<double>(ix) * spacing,
            origin.y + static_cast<double>(iy) * spacing};
  }
  std::size_t size() const { return nx * ny; }
  bool operator==(const ImageGrid&) const = default;
};

/// 2D scalar field, row-major with y as the slow index.
struct Image2D {
  ImageGrid grid;
  std::vector<double> values;
  std::string method;       // naive-ubp, const-atten, compensated, full, truth
  std::string fingerprint;  // provenance of the input data

  Image2D() = default;
  explicit Image2D(ImageGrid g) : grid(g), values(g.size(), 0.0) {}

  double& at(std::size_t ix, std::size_t iy) { return values[iy * grid.nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * grid.nx + ix]; }
};

}  // namespace wapat

#endif  // WAPAT_TYPES_HPP
