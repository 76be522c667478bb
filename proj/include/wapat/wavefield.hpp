// SPDX-License-Identifier: Apache-2.0
//
// Phantoms, measurement geometries and lossless pressure data.

#ifndef WAPAT_WAVEFIELD_HPP
#define WAPAT_WAVEFIELD_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wapat/types.hpp"

namespace wapat {

struct Ellipse {
  Vec2 center;
  double a = 0.0;  // semi-axis along the rotated x direction
  double b = 0.0;  // semi-axis along the rotated y direction
  double angle = 0.0;  // radians, counter-clockwise
  double intensity = 0.0;

  bool contains(Vec2 p) const;
};

/// Absorption density sampled on a pixel-centre grid. When built from
/// ellipses the analytic description is kept for exact point evaluation
/// and re-rasterization.
struct Phantom {
  ImageGrid grid;
  std::vector<double> values;
  std::vector<Ellipse> ellipses;

  /// Exact value for analytic phantoms, otherwise nearest pixel (0 outside).
  double value_at(Vec2 p) const;

  /// Radius (max norm) of the smallest centred square holding the support.
  double support_half_width() const;

  Image2D as_image() const;
};

/// Rasterizes `ellipses` with `supersample`^2 points per pixel.
Phantom make_ellipse_phantom(std::vector<Ellipse> ellipses, const ImageGrid& grid, int supersample = 1);

/// Re-rasterizes an analytic phantom on another grid.
Image2D rasterize(const Phantom& phantom, const ImageGrid& grid, int supersample = 1);

/// Classical 10-ellipse Shepp-Logan table scaled into (-0.8, 0.8)^2.
std::vector<Ellipse> shepp_logan_ellipses();

/// Shepp-Logan phantom on a grid_size^2 grid covering (-half_extent, half_extent)^2.
Phantom make_shepp_logan(std::size_t grid_size, double half_extent, int supersample = 1);

/// Uniform disk centred at the origin.
Phantom make_disk(double radius, double intensity, std::size_t grid_size, double half_extent,
                  int supersample = 1);

SensorArray make_circle_sensors(double radius, std::size_t count);

/// `count` equispaced points on the segment y = -standoff, |x| <= length / 2,
/// endpoints included, normals (0, -1).
SensorArray make_line_sensors(double length, double standoff, std::size_t count);

struct SensorSpec {
  GeometryKind kind = GeometryKind::Circle;
  double radius = 1.7;
  double length = 10.2;
  double standoff = 1.7;
  std::size_t count = 849;
};

SensorArray make_sensors(const SensorSpec& spec);

struct ForwardOptions {
  /// Zero Fourier modes with |k| above the grid Nyquist wavenumber so the
  /// propagator is isotropic.
  bool radial_cutoff = true;
  /// Extra padding beyond the wraparound-free minimum.
  double margin = 0.5;
  Execution execution = Execution::Parallel;
};

/// Exact-in-time Fourier propagator for the free-space wave equation with
/// unit sound speed on a zero-padded periodic grid:
///   q^(t, k) = h^(k) sin(|k| t) / |k|,   p^(t, k) = h^(k) cos(|k| t).
class SpectralPropagator {
 public:
  /// Pads `phantom` so that no periodic image of its support reaches any of
  /// `reach_points` before `duration`.
  SpectralPropagator(const Phantom& phantom, double duration, std::span<const Vec2> reach_points,
                     const ForwardOptions& options = {});
  /// Uses the given periodic grid directly (side n * spacing, no padding).
  SpectralPropagator(std::vector<double> field, std::size_t n, double spacing, Vec2 origin,
                     bool radial_cutoff = false);
  ~SpectralPropagator();
  SpectralPropagator(SpectralPropagator&&) noexcept;
  SpectralPropagator& operator=(SpectralPropagator&&) noexcept;

  std::size_t size() const;      // grid points per side
  double spacing() const;
  Vec2 origin() const;           // position of grid node (0, 0)
  double side() const { return static_cast<double>(size()) * spacing(); }

  /// Pressure field p(t, .) on the full grid.
  std::vector<double> pressure(double t) const;
  /// Integrated pressure q(t, .) on the full grid.
  std::vector<double> integrated(double t) const;

  /// Mode energy sum_k |p^|^2 + |k|^2 |q^|^2 (should equal sum_k |h^|^2).
  double mode_energy(double t) const;

  /// Bilinear interpolation of a grid field at `p`. InputError if outside.
  double sample(std::span<const double> field, Vec2 p) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Lossless pressure traces p(t_i, xi_j) of the phantom at the sensors.
WaveData spectral_forward(const Phantom& phantom, const TimeGrid& time, const SensorArray& sensors,
                          const ForwardOptions& options = {});

/// 3D N-wave of a uniform unit ball of radius r0 observed at distance d from
/// its centre: p(t) = (d - t) / (2 d) for |d - t| <= r0, else 0.
double ball_nwave_pressure(double r0, double d, double t);

/// Companion integrated pressure q(t) = (r0^2 - (d - t)^2) / (4 d) on the same support.
double ball_nwave_integrated(double r0, double d, double t);

}  // namespace wapat

#endif  // WAPAT_WAVEFIELD_HPP
