// SPDX-License-Identifier: Apache-2.0
//
// Discrete time integration/differentiation, universal back-projection in 2D
// and 3D, and the attenuation-aware reconstruction pipelines built on them.

#ifndef WAPAT_RECONSTRUCTION_HPP
#define WAPAT_RECONSTRUCTION_HPP

#include <cstddef>
#include <vector>

#include "wapat/attenuation_operator.hpp"
#include "wapat/types.hpp"

namespace wapat {

/// q(t_i) = dt * sum_{n <= i} p(t_n). Pressure kinds map to their integrated kind.
WaveData time_integrate(const WaveData& p);

/// Backward difference (q_i - q_{i-1}) / dt with q_0 = 0. Integrated kinds
/// map to their pressure kind. Exact inverse of time_integrate.
WaveData time_differentiate(const WaveData& q);

struct UbpOptions {
  /// Trapezoid step in u = sqrt(t^2 - d^2), as a fraction of dt.
  double u_step = 0.5;
  /// Spacing of the per-sensor table of inner integrals over d, as a fraction of dt.
  double radius_step = 0.5;
  Execution execution = Execution::Parallel;
};

/// Two-dimensional universal back-projection
///   h(x) = -4 / Omega0 sum_j w_j n_j . (xi_j - x) int_{d_j}^{T} d/dt(p / t) / sqrt(t^2 - d_j^2) dt.
/// The inner integral is evaluated after the substitution u = sqrt(t^2 - d^2),
/// tabulated per sensor on a radius grid and interpolated linearly in d.
/// InputError if an image point lies on or outside the measurement curve.
Image2D ubp_2d(const WaveData& p, const ImageGrid& grid, const UbpOptions& options = {});

// --- 3D -------------------------------------------------------------------

struct SphericalArray {
  double radius = 0.0;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Fibonacci lattice of `count` points on the sphere of `radius`, equal area weights.
SphericalArray make_fibonacci_sphere(double radius, std::size_t count);

/// Sampled traces on a spherical array, time-major like WaveData.
struct SphericalTraces {
  TimeGrid time;
  SphericalArray sensors;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * sensors.size() + j]; }
};

struct VolumeGrid {
  std::size_t n = 0;  // points per axis
  double spacing = 0.0;
  Vec3 origin;

  static VolumeGrid cube(std::size_t n, double half_extent);
  Vec3 position(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return {origin.x + static_cast<double>(ix) * spacing, origin.y + static_cast<double>(iy) * spacing,
            origin.z + static_cast<double>(iz) * spacing};
  }
};

struct Volume {
  VolumeGrid grid;
  std::vector<double> values;  // x fastest, then y, then z
  double at(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return values[(iz * grid.n + iy) * grid.n + ix];
  }
};

/// Three-dimensional universal back-projection evaluated at `points`:
///   h(x) = 2 / (4 pi) sum_j w_j [p(d_j) - d_j p'(d_j)] / d_j^2 * n_j . (xi_j - x) / d_j.
std::vector<double> ubp_3d_points(const SphericalTraces& p, const std::vector<Vec3>& points,
                                  Execution execution = Execution::Parallel);

Volume ubp_3d_spherical(const SphericalTraces& p, const VolumeGrid& grid, Execution execution = Execution::Parallel);

/// Constant-attenuation 3D route from integrated attenuated traces q^a: with
/// q = e^{k_inf t} q^a, back-projects q~ = q' - t q'' using the closed-form
/// derivatives of q in terms of q^a.
std::vector<double> ubp_3d_constant_points(const SphericalTraces& qa, double k_inf, const std::vector<Vec3>& points,
                                           Execution execution = Execution::Parallel);

// --- pipelines ------------------------------------------------------------

/// Plain back-projection of (possibly attenuated) pressure, attenuation ignored.
Image2D reconstruct_naive(const WaveData& pa, const ImageGrid& grid, const UbpOptions& options = {});

/// Integrate, rescale by e^{k_inf t}, differentiate, back-project.
Image2D reconstruct_constant(const WaveData& pa, double k_inf, const ImageGrid& grid, const UbpOptions& options = {});

/// Same computation as reconstruct_constant applied to a general weak law:
/// compensates k_inf and neglects k_*.
Image2D reconstruct_compensated(const WaveData& pa, double k_inf, const ImageGrid& grid,
                                const UbpOptions& options = {});

/// Integrate, invert the attenuation system, differentiate, back-project.
Image2D reconstruct_full(const WaveData& pa, const AttenuationSystem& system, const ImageGrid& grid,
                         const Regularization& reg = Regularization::none(), const UbpOptions& options = {});

}  // namespace wapat

#endif  // WAPAT_RECONSTRUCTION_HPP
