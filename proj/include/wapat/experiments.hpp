// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale numerical experiments: attenuated data generation with
// inverse-crime avoidance, noise, resampling, metrics and cross-sections.

#ifndef WAPAT_EXPERIMENTS_HPP
#define WAPAT_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wapat/attenuation_models.hpp"
#include "wapat/attenuation_operator.hpp"
#include "wapat/reconstruction.hpp"
#include "wapat/types.hpp"
#include "wapat/wavefield.hpp"

namespace wapat {

/// Adds i.i.d. uniform noise on [-a, a], a = level * max|data| * sqrt(3), so
/// the noise standard deviation is level * max|data|.
WaveData add_noise(const WaveData& data, double level, std::uint64_t seed);

/// Bilinear interpolation in (t, arc parameter) onto a coarser or equal grid.
/// Periodic in the angle for circles. InputError on extrapolation.
WaveData resample_data(const WaveData& data, const TimeGrid& time, const SensorArray& sensors);

/// ||image - truth|| / ||truth||, optionally restricted to mask != 0.
double rel_l2_error(const Image2D& image, const Image2D& truth, const std::vector<char>* mask = nullptr);

enum class Axis { X, Y };

struct CrossSection {
  std::vector<double> coordinate;
  std::vector<double> values;
};

/// Nearest row (axis X: values along x at y = coordinate) or column.
CrossSection cross_section(const Image2D& image, Axis axis, double coordinate);

enum class PhantomKind { SheppLogan, Disk };

struct ScenarioConfig {
  std::string name = "scenario";
  AttenuationModel model = ConstantLaw{0.45};
  SensorSpec geometry;  // count is overridden by the two resolutions below
  double duration = 6.0;

  std::size_t forward_times = 500;
  std::size_t forward_sensors = 896;
  std::size_t inverse_times = 443;
  std::size_t inverse_sensors = 849;
  bool avoid_inverse_crime = true;

  PhantomKind phantom = PhantomKind::SheppLogan;
  double disk_radius = 0.4;
  std::size_t phantom_grid = 256;  // forward rasterization, over the image extent
  int phantom_supersample = 2;

  std::size_t image_size = 128;
  double image_half_extent = 1.0;

  double noise = 0.0;
  std::uint64_t seed = 0;

  std::size_t forward_order = 14;
  QuadratureSpec forward_quadrature{200.0, 20000};
  std::size_t taylor_order = 10;
  QuadratureSpec inverse_quadrature{200.0, 16384};
  Regularization regularization;

  UbpOptions ubp;
  ForwardOptions forward;
  double cross_section_y = 0.0;

  /// Throws InputError naming the offending field.
  void check() const;
  TimeGrid forward_time() const;
  TimeGrid inverse_time() const;
  SensorArray forward_array() const;
  SensorArray inverse_array() const;
  ImageGrid image_grid() const;
};

/// Phantom, ground-truth image and attenuated pressure on the forward grids.
struct ForwardProducts {
  Phantom phantom;
  Image2D truth;
  WaveData attenuated;  // p^a, forward resolution, noise free
  std::map<std::string, double> seconds;
};

ForwardProducts simulate_scenario(const ScenarioConfig& config);

/// Noise (at the forward resolution) then resampling to the inversion grids.
WaveData measure(const ScenarioConfig& config, const WaveData& forward_data);

struct MethodResult {
  Image2D image;
  double error = 0.0;
  CrossSection section;
  double seconds = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  Image2D truth;
  WaveData data;  // p^a on the inversion grids, with noise
  CrossSection truth_section;
  std::map<std::string, MethodResult> methods;  // naive, compensated (non-constant laws), full
  std::map<std::string, double> seconds;

  double error(const std::string& method) const { return methods.at(method).error; }
};

/// Runs the reconstruction methods on already measured data. `system`
/// defaults to one built from the config.
ScenarioResult reconstruct_scenario(const ScenarioConfig& config, const Image2D& truth, const WaveData& data,
                                    const AttenuationSystem* system = nullptr);

ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace wapat

#endif  // WAPAT_EXPERIMENTS_HPP
