// SPDX-License-Identifier: Apache-2.0
//
// Persistence and configuration: the ATWV1 grid file, 16-bit PGM renders,
// CSV columns and JSON configuration files.
//
// ATWV1 layout (all little-endian):
//   char[8]  magic "ATWV1" padded with NUL
//   u32      kind tag (GridKind)
//   u32      number of used dimensions (1..3)
//   u64[3]   dimensions, slowest first, unused entries 1
//   f64[3]   spacing per dimension
//   f64[3]   origin per dimension
//   f64[...] row-major payload
// Metadata that does not fit the header (sensor geometry, image provenance,
// system fingerprint) lives in a JSON sidecar "<path>.json".

#ifndef WAPAT_IO_HPP
#define WAPAT_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wapat/attenuation_models.hpp"
#include "wapat/attenuation_operator.hpp"
#include "wapat/experiments.hpp"
#include "wapat/types.hpp"

namespace wapat {

namespace fs = std::filesystem;

enum class GridKind : std::uint32_t {
  Image = 1,
  Pressure = 2,
  Integrated = 3,
  AttenuatedPressure = 4,
  AttenuatedIntegrated = 5,
  Matrix = 6,
  Phantom = 7,
};

inline constexpr std::size_t kGridHeaderBytes = 88;

struct GridHeader {
  GridKind kind = GridKind::Image;
  std::uint32_t ndim = 2;
  std::array<std::uint64_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{0, 0, 0};
  std::array<double, 3> origin{0, 0, 0};

  std::uint64_t count() const { return dims[0] * dims[1] * dims[2]; }
};

struct GridFile {
  GridHeader header;
  std::vector<double> payload;
};

/// Throws Error naming the path on I/O failure, InputError on malformed content.
void write_grid_file(const fs::path& path, const GridFile& file);
GridFile read_grid_file(const fs::path& path);

void write_image(const fs::path& path, const Image2D& image);
Image2D read_image(const fs::path& path);

void write_wave_data(const fs::path& path, const WaveData& data);
WaveData read_wave_data(const fs::path& path);

/// System cache: matrix payload plus fingerprint, k_inf and residue sidecar.
void write_system(const fs::path& path, const AttenuationSystem& system);
AttenuationSystem read_system(const fs::path& path);

struct PgmWindow {
  double lo = 0.0;
  double hi = 1.0;
};

/// 16-bit binary PGM, min-max normalized unless `window` is given. The
/// window actually used is written to "<path>.json".
void write_image_pgm(const Image2D& image, const fs::path& path, std::optional<PgmWindow> window = std::nullopt);

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint16_t> pixels;  // top row first
};
PgmImage read_pgm(const fs::path& path);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

/// Comma separated, header row, %.16e (17 significant digits). Columns must
/// have equal length.
void write_csv(const Table& table, const fs::path& path);
Table read_csv(const fs::path& path);

/// JSON model description, e.g. {"type": "nsw", "tau": 0.11, "tau_tilde": 0.1}.
AttenuationModel parse_model(const std::string& json_text);
std::string model_to_json(const AttenuationModel& model);

/// JSON scenario description; unknown or mistyped fields raise InputError
/// naming the field. The schema is documented in README.md.
ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const fs::path& path);
std::string scenario_config_to_json(const ScenarioConfig& config);

std::string report_to_json(const ValidationReport& report, const AttenuationModel& model);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

/// Writes truth and reconstructions (ATWV1 + PGM), measured data, the
/// cross-section CSV (x, truth, methods...), metrics.json and the config.
void write_scenario_result(const ScenarioResult& result, const fs::path& directory);

}  // namespace wapat

#endif  // WAPAT_IO_HPP
