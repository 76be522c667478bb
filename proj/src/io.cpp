// SPDX-License-Identifier: Apache-2.0

#include "wapat/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wapat {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "ATWV1 I/O assumes a little-endian host");

constexpr char kMagic[8] = {'A', 'T', 'W', 'V', '1', 0, 0, 0};

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".json"); }

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InputError(path.string() + ": truncated header");
  return v;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError(path.string() + ": cannot open for reading");
  return in;
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// --- strict JSON field access ---------------------------------------------

class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InputError("config: " + name() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw InputError("config: field '" + name(key) + "' must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw InputError("config: field '" + name(key) + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw InputError("config: field '" + name(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw InputError("config: field '" + name(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) throw InputError("config: missing field '" + name(key) + "'");
    const json& v = j_.at(key);
    if (!v.is_array()) throw InputError("config: field '" + name(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw InputError("config: field '" + name(key) + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  double required(const std::string& key) {
    if (!has(key)) throw InputError("config: missing field '" + name(key) + "'");
    return number(key, 0.0);
  }

  const json& object(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string name(const std::string& key = "") const {
    if (key.empty()) return where_.empty() ? "document" : where_;
    return where_.empty() ? key : where_ + "." + key;
  }

  /// Rejects keys that were never queried.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw InputError("config: unknown field '" + name(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

AttenuationModel model_from(const json& j, const std::string& where) {
  Fields f(j, where);
  const std::string type = f.text("type", "");
  AttenuationModel m;
  if (type == "constant") {
    m = ConstantLaw{f.required("k_inf")};
  } else if (type == "nsw") {
    m = NswLaw{f.required("tau"), f.required("tau_tilde")};
  } else if (type == "power") {
    m = PowerLaw{f.required("amplitude"), f.required("exponent")};
  } else if (type == "tabulated") {
    TabulatedWeakLaw t;
    t.omega = f.numbers("omega");
    const std::vector<double> re = f.numbers("kstar_re");
    const std::vector<double> im = f.numbers("kstar_im");
    if (re.size() != t.omega.size() || im.size() != t.omega.size()) {
      throw InputError("config: fields '" + f.name("kstar_re") + "' and '" + f.name("kstar_im") +
                       "' must match '" + f.name("omega") + "' in length");
    }
    for (std::size_t i = 0; i < re.size(); ++i) t.kstar.emplace_back(re[i], im[i]);
    t.k_inf = f.required("k_inf");
    m = std::move(t);
  } else {
    throw InputError("config: field '" + f.name("type") + "' must be one of constant, nsw, power, tabulated");
  }
  f.finish();
  try {
    check_model(m);
  } catch (const InputError& e) {
    throw InputError("config: " + f.name() + ": " + e.what());
  }
  return m;
}

json model_json(const AttenuationModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) {
          return {{"type", "constant"}, {"k_inf", m.k_inf}};
        } else if constexpr (std::is_same_v<T, NswLaw>) {
          return {{"type", "nsw"}, {"tau", m.tau}, {"tau_tilde", m.tau_tilde}};
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return {{"type", "power"}, {"amplitude", m.amplitude}, {"exponent", m.exponent}};
        } else {
          std::vector<double> re, im;
          for (const cdouble& c : m.kstar) {
            re.push_back(c.real());
            im.push_back(c.imag());
          }
          return {{"type", "tabulated"}, {"omega", m.omega}, {"kstar_re", re}, {"kstar_im", im}, {"k_inf", m.k_inf}};
        }
      },
      model);
}

json geometry_json(const SensorArray& s) {
  if (s.kind == GeometryKind::Circle) return {{"kind", "circle"}, {"radius", s.radius}, {"count", s.size()}};
  return {{"kind", "line"}, {"length", s.length}, {"standoff", s.standoff}, {"count", s.size()}};
}

SensorArray geometry_from(const json& j, const fs::path& path) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto count = j.at("count").get<std::size_t>();
    if (kind == "circle") return make_circle_sensors(j.at("radius").get<double>(), count);
    if (kind == "line") return make_line_sensors(j.at("length").get<double>(), j.at("standoff").get<double>(), count);
  } catch (const json::exception& e) {
    throw InputError(sidecar(path).string() + ": malformed geometry: " + e.what());
  }
  throw InputError(sidecar(path).string() + ": unknown geometry kind");
}

GridKind grid_kind(DataKind k) {
  switch (k) {
    case DataKind::Pressure: return GridKind::Pressure;
    case DataKind::Integrated: return GridKind::Integrated;
    case DataKind::AttenuatedPressure: return GridKind::AttenuatedPressure;
    case DataKind::AttenuatedIntegrated: return GridKind::AttenuatedIntegrated;
  }
  return GridKind::Pressure;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

// --- text -----------------------------------------------------------------

std::string read_text(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

// --- ATWV1 ----------------------------------------------------------------

void write_grid_file(const fs::path& path, const GridFile& file) {
  const GridHeader& h = file.header;
  if (h.ndim < 1 || h.ndim > 3) throw InputError("grid file: ndim must be 1..3");
  if (file.payload.size() != h.count()) throw InputError("grid file: payload size does not match dimensions");
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMagic, sizeof kMagic);
  put(out, static_cast<std::uint32_t>(h.kind));
  put(out, h.ndim);
  for (auto d : h.dims) put(out, d);
  for (auto s : h.spacing) put(out, s);
  for (auto o : h.origin) put(out, o);
  out.write(reinterpret_cast<const char*>(file.payload.data()),
            static_cast<std::streamsize>(file.payload.size() * sizeof(double)));
  if (!out) throw Error(path.string() + ": write failed");
}

GridFile read_grid_file(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw InputError(path.string() + ": not an ATWV1 file");
  }
  GridFile f;
  const auto kind = get<std::uint32_t>(in, path);
  if (kind < 1 || kind > 7) throw InputError(path.string() + ": unknown kind tag");
  f.header.kind = static_cast<GridKind>(kind);
  f.header.ndim = get<std::uint32_t>(in, path);
  if (f.header.ndim < 1 || f.header.ndim > 3) throw InputError(path.string() + ": ndim must be 1..3");
  for (auto& d : f.header.dims) d = get<std::uint64_t>(in, path);
  for (auto& s : f.header.spacing) s = get<double>(in, path);
  for (auto& o : f.header.origin) o = get<double>(in, path);
  const std::uint64_t n = f.header.count();
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg() - here);
  if (bytes != n * sizeof(double)) throw InputError(path.string() + ": payload length does not match dimensions");
  in.seekg(here);
  f.payload.resize(n);
  in.read(reinterpret_cast<char*>(f.payload.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw InputError(path.string() + ": truncated payload");
  return f;
}

void write_image(const fs::path& path, const Image2D& image) {
  GridFile f;
  f.header.kind = GridKind::Image;
  f.header.ndim = 2;
  f.header.dims = {image.grid.ny, image.grid.nx, 1};
  f.header.spacing = {image.grid.spacing, image.grid.spacing, 0.0};
  f.header.origin = {image.grid.origin.y, image.grid.origin.x, 0.0};
  f.payload = image.values;
  write_grid_file(path, f);
  write_json(sidecar(path), {{"method", image.method}, {"fingerprint", image.fingerprint}});
}

Image2D read_image(const fs::path& path) {
  const GridFile f = read_grid_file(path);
  if (f.header.kind != GridKind::Image && f.header.kind != GridKind::Phantom) {
    throw InputError(path.string() + ": not an image file");
  }
  if (f.header.ndim != 2 || f.header.spacing[0] != f.header.spacing[1]) {
    throw InputError(path.string() + ": image must be 2D with square pixels");
  }
  Image2D img;
  img.grid = {f.header.dims[1], f.header.dims[0], f.header.spacing[1], {f.header.origin[1], f.header.origin[0]}};
  img.values = f.payload;
  if (fs::exists(sidecar(path))) {
    const json meta = read_json(sidecar(path));
    img.method = meta.value("method", "");
    img.fingerprint = meta.value("fingerprint", "");
  }
  return img;
}

void write_wave_data(const fs::path& path, const WaveData& data) {
  data.check();
  GridFile f;
  f.header.kind = grid_kind(data.kind);
  f.header.ndim = 2;
  f.header.dims = {data.num_times(), data.num_sensors(), 1};
  f.header.spacing = {data.time.dt, 0.0, 0.0};
  f.header.origin = {data.time.time(0), 0.0, 0.0};
  f.payload = data.values;
  write_grid_file(path, f);
  write_json(sidecar(path), {{"kind", to_string(data.kind)}, {"geometry", geometry_json(data.sensors)}});
}

WaveData read_wave_data(const fs::path& path) {
  const GridFile f = read_grid_file(path);
  const auto tag = static_cast<std::uint32_t>(f.header.kind);
  if (tag < 2 || tag > 5 || f.header.ndim != 2) throw InputError(path.string() + ": not a wave data file");
  const json meta = read_json(sidecar(path));
  if (!meta.contains("geometry")) throw InputError(sidecar(path).string() + ": missing geometry");
  WaveData d;
  d.kind = static_cast<DataKind>(tag - 2);
  d.time = {f.header.spacing[0], f.header.dims[0]};
  d.sensors = geometry_from(meta.at("geometry"), path);
  if (d.sensors.size() != f.header.dims[1]) throw InputError(path.string() + ": sensor count disagrees with geometry");
  d.values = f.payload;
  return d;
}

void write_system(const fs::path& path, const AttenuationSystem& system) {
  const Eigen::MatrixXd& m = system.matrix();
  GridFile f;
  f.header.kind = GridKind::Matrix;
  f.header.ndim = 2;
  f.header.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()), 1};
  f.header.spacing = {system.grid().dt, system.grid().dt, 0.0};
  f.header.origin = {system.grid().time(0), system.grid().time(0), 0.0};
  f.payload.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) f.payload[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  write_grid_file(path, f);
  write_json(sidecar(path), {{"fingerprint", system.fingerprint()},
                             {"k_inf", system.k_inf()},
                             {"imag_residue", system.imag_residue()}});
}

AttenuationSystem read_system(const fs::path& path) {
  const GridFile f = read_grid_file(path);
  if (f.header.kind != GridKind::Matrix || f.header.dims[0] != f.header.dims[1]) {
    throw InputError(path.string() + ": not a square system matrix");
  }
  const json meta = read_json(sidecar(path));
  const auto n = static_cast<Eigen::Index>(f.header.dims[0]);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = f.payload[static_cast<std::size_t>(i * n + j)];
  return AttenuationSystem({f.header.spacing[0], static_cast<std::size_t>(n)}, meta.value("fingerprint", ""),
                           meta.value("k_inf", 0.0), std::move(m), meta.value("imag_residue", 0.0));
}

// --- PGM ------------------------------------------------------------------

void write_image_pgm(const Image2D& image, const fs::path& path, std::optional<PgmWindow> window) {
  if (image.values.empty()) throw InputError(path.string() + ": empty image");
  for (double v : image.values) {
    if (!std::isfinite(v)) throw InputError(path.string() + ": image has non-finite entries");
  }
  PgmWindow w;
  const bool fixed = window.has_value();
  if (fixed) {
    w = *window;
    if (!(w.hi > w.lo)) throw InputError(path.string() + ": window must satisfy hi > lo");
  } else {
    const auto [lo, hi] = std::minmax_element(image.values.begin(), image.values.end());
    w = {*lo, *hi};
  }
  const double range = w.hi - w.lo;
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n" << image.grid.nx << " " << image.grid.ny << "\n65535\n";
  // Top row of the render is the largest y.
  for (std::size_t r = 0; r < image.grid.ny; ++r) {
    const std::size_t iy = image.grid.ny - 1 - r;
    for (std::size_t ix = 0; ix < image.grid.nx; ++ix) {
      double u = range > 0.0 ? (image.at(ix, iy) - w.lo) / range : 0.5;
      u = std::clamp(u, 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(u * 65535.0));
      const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
      out.write(bytes, 2);
    }
  }
  if (!out) throw Error(path.string() + ": write failed");
  write_json(sidecar(path), {{"normalization", fixed ? "window" : "min-max"},
                             {"lo", w.lo},
                             {"hi", w.hi},
                             {"method", image.method},
                             {"fingerprint", image.fingerprint}});
}

PgmImage read_pgm(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::string magic;
  std::size_t maxval = 0;
  PgmImage img;
  in >> magic >> img.width >> img.height >> maxval;
  if (!in || magic != "P5" || maxval != 65535) throw InputError(path.string() + ": not a 16-bit binary PGM");
  in.get();
  img.pixels.resize(img.width * img.height);
  for (auto& p : img.pixels) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) throw InputError(path.string() + ": truncated PGM");
    p = static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }
  return img;
}

// --- CSV ------------------------------------------------------------------

void write_csv(const Table& table, const fs::path& path) {
  if (table.header.size() != table.columns.size()) throw InputError("write_csv: header and column counts differ");
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw InputError("write_csv: columns have different lengths");
  }
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_double(table.columns[c][r]);
    out << "\n";
  }
  if (!out) throw Error(path.string() + ": write failed");
}

Table read_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= t.columns.size()) throw InputError(path.string() + ": too many cells on line " + std::to_string(row));
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw InputError(path.string() + ": bad number on line " + std::to_string(row));
      t.columns[c++].push_back(v);
    }
    if (c != t.columns.size()) throw InputError(path.string() + ": too few cells on line " + std::to_string(row));
  }
  return t;
}

// --- configuration --------------------------------------------------------

AttenuationModel parse_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: malformed JSON: ") + e.what());
  }
  return model_from(j, "model");
}

std::string model_to_json(const AttenuationModel& model) { return model_json(model).dump(); }

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: malformed JSON: ") + e.what());
  }
  ScenarioConfig c;
  Fields f(j, "");
  c.name = f.text("name", c.name);
  if (!f.has("model")) throw InputError("config: missing field 'model'");
  c.model = model_from(f.object("model"), "model");

  if (f.has("geometry")) {
    Fields g(f.object("geometry"), "geometry");
    const std::string kind = g.text("kind", "circle");
    if (kind == "circle") {
      c.geometry.kind = GeometryKind::Circle;
    } else if (kind == "line") {
      c.geometry.kind = GeometryKind::Line;
    } else {
      throw InputError("config: field 'geometry.kind' must be circle or line");
    }
    c.geometry.radius = g.number("radius", c.geometry.radius);
    c.geometry.length = g.number("length", c.geometry.length);
    c.geometry.standoff = g.number("standoff", c.geometry.standoff);
    g.finish();
  }
  c.duration = f.number("duration", c.geometry.kind == GeometryKind::Line ? 8.0 : 6.0);

  if (f.has("forward")) {
    Fields g(f.object("forward"), "forward");
    c.forward_times = g.count("times", c.forward_times);
    c.forward_sensors = g.count("sensors", c.forward_sensors);
    c.forward_order = g.count("taylor_order", c.forward_order);
    c.forward_quadrature.omega_max = g.number("omega_max", c.forward_quadrature.omega_max);
    c.forward_quadrature.nodes = g.count("nodes", c.forward_quadrature.nodes);
    c.forward.margin = g.number("margin", c.forward.margin);
    c.forward.radial_cutoff = g.boolean("radial_cutoff", c.forward.radial_cutoff);
    g.finish();
  }
  if (f.has("inverse")) {
    Fields g(f.object("inverse"), "inverse");
    c.inverse_times = g.count("times", c.inverse_times);
    c.inverse_sensors = g.count("sensors", c.inverse_sensors);
    c.taylor_order = g.count("taylor_order", c.taylor_order);
    c.inverse_quadrature.omega_max = g.number("omega_max", c.inverse_quadrature.omega_max);
    c.inverse_quadrature.nodes = g.count("nodes", c.inverse_quadrature.nodes);
    g.finish();
  }
  c.avoid_inverse_crime = f.boolean("avoid_inverse_crime", c.avoid_inverse_crime);

  if (f.has("phantom")) {
    Fields g(f.object("phantom"), "phantom");
    const std::string kind = g.text("kind", "shepp-logan");
    if (kind == "shepp-logan") {
      c.phantom = PhantomKind::SheppLogan;
    } else if (kind == "disk") {
      c.phantom = PhantomKind::Disk;
    } else {
      throw InputError("config: field 'phantom.kind' must be shepp-logan or disk");
    }
    c.disk_radius = g.number("radius", c.disk_radius);
    c.phantom_grid = g.count("grid", c.phantom_grid);
    c.phantom_supersample = static_cast<int>(g.count("supersample", static_cast<std::size_t>(c.phantom_supersample)));
    g.finish();
  }
  if (f.has("image")) {
    Fields g(f.object("image"), "image");
    c.image_size = g.count("size", c.image_size);
    c.image_half_extent = g.number("half_extent", c.image_half_extent);
    g.finish();
  }
  c.noise = f.number("noise", c.noise);
  c.seed = f.count("seed", c.seed);
  if (f.has("regularization")) {
    Fields g(f.object("regularization"), "regularization");
    const std::string kind = g.text("kind", "none");
    if (kind == "none") {
      c.regularization = Regularization::none();
    } else if (kind == "tikhonov") {
      c.regularization = Regularization::tikhonov(g.required("lambda"));
    } else {
      throw InputError("config: field 'regularization.kind' must be none or tikhonov");
    }
    g.finish();
  }
  if (f.has("ubp")) {
    Fields g(f.object("ubp"), "ubp");
    c.ubp.u_step = g.number("u_step", c.ubp.u_step);
    c.ubp.radius_step = g.number("radius_step", c.ubp.radius_step);
    g.finish();
  }
  c.cross_section_y = f.number("cross_section_y", c.cross_section_y);
  f.finish();
  c.check();
  return c;
}

ScenarioConfig load_scenario_config(const fs::path& path) {
  try {
    return parse_scenario_config(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string scenario_config_to_json(const ScenarioConfig& c) {
  json geometry = c.geometry.kind == GeometryKind::Circle
                      ? json{{"kind", "circle"}, {"radius", c.geometry.radius}}
                      : json{{"kind", "line"}, {"length", c.geometry.length}, {"standoff", c.geometry.standoff}};
  json phantom = {{"kind", c.phantom == PhantomKind::Disk ? "disk" : "shepp-logan"},
                  {"grid", c.phantom_grid},
                  {"supersample", c.phantom_supersample}};
  if (c.phantom == PhantomKind::Disk) phantom["radius"] = c.disk_radius;
  json reg = {{"kind", c.regularization.kind == Regularization::Kind::Tikhonov ? "tikhonov" : "none"}};
  if (c.regularization.kind == Regularization::Kind::Tikhonov) reg["lambda"] = c.regularization.lambda;
  const json j = {
      {"name", c.name},
      {"model", model_json(c.model)},
      {"geometry", geometry},
      {"duration", c.duration},
      {"forward",
       {{"times", c.forward_times},
        {"sensors", c.forward_sensors},
        {"taylor_order", c.forward_order},
        {"omega_max", c.forward_quadrature.omega_max},
        {"nodes", c.forward_quadrature.nodes},
        {"margin", c.forward.margin},
        {"radial_cutoff", c.forward.radial_cutoff}}},
      {"inverse",
       {{"times", c.inverse_times},
        {"sensors", c.inverse_sensors},
        {"taylor_order", c.taylor_order},
        {"omega_max", c.inverse_quadrature.omega_max},
        {"nodes", c.inverse_quadrature.nodes}}},
      {"avoid_inverse_crime", c.avoid_inverse_crime},
      {"phantom", phantom},
      {"image", {{"size", c.image_size}, {"half_extent", c.image_half_extent}}},
      {"noise", c.noise},
      {"seed", c.seed},
      {"regularization", reg},
      {"ubp", {{"u_step", c.ubp.u_step}, {"radius_step", c.ubp.radius_step}}},
      {"cross_section_y", c.cross_section_y},
  };
  return j.dump(2);
}

std::string report_to_json(const ValidationReport& r, const AttenuationModel& model) {
  const json j = {
      {"model", model_json(model)},
      {"description", describe(model)},
      {"classification", to_string(r.classification)},
      {"symmetry_defect", r.symmetry_defect},
      {"min_im_kappa", r.min_im},
      {"growth_bound_min", r.growth_bound_min},
      {"growth_bound_min_exact", r.growth_bound_min_exact},
      {"fd_step", r.fd_step},
      {"kstar_l2", r.kstar_l2},
      {"fit_kappa0", r.fit_kappa0},
      {"fit_beta", r.fit_beta},
      {"grid_points", r.grid_points},
  };
  return j.dump(2);
}

void write_scenario_result(const ScenarioResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(dir.string() + ": cannot create directory");

  write_image(dir / "truth.atwv", result.truth);
  write_image_pgm(result.truth, dir / "truth.pgm");
  write_wave_data(dir / "data.atwv", result.data);

  Table table;
  table.header = {"x", "truth"};
  table.columns = {result.truth_section.coordinate, result.truth_section.values};
  json metrics = {{"name", result.config.name}, {"model", describe(result.config.model)}, {"noise", result.config.noise}};
  for (const char* name : {"naive", "compensated", "full"}) {
    const auto it = result.methods.find(name);
    if (it == result.methods.end()) continue;
    const MethodResult& m = it->second;
    write_image(dir / (std::string(name) + ".atwv"), m.image);
    write_image_pgm(m.image, dir / (std::string(name) + ".pgm"));
    table.header.emplace_back(name);
    table.columns.push_back(m.section.values);
    metrics["rel_l2_error"][name] = m.error;
    metrics["seconds"][name] = m.seconds;
  }
  for (const auto& [k, v] : result.seconds) metrics["seconds"][k] = v;
  write_csv(table, dir / "cross_section.csv");
  write_json(dir / "metrics.json", metrics);
  write_text(dir / "config.json", scenario_config_to_json(result.config) + "\n");
}

}  // namespace wapat
