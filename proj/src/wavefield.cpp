// SPDX-License-Identifier: Apache-2.0

#include "wapat/wavefield.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wapat {

namespace {

constexpr double kPi = std::numbers::pi;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) {
    throw Error("spectral propagator: allocation failed");
  }
  return FftwBuffer<T>(p);
}

// Smallest m >= n of the form 2^a 3^b 5^c with m even.
std::size_t fft_friendly(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 2);; ++m) {
    if (m % 2 != 0) {
      continue;
    }
    std::size_t r = m;
    for (std::size_t f : {2u, 3u, 5u}) {
      while (r % f == 0) {
        r /= f;
      }
    }
    if (r == 1) {
      return m;
    }
  }
}

double ellipse_half_width_x(const Ellipse& e) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  return std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
}

double ellipse_half_width_y(const Ellipse& e) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  return std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
}

}  // namespace

bool Ellipse::contains(Vec2 p) const {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double c = std::cos(angle), s = std::sin(angle);
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
}

double Phantom::value_at(Vec2 p) const {
  if (!ellipses.empty()) {
    double v = 0.0;
    for (const auto& e : ellipses) {
      if (e.contains(p)) {
        v += e.intensity;
      }
    }
    return v;
  }
  const double fx = (p.x - grid.origin.x) / grid.spacing;
  const double fy = (p.y - grid.origin.y) / grid.spacing;
  const long ix = std::lround(fx);
  const long iy = std::lround(fy);
  if (ix < 0 || iy < 0 || ix >= static_cast<long>(grid.nx) || iy >= static_cast<long>(grid.ny)) {
    return 0.0;
  }
  return values[static_cast<std::size_t>(iy) * grid.nx + static_cast<std::size_t>(ix)];
}

double Phantom::support_half_width() const {
  double r = 0.0;
  if (!ellipses.empty()) {
    for (const auto& e : ellipses) {
      r = std::max(r, std::abs(e.center.x) + ellipse_half_width_x(e));
      r = std::max(r, std::abs(e.center.y) + ellipse_half_width_y(e));
    }
    return r;
  }
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      if (values[iy * grid.nx + ix] != 0.0) {
        const Vec2 p = grid.position(ix, iy);
        r = std::max({r, std::abs(p.x) + 0.5 * grid.spacing, std::abs(p.y) + 0.5 * grid.spacing});
      }
    }
  }
  return r;
}

Image2D Phantom::as_image() const {
  Image2D img(grid);
  img.values = values;
  img.method = "truth";
  return img;
}

Image2D rasterize(const Phantom& phantom, const ImageGrid& grid, int supersample) {
  if (supersample < 1) {
    throw InputError("rasterize: supersample must be >= 1");
  }
  Image2D img(grid);
  img.method = "truth";
  const double inv = 1.0 / static_cast<double>(supersample * supersample);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const Vec2 c = grid.position(ix, iy);
      double acc = 0.0;
      for (int sy = 0; sy < supersample; ++sy) {
        for (int sx = 0; sx < supersample; ++sx) {
          const double ox = ((sx + 0.5) / supersample - 0.5) * grid.spacing;
          const double oy = ((sy + 0.5) / supersample - 0.5) * grid.spacing;
          acc += phantom.value_at({c.x + ox, c.y + oy});
        }
      }
      img.at(ix, iy) = supersample == 1 ? acc : acc * inv;
    }
  }
  return img;
}

Phantom make_ellipse_phantom(std::vector<Ellipse> ellipses, const ImageGrid& grid, int supersample) {
  for (const auto& e : ellipses) {
    if (!(e.a > 0.0) || !(e.b > 0.0)) {
      throw InputError("ellipse phantom: semi-axes must be positive");
    }
  }
  Phantom ph;
  ph.grid = grid;
  ph.ellipses = std::move(ellipses);
  ph.values = rasterize(ph, grid, supersample).values;
  const double half = 0.5 * static_cast<double>(std::min(grid.nx, grid.ny)) * grid.spacing;
  if (ph.support_half_width() >= half) {
    throw InputError("ellipse phantom: support is not strictly inside the grid");
  }
  return ph;
}

std::vector<Ellipse> shepp_logan_ellipses() {
  struct Row {
    double x, y, a, b, deg, c;
  };
  static constexpr Row table[] = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 2.0},          {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.02},     {-0.22, 0.0, 0.16, 0.41, 18.0, -0.02},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.01},        {0.0, 0.1, 0.046, 0.046, 0.0, 0.01},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.01},      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.01},
      {0.0, -0.606, 0.023, 0.023, 0.0, 0.01},    {0.06, -0.605, 0.023, 0.046, 0.0, 0.01},
  };
  constexpr double scale = 0.8;
  std::vector<Ellipse> out;
  for (const auto& r : table) {
    out.push_back({{scale * r.x, scale * r.y}, scale * r.a, scale * r.b, r.deg * kPi / 180.0, r.c});
  }
  return out;
}

Phantom make_shepp_logan(std::size_t grid_size, double half_extent, int supersample) {
  if (grid_size < 16) {
    throw InputError("shepp-logan: grid_size must be >= 16");
  }
  if (!(half_extent >= 0.8)) {
    throw InputError("shepp-logan: half_extent must be >= 0.8 or the phantom is clipped");
  }
  return make_ellipse_phantom(shepp_logan_ellipses(), ImageGrid::square(grid_size, half_extent), supersample);
}

Phantom make_disk(double radius, double intensity, std::size_t grid_size, double half_extent, int supersample) {
  if (!(radius > 0.0) || !(half_extent > radius)) {
    throw InputError("disk phantom: need 0 < radius < half_extent");
  }
  return make_ellipse_phantom({Ellipse{{0.0, 0.0}, radius, radius, 0.0, intensity}},
                              ImageGrid::square(grid_size, half_extent), supersample);
}

SensorArray make_circle_sensors(double radius, std::size_t count) {
  if (!(radius > 0.0)) {
    throw InputError("circle sensors: radius must be positive");
  }
  if (count == 0) {
    throw InputError("circle sensors: count must be positive");
  }
  SensorArray s;
  s.kind = GeometryKind::Circle;
  s.radius = radius;
  const double step = 2.0 * kPi / static_cast<double>(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double a = static_cast<double>(j) * step;
    const Vec2 n{std::cos(a), std::sin(a)};
    s.points.push_back(radius * n);
    s.normals.push_back(n);
    s.weights.push_back(radius * step);
  }
  return s;
}

SensorArray make_line_sensors(double length, double standoff, std::size_t count) {
  if (!(length > 0.0) || !(standoff > 0.0)) {
    throw InputError("line sensors: length and standoff must be positive");
  }
  if (count < 2) {
    throw InputError("line sensors: count must be >= 2");
  }
  SensorArray s;
  s.kind = GeometryKind::Line;
  s.length = length;
  s.standoff = standoff;
  const double step = length / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    s.points.push_back({-0.5 * length + static_cast<double>(j) * step, -standoff});
    s.normals.push_back({0.0, -1.0});
    s.weights.push_back(step);
  }
  return s;
}

SensorArray make_sensors(const SensorSpec& spec) {
  if (spec.count < 8) {
    throw InputError("sensors: count must be >= 8");
  }
  return spec.kind == GeometryKind::Circle ? make_circle_sensors(spec.radius, spec.count)
                                           : make_line_sensors(spec.length, spec.standoff, spec.count);
}

// ---------------------------------------------------------------------------
// Spectral propagator

struct SpectralPropagator::Impl {
  std::size_t n = 0;
  std::size_t nc = 0;  // n / 2 + 1 complex columns
  double spacing = 0.0;
  Vec2 origin;
  FftwBuffer<fftw_complex> spectrum;  // normalized FFT of h
  std::vector<double> wavenumber;     // |k| per complex coefficient
  fftw_plan inverse = nullptr;

  Impl(std::vector<double> field, std::size_t n_, double spacing_, Vec2 origin_, bool radial_cutoff)
      : n(n_), nc(n_ / 2 + 1), spacing(spacing_), origin(origin_) {
    spectrum = fftw_buffer<fftw_complex>(n * nc);
    auto real = fftw_buffer<double>(n * n);
    std::copy(field.begin(), field.end(), real.get());
    const int ni = static_cast<int>(n);
    fftw_plan fwd = fftw_plan_dft_r2c_2d(ni, ni, real.get(), spectrum.get(), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    const double dk = 2.0 * kPi / (static_cast<double>(n) * spacing);
    const double knyq = kPi / spacing;
    const double norm = 1.0 / static_cast<double>(n * n);
    wavenumber.resize(n * nc);
    for (std::size_t r = 0; r < n; ++r) {
      const double ky = dk * (r <= n / 2 ? static_cast<double>(r) : static_cast<double>(r) - static_cast<double>(n));
      for (std::size_t c = 0; c < nc; ++c) {
        const double kx = dk * static_cast<double>(c);
        const double k = std::hypot(kx, ky);
        const std::size_t idx = r * nc + c;
        wavenumber[idx] = k;
        const double scale = (radial_cutoff && k > knyq) ? 0.0 : norm;
        spectrum[idx][0] *= scale;
        spectrum[idx][1] *= scale;
      }
    }

    auto cbuf = fftw_buffer<fftw_complex>(n * nc);
    inverse = fftw_plan_dft_c2r_2d(ni, ni, cbuf.get(), real.get(), FFTW_ESTIMATE);
  }

  ~Impl() {
    if (inverse != nullptr) {
      fftw_destroy_plan(inverse);
    }
  }

  // Applies the multiplier m(|k|, t) and transforms back into `out`.
  template <class Multiplier>
  void synthesize(Multiplier m, fftw_complex* work, double* out) const {
    for (std::size_t i = 0; i < n * nc; ++i) {
      const double f = m(wavenumber[i]);
      work[i][0] = spectrum[i][0] * f;
      work[i][1] = spectrum[i][1] * f;
    }
    fftw_execute_dft_c2r(inverse, work, out);
  }
};

SpectralPropagator::SpectralPropagator(std::vector<double> field, std::size_t n, double spacing, Vec2 origin,
                                       bool radial_cutoff) {
  if (n < 2 || n % 2 != 0 || field.size() != n * n || !(spacing > 0.0)) {
    throw InputError("spectral propagator: need an even n x n field with positive spacing");
  }
  impl_ = std::make_unique<Impl>(std::move(field), n, spacing, origin, radial_cutoff);
}

SpectralPropagator::SpectralPropagator(const Phantom& phantom, double duration, std::span<const Vec2> reach_points,
                                       const ForwardOptions& options) {
  const ImageGrid& g = phantom.grid;
  if (g.nx != g.ny) {
    throw InputError("spectral propagator: phantom grid must be square");
  }
  const double s = g.spacing;
  const double support = phantom.support_half_width();
  // Phantom grid centre; the padded grid is centred on it.
  const Vec2 centre{g.origin.x + 0.5 * static_cast<double>(g.nx - 1) * s,
                    g.origin.y + 0.5 * static_cast<double>(g.ny - 1) * s};
  double reach = 0.0;
  for (const Vec2& p : reach_points) {
    reach = std::max({reach, std::abs(p.x - centre.x), std::abs(p.y - centre.y)});
  }
  // A periodic image shifted by L along an axis stays at least
  // L - reach - support away from every sensor.
  const double side = std::max(reach + support + duration, 2.0 * reach + 2.0 * s) + options.margin;
  std::size_t n = fft_friendly(static_cast<std::size_t>(std::ceil(side / s)));
  if (n < g.nx) {
    n = fft_friendly(g.nx);
  }
  if ((n - g.nx) % 2 != 0) {
    n = fft_friendly(n + 1);
    while ((n - g.nx) % 2 != 0) {
      n = fft_friendly(n + 1);
    }
  }
  const std::size_t offset = (n - g.nx) / 2;
  std::vector<double> field(n * n, 0.0);
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    std::copy_n(phantom.values.begin() + static_cast<std::ptrdiff_t>(iy * g.nx), g.nx,
                field.begin() + static_cast<std::ptrdiff_t>((iy + offset) * n + offset));
  }
  const Vec2 origin{g.origin.x - static_cast<double>(offset) * s, g.origin.y - static_cast<double>(offset) * s};
  impl_ = std::make_unique<Impl>(std::move(field), n, s, origin, options.radial_cutoff);
}

SpectralPropagator::~SpectralPropagator() = default;
SpectralPropagator::SpectralPropagator(SpectralPropagator&&) noexcept = default;
SpectralPropagator& SpectralPropagator::operator=(SpectralPropagator&&) noexcept = default;

std::size_t SpectralPropagator::size() const { return impl_->n; }
double SpectralPropagator::spacing() const { return impl_->spacing; }
Vec2 SpectralPropagator::origin() const { return impl_->origin; }

std::vector<double> SpectralPropagator::pressure(double t) const {
  auto work = fftw_buffer<fftw_complex>(impl_->n * impl_->nc);
  auto out = fftw_buffer<double>(impl_->n * impl_->n);
  impl_->synthesize([t](double k) { return std::cos(k * t); }, work.get(), out.get());
  return {out.get(), out.get() + impl_->n * impl_->n};
}

std::vector<double> SpectralPropagator::integrated(double t) const {
  auto work = fftw_buffer<fftw_complex>(impl_->n * impl_->nc);
  auto out = fftw_buffer<double>(impl_->n * impl_->n);
  impl_->synthesize([t](double k) { return k == 0.0 ? t : std::sin(k * t) / k; }, work.get(), out.get());
  return {out.get(), out.get() + impl_->n * impl_->n};
}

double SpectralPropagator::mode_energy(double t) const {
  const Impl& m = *impl_;
  double e = 0.0;
  for (std::size_t r = 0; r < m.n; ++r) {
    for (std::size_t c = 0; c < m.nc; ++c) {
      const std::size_t i = r * m.nc + c;
      const double k = m.wavenumber[i];
      const double h2 = m.spectrum[i][0] * m.spectrum[i][0] + m.spectrum[i][1] * m.spectrum[i][1];
      const double pc = std::cos(k * t);
      const double qs = k == 0.0 ? 0.0 : std::sin(k * t);  // |k| * sin(|k|t)/|k|
      const double w = (c == 0 || (m.n % 2 == 0 && c == m.n / 2)) ? 1.0 : 2.0;
      e += w * h2 * (pc * pc + qs * qs);
    }
  }
  return e;
}

double SpectralPropagator::sample(std::span<const double> field, Vec2 p) const {
  const Impl& m = *impl_;
  const double fx = (p.x - m.origin.x) / m.spacing;
  const double fy = (p.y - m.origin.y) / m.spacing;
  const double last = static_cast<double>(m.n - 1);
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= last && fy <= last)) {
    throw InputError("spectral propagator: sample point outside the computational domain");
  }
  const std::size_t ix = std::min(static_cast<std::size_t>(fx), m.n - 2);
  const std::size_t iy = std::min(static_cast<std::size_t>(fy), m.n - 2);
  const double ax = fx - static_cast<double>(ix);
  const double ay = fy - static_cast<double>(iy);
  const double* row0 = field.data() + iy * m.n;
  const double* row1 = row0 + m.n;
  return (1.0 - ay) * ((1.0 - ax) * row0[ix] + ax * row0[ix + 1]) +
         ay * ((1.0 - ax) * row1[ix] + ax * row1[ix + 1]);
}

WaveData spectral_forward(const Phantom& phantom, const TimeGrid& time, const SensorArray& sensors,
                          const ForwardOptions& options) {
  if (time.count == 0 || sensors.size() == 0) {
    throw InputError("spectral_forward: empty time grid or sensor array");
  }
  const SpectralPropagator prop(phantom, time.duration(), sensors.points, options);
  const double side = prop.side();
  const Vec2 o = prop.origin();
  for (const Vec2& p : sensors.points) {
    if (p.x < o.x || p.y < o.y || p.x > o.x + side - prop.spacing() || p.y > o.y + side - prop.spacing()) {
      throw InputError("spectral_forward: sensor outside the padded domain");
    }
  }

  WaveData out(DataKind::Pressure, time, sensors);
  const std::size_t ns = sensors.size();
  const auto nt = static_cast<long>(time.count);
  auto step = [&](long i, std::vector<double>& field) {
    field = prop.pressure(time.time(static_cast<std::size_t>(i)));
    for (std::size_t j = 0; j < ns; ++j) {
      out.values[static_cast<std::size_t>(i) * ns + j] = prop.sample(field, sensors.points[j]);
    }
  };
  if (options.execution == Execution::Serial) {
    std::vector<double> field;
    for (long i = 0; i < nt; ++i) {
      step(i, field);
    }
  } else {
#pragma omp parallel
    {
      std::vector<double> field;
#pragma omp for schedule(static)
      for (long i = 0; i < nt; ++i) {
        step(i, field);
      }
    }
  }
  return out;
}

double ball_nwave_pressure(double r0, double d, double t) {
  return std::abs(d - t) <= r0 ? (d - t) / (2.0 * d) : 0.0;
}

double ball_nwave_integrated(double r0, double d, double t) {
  return std::abs(d - t) <= r0 ? (r0 * r0 - (d - t) * (d - t)) / (4.0 * d) : 0.0;
}

}  // namespace wapat
