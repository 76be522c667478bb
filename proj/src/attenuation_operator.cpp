// SPDX-License-Identifier: Apache-2.0

#include "wapat/attenuation_operator.hpp"

#include <omp.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>

namespace wapat {

namespace {

constexpr cdouble I{0.0, 1.0};
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd columns_of(const WaveData& data) {
  return Eigen::Map<const RowMajorMatrix>(data.values.data(), static_cast<Eigen::Index>(data.num_times()),
                                          static_cast<Eigen::Index>(data.num_sensors()));
}

void store_columns(const Eigen::MatrixXd& cols, WaveData& data) {
  Eigen::Map<RowMajorMatrix>(data.values.data(), cols.rows(), cols.cols()) = cols;
}

template <class Body>
void for_each_index(long n, Execution execution, Body body) {
  if (execution == Execution::Serial) {
    for (long i = 0; i < n; ++i) {
      body(i);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      body(i);
    }
  }
}

}  // namespace

double effective_omega_max(const QuadratureSpec& quad, double dt) {
  return std::min(quad.omega_max, std::numbers::pi / dt);
}

ComplexSeq compute_r1(const KstarSymbol& kstar, const LagGrid& lags, const QuadratureSpec& quad) {
  if (quad.nodes < 2 || !(quad.omega_max > 0.0) || !(lags.dt > 0.0)) {
    throw InputError("compute_r1: need >= 2 quadrature nodes, omega_max > 0 and dt > 0");
  }
  const double wmax = effective_omega_max(quad, lags.dt);
  const std::size_t n = quad.nodes;
  const double dw = 2.0 * wmax / static_cast<double>(n - 1);
  std::vector<double> omega(n);
  ComplexSeq weighted(n);
  for (std::size_t j = 0; j < n; ++j) {
    omega[j] = -wmax + static_cast<double>(j) * dw;
    const double w = (j == 0 || j + 1 == n) ? 0.5 * dw : dw;
    weighted[j] = I * kstar(omega[j]) * w;
  }
  ComplexSeq r1(lags.size());
  const auto nl = static_cast<long>(lags.size());
#pragma omp parallel for schedule(static)
  for (long l = 0; l < nl; ++l) {
    const double s = lags.lag(static_cast<std::size_t>(l));
    cdouble acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      acc += weighted[j] * std::polar(1.0, -omega[j] * s);
    }
    r1[static_cast<std::size_t>(l)] = kInvSqrt2Pi * acc;
  }
  return r1;
}

ComplexSeq compute_r1(const AttenuationModel& model, const LagGrid& lags, const QuadratureSpec& quad) {
  check_model(model);
  (void)k_infinity(model);  // UnsupportedError for strong laws
  if (std::holds_alternative<ConstantLaw>(model)) {
    return ComplexSeq(lags.size(), cdouble{0.0, 0.0});
  }
  return compute_r1([&model](double w) { return eval_kstar(model, w); }, lags, quad);
}

ComplexSeq convolve_step(const ComplexSeq& r1, const ComplexSeq& previous, double dt, ConvolutionMode mode) {
  if (r1.size() != previous.size() || r1.size() % 2 == 0) {
    throw InputError("convolve_step: sequences must share one odd-length lag grid");
  }
  const long size = static_cast<long>(r1.size());
  const long half = size / 2;
  const double scale = dt * kInvSqrt2Pi;
  ComplexSeq out(r1.size(), cdouble{0.0, 0.0});
  if (mode == ConvolutionMode::FullLine) {
    for (long l = 0; l < size; ++l) {
      // lag(l) = lag(m) + lag(p)  =>  p = l - m + half
      const long mlo = std::max(0L, l - half);
      const long mhi = std::min(size - 1, l + half);
      cdouble acc{0.0, 0.0};
      for (long m = mlo; m <= mhi; ++m) {
        acc += r1[static_cast<std::size_t>(m)] * previous[static_cast<std::size_t>(l - m + half)];
      }
      out[static_cast<std::size_t>(l)] = scale * acc;
    }
  } else {
    // r_k(t_i) = dt / sqrt(2 pi) sum_{m=1}^{i} r_1(t_m) r_{k-1}(t_i - t_m), zero for t_i <= 0
    for (long i = 1; i <= half; ++i) {
      cdouble acc{0.0, 0.0};
      for (long m = 1; m <= i; ++m) {
        acc += r1[static_cast<std::size_t>(half + m)] * previous[static_cast<std::size_t>(half + i - m)];
      }
      out[static_cast<std::size_t>(half + i)] = scale * acc;
    }
  }
  return out;
}

ComplexSeq compute_rk(const ComplexSeq& r1, std::size_t k, double dt, ConvolutionMode mode) {
  if (k < 2) {
    throw InputError("compute_rk: order must be >= 2");
  }
  ComplexSeq r = r1;
  for (std::size_t order = 2; order <= k; ++order) {
    r = convolve_step(r1, r, dt, mode);
  }
  return r;
}

KernelSeries build_kernel_series(const ComplexSeq& r1, std::size_t order, const LagGrid& lags,
                                 const QuadratureSpec& quad, ConvolutionMode mode) {
  if (order < 1) {
    throw InputError("kernel series: order must be >= 1");
  }
  if (r1.size() != lags.size()) {
    throw InputError("kernel series: r_1 does not match the lag grid");
  }
  KernelSeries ks{lags, quad, {}};
  ks.r.reserve(order);
  ks.r.push_back(r1);
  for (std::size_t k = 2; k <= order; ++k) {
    ks.r.push_back(convolve_step(r1, ks.r.back(), lags.dt, mode));
  }
  return ks;
}

AttenuationSystem::AttenuationSystem(TimeGrid grid, std::string fingerprint, double k_inf, Eigen::MatrixXd matrix,
                                     double imag_residue)
    : grid_(grid),
      fingerprint_(std::move(fingerprint)),
      k_inf_(k_inf),
      matrix_(std::move(matrix)),
      imag_residue_(imag_residue) {
  const auto n = static_cast<Eigen::Index>(grid_.count);
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InputError("attenuation system: matrix size does not match the time grid");
  }
}

Eigen::MatrixXd AttenuationSystem::off_diagonal_part() const {
  Eigen::MatrixXd b = matrix_;
  for (Eigen::Index m = 0; m < b.rows(); ++m) {
    b(m, m) -= std::exp(-k_inf_ * grid_.time(static_cast<std::size_t>(m)));
  }
  return b;
}

double AttenuationSystem::condition_number() const {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix_);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
}

Eigen::MatrixXd AttenuationSystem::solve(const Eigen::MatrixXd& rhs, const Regularization& reg,
                                         Execution execution) const {
  if (rhs.rows() != matrix_.rows()) {
    throw InputError("attenuation solve: right-hand side has the wrong number of time samples");
  }
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  const long ncols = static_cast<long>(rhs.cols());
  if (reg.kind == Regularization::Kind::None) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix_);
    // Eigen's estimate is unreliable on exactly singular factors, so the
    // pivot ratio bounds it from above.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    if (!(rcond > 16.0 * DBL_EPSILON)) {
      throw ConditioningError("attenuation solve: matrix is singular to working precision", 1.0 / rcond);
    }
    for_each_index(ncols, execution, [&](long j) { x.col(j) = lu.solve(rhs.col(j)); });
    return x;
  }
  if (!(reg.lambda >= 0.0)) {
    throw InputError("attenuation solve: Tikhonov lambda must be >= 0");
  }
  Eigen::MatrixXd normal = matrix_.transpose() * matrix_;
  normal.diagonal().array() += reg.lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw ConditioningError("attenuation solve: normal equations are not positive definite", INFINITY);
  }
  const Eigen::MatrixXd mt = matrix_.transpose();
  for_each_index(ncols, execution, [&](long j) {
    const Eigen::VectorXd b = mt * rhs.col(j);
    x.col(j) = ldlt.solve(b);
  });
  return x;
}

std::string system_key(const AttenuationModel& model, const TimeGrid& grid, const SystemOptions& options) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s:%.17g:%zu:%zu:%.17g:%zu:%d", fingerprint(model).c_str(), grid.dt, grid.count,
                options.taylor_order, options.quadrature.omega_max, options.quadrature.nodes,
                static_cast<int>(options.mode));
  std::uint64_t h = 14695981039346656037ull;
  for (const char* c = buf; *c != '\0'; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AttenuationSystem build_system(const AttenuationModel& model, const TimeGrid& grid, const SystemOptions& options) {
  check_model(model);
  const double kinf = k_infinity(model);
  const std::size_t order = options.taylor_order;
  if (order < 1) {
    throw InputError("build_system: Taylor order must be >= 1");
  }
  if (grid.count == 0 || !(grid.dt > 0.0)) {
    throw InputError("build_system: empty time grid");
  }
  const double tmax = grid.duration();
  if (static_cast<double>(order) * std::log(tmax) - std::lgamma(static_cast<double>(order) + 1.0) >=
      std::log(DBL_MAX)) {
    throw Error("build_system: t^K / K! overflows double precision");
  }

  const std::size_t n = grid.count;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double imag_max = 0.0;
  if (!std::holds_alternative<ConstantLaw>(model)) {
    const LagGrid lags = LagGrid::for_time_grid(grid);
    const KernelSeries ks =
        build_kernel_series(compute_r1(model, lags, options.quadrature), order, lags, options.quadrature, options.mode);
    const auto nn = static_cast<long>(n);
    std::vector<double> col_imag(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long mi = 0; mi < nn; ++mi) {
      const auto mc = static_cast<std::size_t>(mi);
      const double tm = grid.time(mc);
      std::vector<double> coef(order);
      double c = 1.0;
      for (std::size_t k = 1; k <= order; ++k) {
        c *= tm / static_cast<double>(k);
        coef[k - 1] = c;
      }
      const double pre = grid.dt * kInvSqrt2Pi * std::exp(-kinf * tm);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lag = i + lags.half - mc;
        cdouble acc{0.0, 0.0};
        for (std::size_t k = 0; k < order; ++k) {
          acc += coef[k] * ks.r[k][lag];
        }
        acc *= pre;
        m(static_cast<Eigen::Index>(i), mi) = acc.real();
        col_imag[mc] = std::max(col_imag[mc], std::abs(acc.imag()));
      }
    }
    imag_max = *std::max_element(col_imag.begin(), col_imag.end());
  }
  for (std::size_t i = 0; i < n; ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += std::exp(-kinf * grid.time(i));
  }
  const double mmax = m.cwiseAbs().maxCoeff();
  const double residue = mmax > 0.0 ? imag_max / mmax : 0.0;
  return AttenuationSystem(grid, system_key(model, grid, options), kinf, std::move(m), residue);
}

WaveData apply_attenuation(const AttenuationSystem& system, const WaveData& q, Execution execution) {
  if (q.kind != DataKind::Integrated) {
    throw InputError("apply_attenuation: input must be integrated pressure q");
  }
  if (!(q.time == system.grid())) {
    throw InputError("apply_attenuation: time grid of the data does not match the system");
  }
  const Eigen::MatrixXd cols = columns_of(q);
  Eigen::MatrixXd out(cols.rows(), cols.cols());
  const Eigen::MatrixXd& m = system.matrix();
  for_each_index(static_cast<long>(cols.cols()), execution, [&](long j) { out.col(j).noalias() = m * cols.col(j); });
  WaveData qa(DataKind::AttenuatedIntegrated, q.time, q.sensors);
  store_columns(out, qa);
  return qa;
}

WaveData invert_attenuation(const AttenuationSystem& system, const WaveData& qa, const Regularization& reg,
                            Execution execution) {
  if (qa.kind != DataKind::AttenuatedIntegrated) {
    throw InputError("invert_attenuation: input must be attenuated integrated pressure q^a");
  }
  if (!(qa.time == system.grid())) {
    throw InputError("invert_attenuation: time grid of the data does not match the system");
  }
  const Eigen::MatrixXd x = system.solve(columns_of(qa), reg, execution);
  WaveData q(DataKind::Integrated, qa.time, qa.sensors);
  store_columns(x, q);
  return q;
}

}  // namespace wapat
