// SPDX-License-Identifier: Apache-2.0
//
// Discrete attenuation solution operator q -> q^a and its inverse.
//
// For a weak law kappa = omega + i k_inf + k_* the integrated attenuated
// pressure is
//
//   q^a(t) = e^{-k_inf t} q(t)
//          + 1/sqrt(2 pi) int e^{-k_inf tau} sum_k tau^k / k! r_k(t - tau) q(tau) dtau,
//
// with r_k the inverse Fourier transform of (i k_*)^k. On the time grid this
// is the dense matrix M = diag(e^{-k_inf t_m}) + B acting on each sensor trace.

#ifndef WAPAT_ATTENUATION_OPERATOR_HPP
#define WAPAT_ATTENUATION_OPERATOR_HPP

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "wapat/attenuation_models.hpp"
#include "wapat/types.hpp"

namespace wapat {

using ComplexSeq = std::vector<cdouble>;
using KstarSymbol = std::function<cdouble(double)>;

/// Composite trapezoid on [-omega_max, omega_max]. The effective range is
/// clamped to the Nyquist frequency pi / dt of the lag grid.
struct QuadratureSpec {
  double omega_max = 200.0;
  std::size_t nodes = 16384;
  bool operator==(const QuadratureSpec&) const = default;
};

/// Lags l * dt for l = -half..half (size 2 half + 1).
struct LagGrid {
  double dt = 0.0;
  std::size_t half = 0;

  static LagGrid for_time_grid(const TimeGrid& t) { return {t.dt, t.count - 1}; }
  std::size_t size() const { return 2 * half + 1; }
  double lag(std::size_t index) const {
    return (static_cast<double>(index) - static_cast<double>(half)) * dt;
  }
  std::size_t zero() const { return half; }
};

/// Range actually integrated for a given lag spacing.
double effective_omega_max(const QuadratureSpec& quad, double dt);

enum class ConvolutionMode {
  FullLine,  // sum over all lags of the grid
  Causal,    // sum over m = 1..i only, as in the original pseudocode
};

/// r_1(s) = 1/sqrt(2 pi) int i k_*(w) e^{-i w s} dw on the lag grid.
ComplexSeq compute_r1(const KstarSymbol& kstar, const LagGrid& lags, const QuadratureSpec& quad);
/// Same for a weak attenuation law. UnsupportedError for strong laws.
ComplexSeq compute_r1(const AttenuationModel& model, const LagGrid& lags, const QuadratureSpec& quad);

/// One recursion step r_k = 1/sqrt(2 pi) (r_1 * r_{k-1}) with weight dt.
ComplexSeq convolve_step(const ComplexSeq& r1, const ComplexSeq& previous, double dt,
                         ConvolutionMode mode = ConvolutionMode::FullLine);

/// r_k by k - 1 recursion steps from r_1. InputError if k < 2.
ComplexSeq compute_rk(const ComplexSeq& r1, std::size_t k, double dt,
                      ConvolutionMode mode = ConvolutionMode::FullLine);

/// r_1 .. r_K on a common lag grid.
struct KernelSeries {
  LagGrid lags;
  QuadratureSpec quadrature;
  std::vector<ComplexSeq> r;  // r[k - 1] holds r_k

  std::size_t order() const { return r.size(); }
};

KernelSeries build_kernel_series(const ComplexSeq& r1, std::size_t order, const LagGrid& lags,
                                 const QuadratureSpec& quad, ConvolutionMode mode = ConvolutionMode::FullLine);

struct SystemOptions {
  std::size_t taylor_order = 10;
  QuadratureSpec quadrature;
  ConvolutionMode mode = ConvolutionMode::FullLine;
};

struct Regularization {
  enum class Kind { None, Tikhonov };
  Kind kind = Kind::None;
  double lambda = 0.0;

  static Regularization none() { return {}; }
  static Regularization tikhonov(double lambda) { return {Kind::Tikhonov, lambda}; }
};

/// Dense N_T x N_T matrix M = diag(e^{-k_inf t_m}) + B for one time grid.
class AttenuationSystem {
 public:
  AttenuationSystem(TimeGrid grid, std::string fingerprint, double k_inf, Eigen::MatrixXd matrix,
                    double imag_residue);

  const TimeGrid& grid() const { return grid_; }
  const std::string& fingerprint() const { return fingerprint_; }
  double k_inf() const { return k_inf_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// max |Im M_im| / max |M_im| before the imaginary part was discarded.
  double imag_residue() const { return imag_residue_; }
  /// B = M - diag(e^{-k_inf t_m}).
  Eigen::MatrixXd off_diagonal_part() const;
  /// 2-norm condition number (via singular values).
  double condition_number() const;

  /// Solves M x = b (or the Tikhonov normal equations) for every column of b.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs, const Regularization& reg,
                        Execution execution = Execution::Parallel) const;

 private:
  TimeGrid grid_;
  std::string fingerprint_;
  double k_inf_;
  Eigen::MatrixXd matrix_;
  double imag_residue_;
};

/// Cache key of a system: law, grid, Taylor order and quadrature.
std::string system_key(const AttenuationModel& model, const TimeGrid& grid, const SystemOptions& options);

AttenuationSystem build_system(const AttenuationModel& model, const TimeGrid& grid, const SystemOptions& options = {});

/// Column-wise q^a_j = M q_j. Input kind must be integrated pressure.
WaveData apply_attenuation(const AttenuationSystem& system, const WaveData& q,
                           Execution execution = Execution::Parallel);

/// Column-wise solve M q_j = q^a_j, or (M^T M + lambda I) q_j = M^T q^a_j.
/// ConditioningError when M is numerically singular and no regularization is given.
WaveData invert_attenuation(const AttenuationSystem& system, const WaveData& qa,
                            const Regularization& reg = Regularization::none(),
                            Execution execution = Execution::Parallel);

}  // namespace wapat

#endif  // WAPAT_ATTENUATION_OPERATOR_HPP
