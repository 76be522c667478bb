// SPDX-License-Identifier: Apache-2.0
//
// Attenuation coefficients kappa(omega) and their weak-law decomposition
//   kappa(omega) = omega + i k_inf + k_*(omega).

#ifndef WAPAT_ATTENUATION_MODELS_HPP
#define WAPAT_ATTENUATION_MODELS_HPP

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wapat {

using cdouble = std::complex<double>;

/// kappa(omega) = omega + i k_inf.
struct ConstantLaw {
  double k_inf = 0.0;
};

/// Nachman-Smith-Waag relaxation law
///   kappa(omega) = sqrt(tau / tau_tilde) * omega * sqrt((1 - i omega tau_tilde) / (1 - i omega tau)).
/// The leading factor normalizes the high-frequency phase speed to 1 so that
/// kappa - omega tends to i (tau - tau_tilde) / (2 tau tau_tilde).
struct NswLaw {
  double tau = 0.0;
  double tau_tilde = 0.0;
};

/// kappa(omega) = omega + i a |omega|^beta. A strong law.
struct PowerLaw {
  double amplitude = 0.0;
  double exponent = 1.0;
};

/// Weak law given by samples of k_* on a grid symmetric about zero. k_* is
/// interpolated linearly between samples and extended by zero.
struct TabulatedWeakLaw {
  std::vector<double> omega;
  std::vector<cdouble> kstar;
  double k_inf = 0.0;
};

using AttenuationModel = std::variant<ConstantLaw, NswLaw, PowerLaw, TabulatedWeakLaw>;

/// Throws InputError if the parameters violate the law's constraints.
void check_model(const AttenuationModel& model);

bool is_weak_family(const AttenuationModel& model);

/// Short human readable description, e.g. "nsw(tau=0.11, tau_tilde=0.1)".
std::string describe(const AttenuationModel& model);

/// Stable hex digest of the law and all its parameters.
std::string fingerprint(const AttenuationModel& model);

cdouble eval_kappa(const AttenuationModel& model, double omega);

/// Closed-form derivative where available; central differences with step
/// `fd_step` for tabulated laws.
cdouble eval_kappa_derivative(const AttenuationModel& model, double omega, double fd_step = 1e-6);

/// Constant k_inf of the weak decomposition. UnsupportedError for strong laws.
double k_infinity(const AttenuationModel& model);

/// k_*(omega) = kappa(omega) - omega - i k_inf. UnsupportedError for strong laws.
cdouble eval_kstar(const AttenuationModel& model, double omega);

enum class Classification { Weak, Strong, Neither };

std::string to_string(Classification c);

struct ValidationOptions {
  /// Finite-difference step for kappa', relative to the grid spacing.
  double fd_step = 1e-4;
  /// Lower frequency bound of the strong-law power fit.
  double omega0 = 1.0;
};

struct ValidationReport {
  double symmetry_defect = 0.0;         // max |kappa(-w) + conj(kappa(w))|
  double min_im = 0.0;                  // min Im kappa
  double growth_bound_min = 0.0;        // min |kappa'|^2 + Im kappa, kappa' by finite differences
  double fd_step = 0.0;                 // absolute step used for kappa'
  double growth_bound_min_exact = 0.0;  // same with the closed-form derivative
  Classification classification = Classification::Neither;
  double kstar_l2 = 0.0;  // discrete L2 norm of k_*, 0 for strong laws
  double fit_kappa0 = 0.0;  // strong-law fit Im kappa >= kappa0 |w|^beta
  double fit_beta = 0.0;
  std::size_t grid_points = 0;
};

/// Audits symmetry, upper half-plane range and the lower bound of
/// |kappa'|^2 + Im kappa on `omega_grid` (which must be symmetric about 0).
ValidationReport validate_model(const AttenuationModel& model, std::span<const double> omega_grid,
                                const ValidationOptions& options = {});

/// Uniform grid of `count` points on [-omega_max, omega_max].
std::vector<double> symmetric_grid(double omega_max, std::size_t count);

}  // namespace wapat

#endif  // WAPAT_ATTENUATION_MODELS_HPP
