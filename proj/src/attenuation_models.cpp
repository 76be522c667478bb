// SPDX-License-Identifier: Apache-2.0

#include "wapat/attenuation_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "wapat/types.hpp"

namespace wapat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr cdouble I{0.0, 1.0};

void require_finite(double omega) {
  if (!std::isfinite(omega)) {
    throw InputError("attenuation: frequency must be finite");
  }
}

std::string canonical(const AttenuationModel& model) {
  char buf[128];
  return std::visit(
      overloaded{
          [&](const ConstantLaw& m) {
            std::snprintf(buf, sizeof buf, "constant:%.17g", m.k_inf);
            return std::string(buf);
          },
          [&](const NswLaw& m) {
            std::snprintf(buf, sizeof buf, "nsw:%.17g:%.17g", m.tau, m.tau_tilde);
            return std::string(buf);
          },
          [&](const PowerLaw& m) {
            std::snprintf(buf, sizeof buf, "power:%.17g:%.17g", m.amplitude, m.exponent);
            return std::string(buf);
          },
          [&](const TabulatedWeakLaw& m) {
            std::string s = "tabulated:";
            std::snprintf(buf, sizeof buf, "%.17g", m.k_inf);
            s += buf;
            for (std::size_t i = 0; i < m.omega.size(); ++i) {
              std::snprintf(buf, sizeof buf, ":%.17g,%.17g,%.17g", m.omega[i], m.kstar[i].real(),
                            m.kstar[i].imag());
              s += buf;
            }
            return s;
          },
      },
      model);
}

cdouble tabulated_kstar(const TabulatedWeakLaw& m, double omega) {
  const auto& w = m.omega;
  if (omega < w.front() || omega > w.back()) {
    return {0.0, 0.0};
  }
  auto it = std::upper_bound(w.begin(), w.end(), omega);
  if (it == w.end()) {
    return m.kstar.back();
  }
  const std::size_t hi = static_cast<std::size_t>(it - w.begin());
  const std::size_t lo = hi - 1;
  const double s = (omega - w[lo]) / (w[hi] - w[lo]);
  return (1.0 - s) * m.kstar[lo] + s * m.kstar[hi];
}

}  // namespace

void check_model(const AttenuationModel& model) {
  std::visit(overloaded{
                 [](const ConstantLaw& m) {
                   if (!(m.k_inf >= 0.0) || !std::isfinite(m.k_inf)) {
                     throw InputError("constant law: k_inf must be finite and >= 0");
                   }
                 },
                 [](const NswLaw& m) {
                   if (!(m.tau_tilde > 0.0) || !(m.tau >= m.tau_tilde) || !std::isfinite(m.tau)) {
                     throw InputError("nsw law: require 0 < tau_tilde <= tau");
                   }
                 },
                 [](const PowerLaw& m) {
                   if (!(m.amplitude >= 0.0) || !(m.exponent > 0.0)) {
                     throw InputError("power law: require amplitude >= 0 and exponent > 0");
                   }
                 },
                 [](const TabulatedWeakLaw& m) {
                   if (m.omega.size() < 2 || m.omega.size() != m.kstar.size()) {
                     throw InputError("tabulated law: need >= 2 samples and matching k_* values");
                   }
                   if (!(m.k_inf >= 0.0)) {
                     throw InputError("tabulated law: k_inf must be >= 0");
                   }
                   if (!std::is_sorted(m.omega.begin(), m.omega.end()) ||
                       std::adjacent_find(m.omega.begin(), m.omega.end()) != m.omega.end()) {
                     throw InputError("tabulated law: frequencies must be strictly increasing");
                   }
                   const std::size_t n = m.omega.size();
                   const double scale = std::max(std::abs(m.omega.front()), std::abs(m.omega.back()));
                   for (std::size_t i = 0; i < n; ++i) {
                     if (std::abs(m.omega[i] + m.omega[n - 1 - i]) > 1e-12 * scale) {
                       throw InputError("tabulated law: frequency grid must be symmetric about 0");
                     }
                   }
                 },
             },
             model);
}

bool is_weak_family(const AttenuationModel& model) {
  return !std::holds_alternative<PowerLaw>(model);
}

std::string describe(const AttenuationModel& model) {
  char buf[128];
  std::visit(overloaded{
                 [&](const ConstantLaw& m) { std::snprintf(buf, sizeof buf, "constant(k_inf=%g)", m.k_inf); },
                 [&](const NswLaw& m) {
                   std::snprintf(buf, sizeof buf, "nsw(tau=%g, tau_tilde=%g)", m.tau, m.tau_tilde);
                 },
                 [&](const PowerLaw& m) {
                   std::snprintf(buf, sizeof buf, "power(a=%g, beta=%g)", m.amplitude, m.exponent);
                 },
                 [&](const TabulatedWeakLaw& m) {
                   std::snprintf(buf, sizeof buf, "tabulated(n=%zu, k_inf=%g)", m.omega.size(), m.k_inf);
                 },
             },
             model);
  return buf;
}

std::string fingerprint(const AttenuationModel& model) {
  // FNV-1a, 64 bit
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical(model)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

cdouble eval_kappa(const AttenuationModel& model, double omega) {
  require_finite(omega);
  return std::visit(
      overloaded{
          [&](const ConstantLaw& m) { return cdouble(omega, m.k_inf); },
          [&](const NswLaw& m) {
            const cdouble z = (1.0 - I * omega * m.tau_tilde) / (1.0 - I * omega * m.tau);
            return std::sqrt(m.tau / m.tau_tilde) * omega * std::sqrt(z);
          },
          [&](const PowerLaw& m) {
            return cdouble(omega, m.amplitude * std::pow(std::abs(omega), m.exponent));
          },
          [&](const TabulatedWeakLaw& m) { return cdouble(omega, m.k_inf) + tabulated_kstar(m, omega); },
      },
      model);
}

cdouble eval_kappa_derivative(const AttenuationModel& model, double omega, double fd_step) {
  require_finite(omega);
  return std::visit(
      overloaded{
          [](const ConstantLaw&) { return cdouble(1.0, 0.0); },
          [&](const NswLaw& m) {
            const cdouble den = 1.0 - I * omega * m.tau;
            const cdouble z = (1.0 - I * omega * m.tau_tilde) / den;
            const cdouble g = std::sqrt(z);
            const cdouble dz = I * (m.tau - m.tau_tilde) / (den * den);
            return std::sqrt(m.tau / m.tau_tilde) * (g + omega * dz / (2.0 * g));
          },
          [&](const PowerLaw& m) {
            if (omega == 0.0) {
              return cdouble(1.0, m.exponent == 1.0 ? m.amplitude : 0.0);
            }
            const double sign = omega > 0.0 ? 1.0 : -1.0;
            return cdouble(1.0, m.amplitude * m.exponent * std::pow(std::abs(omega), m.exponent - 1.0) * sign);
          },
          [&](const TabulatedWeakLaw&) {
            return (eval_kappa(model, omega + fd_step) - eval_kappa(model, omega - fd_step)) / (2.0 * fd_step);
          },
      },
      model);
}

double k_infinity(const AttenuationModel& model) {
  return std::visit(overloaded{
                        [](const ConstantLaw& m) { return m.k_inf; },
                        [](const NswLaw& m) { return (m.tau - m.tau_tilde) / (2.0 * m.tau * m.tau_tilde); },
                        [](const PowerLaw&) -> double {
                          throw UnsupportedError("power law is a strong law: no weak decomposition");
                        },
                        [](const TabulatedWeakLaw& m) { return m.k_inf; },
                    },
                    model);
}

cdouble eval_kstar(const AttenuationModel& model, double omega) {
  const double kinf = k_infinity(model);
  require_finite(omega);
  if (std::holds_alternative<ConstantLaw>(model)) {
    return {0.0, 0.0};
  }
  if (const auto* t = std::get_if<TabulatedWeakLaw>(&model)) {
    return tabulated_kstar(*t, omega);
  }
  return eval_kappa(model, omega) - cdouble(omega, kinf);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Weak:
      return "weak";
    case Classification::Strong:
      return "strong";
    case Classification::Neither:
      break;
  }
  return "neither";
}

std::vector<double> symmetric_grid(double omega_max, std::size_t count) {
  if (count < 2 || !(omega_max > 0.0)) {
    throw InputError("symmetric grid: need omega_max > 0 and at least 2 points");
  }
  std::vector<double> g(count);
  const double step = 2.0 * omega_max / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = -omega_max + static_cast<double>(i) * step;
  }
  // exact mirror image
  for (std::size_t i = 0; i < count / 2; ++i) {
    g[count - 1 - i] = -g[i];
  }
  if (count % 2 == 1) {
    g[count / 2] = 0.0;
  }
  return g;
}

ValidationReport validate_model(const AttenuationModel& model, std::span<const double> omega_grid,
                                const ValidationOptions& options) {
  check_model(model);
  const std::size_t n = omega_grid.size();
  if (n < 3) {
    throw InputError("validate_model: grid needs at least 3 points");
  }
  if (!(options.fd_step > 0.0)) {
    throw InputError("validate_model: fd_step must be positive");
  }
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) {
    const double d = omega_grid[i] - omega_grid[i - 1];
    if (!(d > 0.0)) {
      throw InputError("validate_model: grid must be strictly increasing");
    }
    spacing = std::min(spacing, d);
  }
  const double scale = std::max(std::abs(omega_grid.front()), std::abs(omega_grid.back()));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(omega_grid[i] + omega_grid[n - 1 - i]) > 1e-12 * scale) {
      throw InputError("validate_model: grid must be symmetric about 0");
    }
  }

  ValidationReport rep;
  rep.grid_points = n;
  rep.fd_step = options.fd_step * spacing;
  rep.min_im = std::numeric_limits<double>::infinity();
  rep.growth_bound_min = std::numeric_limits<double>::infinity();
  rep.growth_bound_min_exact = std::numeric_limits<double>::infinity();
  const double h = rep.fd_step;
  for (double w : omega_grid) {
    const cdouble k = eval_kappa(model, w);
    const cdouble km = eval_kappa(model, -w);
    rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(km + std::conj(k)));
    rep.min_im = std::min(rep.min_im, k.imag());
    const cdouble dk = (eval_kappa(model, w + h) - eval_kappa(model, w - h)) / (2.0 * h);
    rep.growth_bound_min = std::min(rep.growth_bound_min, std::norm(dk) + k.imag());
    const cdouble dke = eval_kappa_derivative(model, w, h);
    rep.growth_bound_min_exact = std::min(rep.growth_bound_min_exact, std::norm(dke) + k.imag());
  }

  // Weak: decomposition exists and k_* stays bounded without growing towards
  // the ends of the grid.
  bool weak = false;
  if (is_weak_family(model)) {
    double inner = 0.0;
    double outer = 0.0;
    double l2 = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = omega_grid[i];
      const double a = std::abs(eval_kstar(model, w));
      finite = finite && std::isfinite(a);
      const double dw = i + 1 < n ? omega_grid[i + 1] - w : w - omega_grid[i - 1];
      l2 += a * a * dw;
      double& band = std::abs(w) < 0.5 * scale ? inner : outer;
      band = std::max(band, a);
    }
    rep.kstar_l2 = std::sqrt(l2);
    weak = finite && outer <= inner * (1.0 + 1e-12) + 1e-300;
  }

  // Power fit log Im kappa = log kappa0 + beta log|w| over |w| >= omega0.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (double w : omega_grid) {
    const double im = eval_kappa(model, w).imag();
    if (std::abs(w) >= options.omega0 && im > 0.0) {
      const double x = std::log(std::abs(w));
      const double y = std::log(im);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  bool strong = false;
  if (m >= 2) {
    const double md = static_cast<double>(m);
    const double den = md * sxx - sx * sx;
    if (den > 0.0) {
      rep.fit_beta = (md * sxy - sx * sy) / den;
      double kappa0 = std::numeric_limits<double>::infinity();
      for (double w : omega_grid) {
        if (std::abs(w) >= options.omega0) {
          kappa0 = std::min(kappa0, eval_kappa(model, w).imag() / std::pow(std::abs(w), rep.fit_beta));
        }
      }
      rep.fit_kappa0 = kappa0;
      strong = rep.fit_beta > 0.0 && kappa0 > 0.0;
    }
  }

  rep.classification = weak ? Classification::Weak : strong ? Classification::Strong : Classification::Neither;
  return rep;
}

}  // namespace wapat
