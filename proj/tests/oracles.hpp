// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the tests. None of these call the
// library routine they are used to check.

#ifndef WAPAT_TESTS_ORACLES_HPP
#define WAPAT_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

/// (1/sqrt(2 pi)) int_{-W}^{W} (i k(w))^k e^{-i w s} dw by composite
/// trapezoid with `nodes` points, evaluated at each s in `lags`.
inline std::vector<cd> direct_rk(const std::function<cd(double)>& kstar, int k, const std::vector<double>& lags,
                                 double W, std::size_t nodes) {
  const double h = 2.0 * W / static_cast<double>(nodes - 1);
  std::vector<cd> sym(nodes);
  std::vector<double> w(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    w[n] = -W + h * static_cast<double>(n);
    sym[n] = std::pow(cd(0.0, 1.0) * kstar(w[n]), k);
  }
  std::vector<cd> out;
  for (double s : lags) {
    cd acc = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) {
      const double wt = (n == 0 || n + 1 == nodes) ? 0.5 : 1.0;
      acc += wt * sym[n] * std::exp(cd(0.0, -w[n] * s));
    }
    out.push_back(acc * h / std::sqrt(2.0 * std::numbers::pi));
  }
  return out;
}

/// q^a(t_i) = e^{-k t_i} q_i + dt / sqrt(2 pi) sum_m e^{-k t_m} sum_k t_m^k / k! r_k(t_i - t_m) q_m,
/// with r[k-1][l] holding r_k at lag (l - half) dt. Plain nested loops.
inline std::vector<double> texpress_sum(const std::vector<std::vector<cd>>& r, double k_inf, double dt,
                                        const std::vector<double>& q) {
  const std::size_t n = q.size();
  const long half = static_cast<long>(n) - 1;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = dt * static_cast<double>(i + 1);
    cd acc = std::exp(-k_inf * ti) * q[i];
    for (std::size_t m = 0; m < n; ++m) {
      const double tm = dt * static_cast<double>(m + 1);
      const long lag = static_cast<long>(i) - static_cast<long>(m) + half;
      cd series = 0.0;
      double coef = 1.0;
      for (std::size_t k = 1; k <= r.size(); ++k) {
        coef *= tm / static_cast<double>(k);
        series += coef * r[k - 1][static_cast<std::size_t>(lag)];
      }
      acc += dt / std::sqrt(2.0 * std::numbers::pi) * std::exp(-k_inf * tm) * series * q[m];
    }
    out[i] = acc.real();
  }
  return out;
}

/// Spherical mean of the indicator of the ball |y| <= r0 over the sphere of
/// radius t around a point at distance d, by midpoint rule in cos(theta).
inline double ball_sphere_mean(double r0, double d, double t, std::size_t nodes = 200000) {
  double inside = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const double mu = -1.0 + (2.0 * static_cast<double>(n) + 1.0) / static_cast<double>(nodes);
    // |x + t u|^2 with x at distance d and mu = cos of the angle to -x.
    const double r2 = d * d + t * t - 2.0 * d * t * mu;
    if (r2 <= r0 * r0) inside += 1.0;
  }
  return inside / static_cast<double>(nodes);
}

/// Integrated 3D pressure q(t) = t M(t) for the unit ball (unit sound speed).
inline double ball_integrated(double r0, double d, double t) { return t * ball_sphere_mean(r0, d, t); }

/// Spectral condition number by Jacobi SVD, independent of the library's BDCSVD.
inline double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

}  // namespace oracle

#endif  // WAPAT_TESTS_ORACLES_HPP
