#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double cusp(double a, double kappa, double theta, double t) {
  return a * std::pow(std::abs(t - theta), kappa);
}

/// Closed form of int (|v - 1|^k - |v|^k)^2 dv (a = 1), via the Fourier
/// transform of |v|^k.
inline double gamma_sq_closed(double a, double kappa) {
  const double g = boost::math::tgamma(kappa + 1.0);
  const double s = std::sin(std::numbers::pi * kappa / 2.0);
  return a * a * 4.0 * g * g * s * s /
         (boost::math::tgamma(2.0 * kappa + 2.0) * std::cos(std::numbers::pi * kappa));
}

/// Midpoint rule over [1/2 - V, 1/2 + V] plus the two-term tail expansion of
/// the integrand about the centre. The integrand is symmetric about 1/2, and
/// each half-panel next to the singular point v = 1 is mapped by
/// v = 1 -+ L s^4, so the |v - 1|^k corner is smooth in s and the plain
/// midpoint rule keeps its second order.
inline double gamma_sq_midpoint(double a, double kappa, double half_width, std::size_t nodes) {
  auto f = [kappa](double v) {
    const double d = std::pow(std::abs(v - 1.0), kappa) - std::pow(std::abs(v), kappa);
    return d * d;
  };
  constexpr double m = 4.0;
  auto graded = [&](double length, double sign, std::size_t n) {
    const double h = 1.0 / static_cast<double>(n);
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = (static_cast<double>(i) + 0.5) * h;
      const double jac = m * length * std::pow(s, m - 1.0);
      const long double y = static_cast<long double>(jac * f(1.0 + sign * length * std::pow(s, m))) - comp;
      const long double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return static_cast<double>(sum) * h;
  };
  const std::size_t inner = nodes / 4;
  const double half = graded(0.5, -1.0, inner) + graded(half_width - 0.5, 1.0, nodes - inner);
  const double c3 = kappa * (kappa - 1.0) * (kappa - 2.0) / 6.0;
  const double w = half_width;
  const double tail = 2.0 * (kappa * kappa * std::pow(w, 2.0 * kappa - 1.0) / (1.0 - 2.0 * kappa) +
                             kappa * c3 / 2.0 * std::pow(w, 2.0 * kappa - 3.0) / (3.0 - 2.0 * kappa));
  return a * a * (2.0 * half + tail);
}

/// int_0^x s^{2k} ln^2 s ds
inline double log_square_antiderivative(double x, double kappa) {
  const double p = 2.0 * kappa + 1.0;
  const double l = std::log(x);
  return std::pow(x, p) * (l * l / p - 2.0 * l / (p * p) + 2.0 / (p * p * p));
}

inline double fisher_closed(double a, double rho, double horizon, double kappa) {
  return a * a *
         (log_square_antiderivative(rho, kappa) + log_square_antiderivative(horizon - rho, kappa));
}

inline double tanh_sinh(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, lo, hi, 1e-14);
}

/// Plain midpoint rule.
inline double midpoint(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t nodes) {
  const double h = (hi - lo) / static_cast<double>(nodes);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < nodes; ++i) sum += f(lo + (static_cast<double>(i) + 0.5) * h);
  return static_cast<double>(sum) * h;
}

/// Left-endpoint contrast sum S dX - dt/2 sum S^2 by direct summation.
inline double contrast(const std::function<double(double)>& signal, const std::vector<double>& dx,
                       double dt) {
  long double a = 0.0L;
  long double b = 0.0L;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double s = signal(static_cast<double>(i) * dt);
    a += static_cast<long double>(s) * dx[i];
    b += static_cast<long double>(s) * s;
  }
  return static_cast<double>(a - 0.5L * dt * b);
}

inline double sample_mean(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

inline double sample_var(const std::vector<double>& x) {
  const double m = sample_mean(x);
  long double s = 0.0L;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(s / static_cast<long double>(x.size() - 1));
}

}  // namespace oracle
