#pragma once

#include <functional>

namespace cusplab {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int max_intervals = 4000;
  /// Power m of the substitution t = a + (b - a) z^m used for endpoint
  /// singularities of Hoelder type |t - a|^p.
  int singular_power = 4;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod: the interval with the largest
/// |K15 - G7| is bisected until the summed error meets the tolerance.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Integral over [a, b] of an f that is only Hoelder continuous at `a`.
/// The substitution t = a + (b - a) z^m moves the singular behaviour into a
/// high power of z; b < a is allowed.
QuadratureResult integrate_singular_at(const Integrand& f, double a, double b,
                                       const QuadratureOptions& options = {});

/// Integral over [a, b] of an f that is only Hoelder continuous at both ends.
QuadratureResult integrate_singular_ends(const Integrand& f, double a, double b,
                                         const QuadratureOptions& options = {});

}  // namespace cusplab
