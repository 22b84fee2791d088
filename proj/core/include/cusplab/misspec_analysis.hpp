#pragma once

#include <memory>

#include "cusplab/quadrature.hpp"
#include "cusplab/signal_models.hpp"

namespace cusplab {

/// Pure cusp theoretical model M(theta, t) = a |t - theta|^kappa fitted to
/// data from a smooth real signal S(theta0, t).
struct MisspecProblem {
  std::shared_ptr<const CuspSignal> theoretical;
  std::shared_ptr<const SmoothSignal> real;
  double theta0 = 0.0;
  QuadratureOptions quadrature{.rel_tol = 1e-13, .abs_tol = 1e-18};
};

/// Validates the pairing: shared horizon, h == 0 in the theoretical model,
/// theta0 inside the real signal's parameter set.
MisspecProblem make_misspec_problem(std::shared_ptr<const CuspSignal> theoretical,
                                    std::shared_ptr<const SmoothSignal> real, double theta0);

/// ||M(theta, .) - S(theta0, .)||^2 on [0, T], split at theta (Hoelder kink,
/// handled by an endpoint substitution) and at the real signal's breakpoints.
double l2_gap(const MisspecProblem& problem, double theta);

struct MisspecSolution {
  double theta_hat = 0.0;
  /// ||M(theta_hat) - S||^2 and its square root.
  double min_gap = 0.0;
  double min_distance = 0.0;
  /// Second-best local minimum (or the best boundary value when the scan has
  /// a single interior minimum) minus the best value.
  double uniqueness_certificate = 0.0;
  double curvature_closed = 0.0;
  double curvature_fd = 0.0;
  /// Term-by-term assembly of the shifted-integral expansion; a diagnostic
  /// that is not the second derivative (see curvature_shifted_expansion).
  double curvature_shifted_expansion = 0.0;
};

struct SolveConfig {
  /// Scan step is (beta - alpha) / scan_intervals.
  std::size_t scan_intervals = 2000;
  double golden_tol = 1e-10;
  /// Certificates below this raise an ambiguity error.
  double certificate_threshold = 1e-10;
  /// Finite-difference step for curvature_fd.
  double fd_step = 1e-4;
};

/// Global scan plus golden-section refinement of the minimizer theta_hat.
/// Throws DomainError when the minimizer is not unique (certificate below
/// threshold), sits on the boundary, or the curvature is not positive.
MisspecSolution solve_theta_hat(const MisspecProblem& problem, const SolveConfig& config = {});

/// Phi(theta, theta_hat) = l2_gap(theta) - l2_gap(theta_hat)
double phi_gap(const MisspecProblem& problem, const MisspecSolution& solution, double theta);

/// Second derivative of l2_gap at theta in closed form:
///   2ak th^{k-1}(a th^k - S(0)) + 2ak (T-th)^{k-1}(a (T-th)^k - S(T))
///   - 2a [th^k S'(0) - (T-th)^k S'(T) + int |t-th|^k S''(t) dt].
double curvature_closed(const MisspecProblem& problem, double theta);

/// (4 D(h) - D(2h)) / 3 with D(h) the central second difference of l2_gap.
double curvature_fd(const MisspecProblem& problem, double theta, double step = 1e-4);

/// Assembly of boundary cusp terms, [a|.|^k - S] S' boundary products,
/// 2 int |t-th|^k S'' and int [S^2]'' as they appear in the shifted-integral
/// expansion. It agrees with curvature_closed only when S' vanishes at both
/// ends and int |t - th|^k S'' = 0; kept for comparison.
double curvature_shifted_expansion(const MisspecProblem& problem, double theta);

}  // namespace cusplab
