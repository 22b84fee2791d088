#include "cusplab/misspec_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cusplab/errors.hpp"

namespace cusplab {
namespace {

// Integral over [0, T] of f, split at `kink` (Hoelder singular point, may be
// outside) and at the given smooth breakpoints.
double integrate_with_kink(const Integrand& f, double horizon, double kink,
                           std::vector<double> breaks, const QuadratureOptions& options) {
  breaks.push_back(0.0);
  breaks.push_back(horizon);
  const bool inside = kink > 0.0 && kink < horizon;
  if (inside) breaks.push_back(kink);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (hi <= lo) continue;
    if (inside && lo == kink) {
      total += integrate_singular_at(f, lo, hi, options).value;
    } else if (inside && hi == kink) {
      total -= integrate_singular_at(f, hi, lo, options).value;
    } else {
      total += integrate(f, lo, hi, options).value;
    }
  }
  return total;
}

void check_interior(const MisspecProblem& problem, double theta) {
  const double t = problem.theoretical->horizon();
  detail::require(std::isfinite(theta) && theta > 0.0 && theta < t,
                  "theta must lie strictly inside (0, T)");
}

}  // namespace

MisspecProblem make_misspec_problem(std::shared_ptr<const CuspSignal> theoretical,
                                    std::shared_ptr<const SmoothSignal> real, double theta0) {
  detail::require(theoretical != nullptr && real != nullptr,
                  "misspecified problem needs both a theoretical and a real signal");
  detail::require(theoretical->nuisance().is_zero(),
                  "theoretical model must be the pure cusp a|t - theta|^kappa (h = 0)");
  const double t = theoretical->horizon();
  detail::require(std::abs(real->horizon() - t) <= 1e-12 * t,
                  "theoretical and real signals must share the horizon T");
  detail::require(real->theta_bounds().contains(theta0),
                  "theta0 must lie in the real signal's parameter set");
  MisspecProblem problem;
  problem.theoretical = std::move(theoretical);
  problem.real = std::move(real);
  problem.theta0 = theta0;
  return problem;
}

double l2_gap(const MisspecProblem& problem, double theta) {
  const CuspSignal& m = *problem.theoretical;
  const SmoothSignal& s = *problem.real;
  detail::require(m.theta_bounds().contains(theta), "theta outside the theoretical bounds");
  const double a = m.amplitude();
  const double kappa = m.kappa();
  const double theta0 = problem.theta0;
  auto f = [&](double t) {
    const double d = a * std::pow(std::abs(t - theta), kappa) - s.eval(theta0, t);
    return d * d;
  };
  return integrate_with_kink(f, m.horizon(), theta, s.breakpoints(theta0), problem.quadrature);
}

double curvature_closed(const MisspecProblem& problem, double theta) {
  check_interior(problem, theta);
  const CuspSignal& m = *problem.theoretical;
  const SmoothSignal& s = *problem.real;
  const double a = m.amplitude();
  const double k = m.kappa();
  const double horizon = m.horizon();
  const double th0 = problem.theta0;
  const double left = theta;
  const double right = horizon - theta;
  const double s0 = s.eval(th0, 0.0);
  const double st = s.eval(th0, horizon);
  const double d0 = s.d1(th0, 0.0);
  const double dt = s.d1(th0, horizon);

  auto weighted_d2 = [&](double t) { return std::pow(std::abs(t - theta), k) * s.d2(th0, t); };
  const double integral =
      integrate_with_kink(weighted_d2, horizon, theta, s.breakpoints(th0), problem.quadrature);

  const double boundary = 2.0 * a * k * std::pow(left, k - 1.0) * (a * std::pow(left, k) - s0) +
                          2.0 * a * k * std::pow(right, k - 1.0) * (a * std::pow(right, k) - st);
  return boundary - 2.0 * a * (std::pow(left, k) * d0 - std::pow(right, k) * dt + integral);
}

double curvature_fd(const MisspecProblem& problem, double theta, double step) {
  check_interior(problem, theta);
  detail::require(std::isfinite(step) && step > 0.0, "finite-difference step must be positive");
  const double centre = l2_gap(problem, theta);
  auto second = [&](double h) {
    return (l2_gap(problem, theta + h) + l2_gap(problem, theta - h) - 2.0 * centre) / (h * h);
  };
  return (4.0 * second(step) - second(2.0 * step)) / 3.0;
}

double curvature_shifted_expansion(const MisspecProblem& problem, double theta) {
  check_interior(problem, theta);
  const CuspSignal& m = *problem.theoretical;
  const SmoothSignal& s = *problem.real;
  const double a = m.amplitude();
  const double k = m.kappa();
  const double horizon = m.horizon();
  const double th0 = problem.theta0;
  const double left = theta;
  const double right = horizon - theta;
  const double s0 = s.eval(th0, 0.0);
  const double st = s.eval(th0, horizon);
  const double d0 = s.d1(th0, 0.0);
  const double dt = s.d1(th0, horizon);

  auto weighted_d2 = [&](double t) { return std::pow(std::abs(t - theta), k) * s.d2(th0, t); };
  const double integral =
      integrate_with_kink(weighted_d2, horizon, theta, s.breakpoints(th0), problem.quadrature);
  // int_0^T [S^2]'' dt = [2 S S']_0^T
  const double square_term = 2.0 * st * dt - 2.0 * s0 * d0;

  return 2.0 * a * k * std::pow(left, k - 1.0) * (a * std::pow(left, k) - s0) +
         2.0 * a * k * std::pow(right, k - 1.0) * (a * std::pow(right, k) - st) +
         (a * std::pow(left, k) - s0) * d0 + (a * std::pow(right, k) - st) * dt +
         2.0 * integral + square_term;
}

MisspecSolution solve_theta_hat(const MisspecProblem& problem, const SolveConfig& config) {
  const ThetaBounds bounds = problem.theoretical->theta_bounds();
  detail::require(config.scan_intervals >= 4, "scan needs at least 4 intervals");
  const std::size_t n = config.scan_intervals;
  const double step = bounds.width() / static_cast<double>(n);
  std::vector<double> theta(n + 1);
  std::vector<double> gap(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    theta[i] = i == n ? bounds.upper : bounds.lower + static_cast<double>(i) * step;
    gap[i] = l2_gap(problem, theta[i]);
  }

  auto golden = [&](double lo, double hi) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = l2_gap(problem, x1);
    double f2 = l2_gap(problem, x2);
    while (hi - lo > config.golden_tol) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = l2_gap(problem, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = l2_gap(problem, x2);
      }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
  };

  // Local minima of the scan; interior ones are refined.
  struct Minimum {
    double theta;
    double value;
    bool boundary;
  };
  std::vector<Minimum> minima;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool left_ok = i == 0 || gap[i] <= gap[i - 1];
    const bool right_ok = i == n || gap[i] <= gap[i + 1];
    if (!(left_ok && right_ok)) continue;
    if (i == 0 || i == n) {
      minima.push_back({theta[i], gap[i], true});
      continue;
    }
    auto [x, v] = golden(theta[i - 1], theta[i + 1]);
    if (gap[i] < v) {
      x = theta[i];
      v = gap[i];
    }
    // Plateaus produce neighbouring duplicates of one minimum.
    if (!minima.empty() && !minima.back().boundary && std::abs(minima.back().theta - x) <= step) {
      if (v < minima.back().value) minima.back() = {x, v, false};
      continue;
    }
    minima.push_back({x, v, false});
  }
  std::sort(minima.begin(), minima.end(),
            [](const Minimum& a, const Minimum& b) { return a.value < b.value; });

  const Minimum best = minima.front();
  if (best.boundary) {
    std::ostringstream msg;
    msg << "minimizer of the L2 gap lies on the boundary theta=" << best.theta
        << "; widen the parameter bounds";
    throw DomainError(msg.str());
  }
  double certificate;
  if (minima.size() > 1) {
    certificate = minima[1].value - best.value;
  } else {
    certificate = std::min(gap.front(), gap.back()) - best.value;
  }
  if (!(certificate >= config.certificate_threshold)) {
    std::ostringstream msg;
    msg << "L2 gap minimizer is not unique: certificate " << certificate << " < "
        << config.certificate_threshold << " (best theta=" << best.theta;
    if (minima.size() > 1) msg << ", runner-up theta=" << minima[1].theta;
    msg << ")";
    throw DomainError(msg.str());
  }

  MisspecSolution solution;
  solution.theta_hat = best.theta;
  solution.min_gap = best.value;
  solution.min_distance = std::sqrt(std::max(best.value, 0.0));
  solution.uniqueness_certificate = certificate;
  solution.curvature_closed = curvature_closed(problem, best.theta);
  const double h = std::min(config.fd_step, 0.25 * std::min(best.theta - bounds.lower,
                                                             bounds.upper - best.theta));
  solution.curvature_fd = h > 0.0 ? curvature_fd(problem, best.theta, h) : solution.curvature_closed;
  solution.curvature_shifted_expansion = curvature_shifted_expansion(problem, best.theta);
  if (!(solution.curvature_closed > 0.0)) {
    std::ostringstream msg;
    msg << "curvature at theta_hat=" << best.theta << " is not positive ("
        << solution.curvature_closed << ")";
    throw DomainError(msg.str());
  }
  return solution;
}

double phi_gap(const MisspecProblem& problem, const MisspecSolution& solution, double theta) {
  return l2_gap(problem, theta) - solution.min_gap;
}

}  // namespace cusplab
