#include "cusplab/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace cusplab {
namespace {

// Kronrod abscissae (descending) with the Gauss nodes at odd positions.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& options) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  panels.push(first);

  auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
  while (error > tolerance() && static_cast<int>(panels.size()) < options.max_intervals) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) break;  // interval exhausted in floating point
    panels.pop();
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from the panels: the running total accumulates cancellation noise.
  QuadratureResult result;
  result.intervals = static_cast<int>(panels.size());
  std::vector<double> values;
  values.reserve(panels.size());
  double err = 0.0;
  while (!panels.empty()) {
    values.push_back(panels.top().value);
    err += panels.top().error;
    panels.pop();
  }
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double y = v - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  result.value = sum;
  result.error = err;
  result.converged = err <= std::max(options.abs_tol, options.rel_tol * std::abs(sum));
  return result;
}

QuadratureResult integrate_singular_at(const Integrand& f, double a, double b,
                                       const QuadratureOptions& options) {
  const int m = options.singular_power;
  const double length = b - a;
  auto g = [&](double z) {
    const double zm1 = std::pow(z, m - 1);
    return f(a + length * zm1 * z) * length * m * zm1;
  };
  return integrate(g, 0.0, 1.0, options);
}

QuadratureResult integrate_singular_ends(const Integrand& f, double a, double b,
                                         const QuadratureOptions& options) {
  const double mid = 0.5 * (a + b);
  const QuadratureResult left = integrate_singular_at(f, a, mid, options);
  const QuadratureResult right = integrate_singular_at(f, b, mid, options);
  return {left.value - right.value, left.error + right.error, left.intervals + right.intervals,
          left.converged && right.converged};
}

}  // namespace cusplab
