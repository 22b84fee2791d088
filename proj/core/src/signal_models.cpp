#include "cusplab/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cusplab/errors.hpp"
#include "kernels.hpp"

namespace cusplab {
namespace {

constexpr double kRelSlack = 1e-12;

void check_kappa(double kappa) {
  detail::require(std::isfinite(kappa) && kappa > 0.0 && kappa < 0.5,
                  "cusp exponent kappa must lie strictly inside (0, 1/2), got " +
                      std::to_string(kappa));
}

void check_positive(double value, const char* what) {
  detail::require(std::isfinite(value) && value > 0.0,
                  std::string(what) + " must be positive, got " + std::to_string(value));
}

}  // namespace

bool ThetaBounds::contains(double theta) const {
  const double slack = kRelSlack * std::max(1.0, std::abs(upper));
  return theta >= lower - slack && theta <= upper + slack;
}

// ---------------------------------------------------------------------------
// Nuisance

double Nuisance::value(double theta, double t) const {
  switch (kind_) {
    case Kind::kNone:
      return 0.0;
    case Kind::kLinear:
      return coefficient_ * theta * t;
    case Kind::kSine:
      return coefficient_ * std::sin(omega_ * t + theta);
  }
  return 0.0;
}

double Nuisance::dtheta(double theta, double t) const {
  switch (kind_) {
    case Kind::kNone:
      return 0.0;
    case Kind::kLinear:
      return coefficient_ * t;
    case Kind::kSine:
      return coefficient_ * std::cos(omega_ * t + theta);
  }
  return 0.0;
}

std::string_view Nuisance::name() const {
  switch (kind_) {
    case Kind::kNone:
      return "none";
    case Kind::kLinear:
      return "linear";
    case Kind::kSine:
      return "sine";
  }
  return "none";
}

// ---------------------------------------------------------------------------
// SignalModel

SignalModel::SignalModel(double horizon, ThetaBounds bounds) : horizon_(horizon), bounds_(bounds) {
  check_positive(horizon, "signal horizon T");
  detail::require(0.0 < bounds.lower && bounds.lower < bounds.upper && bounds.upper < horizon,
                  "parameter bounds must satisfy 0 < alpha < beta < T");
}

void SignalModel::check_theta(double theta) const {
  if (!std::isfinite(theta) || !bounds_.contains(theta)) {
    std::ostringstream msg;
    msg << family() << ": theta=" << theta << " outside [" << bounds_.lower << ", "
        << bounds_.upper << "]";
    throw DomainError(msg.str());
  }
}

void SignalModel::check_time(double t) const {
  const double slack = kRelSlack * horizon_;
  if (!std::isfinite(t) || t < -slack || t > horizon_ + slack) {
    std::ostringstream msg;
    msg << family() << ": t=" << t << " outside [0, " << horizon_ << "]";
    throw DomainError(msg.str());
  }
}

double SignalModel::eval(double theta, double t) const {
  check_theta(theta);
  check_time(t);
  return value(theta, t);
}

std::vector<double> SignalModel::eval_grid(double theta, std::span<const double> times) const {
  detail::require(!times.empty(), std::string(family()) + ": empty evaluation grid");
  check_theta(theta);
  for (double t : times) check_time(t);
  std::vector<double> out(times.size());
  fill(theta, times, out);
  return out;
}

std::vector<double> SignalModel::eval_grid(double theta, const TimeGrid& grid) const {
  return eval_grid(theta, grid.nodes());
}

void SignalModel::fill(double theta, std::span<const double> times, std::span<double> out) const {
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = value(theta, times[i]);
}

double require_cusp_exponent(const SignalModel& signal) {
  const auto kappa = signal.cusp_exponent();
  if (!kappa) {
    throw DomainError(std::string(signal.family()) + " signal has no cusp exponent");
  }
  return *kappa;
}

// ---------------------------------------------------------------------------
// CuspSignal

CuspSignal::CuspSignal(double a, double kappa, double horizon, ThetaBounds bounds,
                       Nuisance nuisance)
    : SignalModel(horizon, bounds), a_(a), kappa_(kappa), nuisance_(nuisance) {
  check_positive(a, "cusp amplitude a");
  check_kappa(kappa);
}

double CuspSignal::value(double theta, double t) const {
  return a_ * std::pow(std::abs(t - theta), kappa_) + nuisance_.value(theta, t);
}

void CuspSignal::fill(double theta, std::span<const double> times, std::span<double> out) const {
  detail::log_distance(theta, times, out);
  detail::scaled_power_from_log(a_, kappa_, out, out);
  if (!nuisance_.is_zero()) {
    for (std::size_t i = 0; i < times.size(); ++i) out[i] += nuisance_.value(theta, times[i]);
  }
}

// ---------------------------------------------------------------------------
// MultiCuspSignal

MultiCuspSignal::MultiCuspSignal(std::vector<CuspTerm> terms, double horizon, ThetaBounds bounds)
    : SignalModel(horizon, bounds), terms_(std::move(terms)), kappa_effective_(0.5) {
  detail::require(!terms_.empty(), "multi-cusp signal needs at least one term");
  for (const auto& term : terms_) {
    check_positive(term.a, "multi-cusp amplitude a_l");
    check_kappa(term.kappa);
    kappa_effective_ = std::min(kappa_effective_, term.kappa);
  }
}

double MultiCuspSignal::leading_amplitude() const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    if (term.kappa == kappa_effective_) sum += term.a;
  }
  return sum;
}

double MultiCuspSignal::value(double theta, double t) const {
  const double d = std::abs(t - theta);
  double s = 0.0;
  for (const auto& term : terms_) s += term.a * std::pow(d, term.kappa);
  return s;
}

void MultiCuspSignal::fill(double theta, std::span<const double> times,
                           std::span<double> out) const {
  std::vector<double> log_dist(times.size());
  detail::log_distance(theta, times, log_dist);
  detail::scaled_power_from_log(terms_.front().a, terms_.front().kappa, log_dist, out);
  for (std::size_t l = 1; l < terms_.size(); ++l) {
    detail::add_scaled_power_from_log(terms_[l].a, terms_[l].kappa, log_dist, out);
  }
}

// ---------------------------------------------------------------------------
// TwoSidedCuspSignal

TwoSidedCuspSignal::TwoSidedCuspSignal(double a, double b, double kappa, double horizon,
                                       ThetaBounds bounds, Nuisance nuisance)
    : SignalModel(horizon, bounds), a_(a), b_(b), kappa_(kappa), nuisance_(nuisance) {
  check_positive(a, "two-sided cusp left amplitude a");
  check_positive(b, "two-sided cusp right amplitude b");
  check_kappa(kappa);
}

double TwoSidedCuspSignal::value(double theta, double t) const {
  const double amplitude = t < theta ? a_ : b_;
  return amplitude * std::pow(std::abs(t - theta), kappa_) + nuisance_.value(theta, t);
}

// ---------------------------------------------------------------------------
// SmoothSignal

SmoothSignal::SmoothSignal(Kind kind, std::vector<double> params, double horizon,
                           ThetaBounds bounds)
    : SignalModel(horizon, bounds), kind_(kind), params_(std::move(params)) {
  for (double p : params_) {
    detail::require(std::isfinite(p), "smooth signal parameters must be finite");
  }
}

SmoothSignal SmoothSignal::constant(double c, double horizon, ThetaBounds bounds) {
  return SmoothSignal(Kind::kConstant, {c}, horizon, bounds);
}

SmoothSignal SmoothSignal::quadratic(double c0, double c1, double c2, double horizon,
                                     ThetaBounds bounds) {
  return SmoothSignal(Kind::kQuadratic, {c0, c1, c2}, horizon, bounds);
}

SmoothSignal SmoothSignal::cosine(double c0, double c1, double omega, double horizon,
                                  ThetaBounds bounds) {
  return SmoothSignal(Kind::kCosine, {c0, c1, omega}, horizon, bounds);
}

SmoothSignal SmoothSignal::smoothed_cusp(double a, double kappa, double delta, double horizon,
                                         ThetaBounds bounds) {
  check_positive(a, "smoothed cusp amplitude a");
  check_kappa(kappa);
  check_positive(delta, "smoothed cusp width delta");
  return SmoothSignal(Kind::kSmoothedCusp, {a, kappa, delta}, horizon, bounds);
}

std::string_view SmoothSignal::entry() const {
  switch (kind_) {
    case Kind::kConstant:
      return "constant";
    case Kind::kQuadratic:
      return "quadratic";
    case Kind::kCosine:
      return "cosine";
    case Kind::kSmoothedCusp:
      return "smoothed-cusp";
  }
  return "constant";
}

double SmoothSignal::value(double theta, double t) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::kConstant:
      return p[0];
    case Kind::kQuadratic:
      return p[0] + p[1] * t + p[2] * t * t;
    case Kind::kCosine:
      return p[0] + p[1] * std::cos(p[2] * t);
    case Kind::kSmoothedCusp: {
      const double x = t - theta;
      return p[0] * std::pow(p[2] * p[2] + x * x, 0.5 * p[1]);
    }
  }
  return 0.0;
}

double SmoothSignal::raw_d1(double theta, double t) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kQuadratic:
      return p[1] + 2.0 * p[2] * t;
    case Kind::kCosine:
      return -p[1] * p[2] * std::sin(p[2] * t);
    case Kind::kSmoothedCusp: {
      const double x = t - theta;
      const double r = p[2] * p[2] + x * x;
      return p[0] * p[1] * x * std::pow(r, 0.5 * p[1] - 1.0);
    }
  }
  return 0.0;
}

double SmoothSignal::raw_d2(double theta, double t) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kQuadratic:
      return 2.0 * p[2];
    case Kind::kCosine:
      return -p[1] * p[2] * p[2] * std::cos(p[2] * t);
    case Kind::kSmoothedCusp: {
      // d/dx [a k x r^{k/2-1}] = a k r^{k/2-2} (r + (k-2) x^2)
      const double x = t - theta;
      const double r = p[2] * p[2] + x * x;
      return p[0] * p[1] * std::pow(r, 0.5 * p[1] - 2.0) * (r + (p[1] - 2.0) * x * x);
    }
  }
  return 0.0;
}

double SmoothSignal::d1(double theta, double t) const {
  check_theta(theta);
  check_time(t);
  return raw_d1(theta, t);
}

double SmoothSignal::d2(double theta, double t) const {
  check_theta(theta);
  check_time(t);
  return raw_d2(theta, t);
}

std::vector<double> SmoothSignal::breakpoints(double theta) const {
  std::vector<double> points;
  if (kind_ == Kind::kSmoothedCusp) {
    const double delta = params_[2];
    for (double offset : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
      const double t = theta + offset * delta;
      if (t > 0.0 && t < horizon()) points.push_back(t);
    }
  } else if (kind_ == Kind::kCosine && params_[2] != 0.0) {
    // quarter periods keep each panel monotone-ish
    const double quarter = 0.5 * M_PI / std::abs(params_[2]);
    for (double t = quarter; t < horizon(); t += quarter) points.push_back(t);
  }
  return points;
}

// ---------------------------------------------------------------------------
// SignumSignal

SignumSignal::SignumSignal(double a, double horizon, ThetaBounds bounds)
    : SignalModel(horizon, bounds), a_(a) {
  check_positive(a, "signum amplitude a");
}

double SignumSignal::value(double theta, double t) const {
  if (t > theta) return a_;
  if (t < theta) return -a_;
  return 0.0;
}

}  // namespace cusplab
