#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cusplab/time_grid.hpp"

namespace cusplab {

/// Open parameter set (alpha, beta) with 0 < alpha < beta < T.
struct ThetaBounds {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double theta) const;
};

/// Smooth additive term h(theta, t) of a cusp signal. The catalog supplies the
/// theta-derivative analytically; it is bounded on [0, T] for every entry.
class Nuisance {
 public:
  enum class Kind { kNone, kLinear, kSine };

  /// h == 0
  static Nuisance none() { return Nuisance(Kind::kNone, 0.0, 0.0); }
  /// h = c * theta * t
  static Nuisance linear(double c) { return Nuisance(Kind::kLinear, c, 0.0); }
  /// h = c * sin(omega * t + theta)
  static Nuisance sine(double c, double omega) { return Nuisance(Kind::kSine, c, omega); }

  double value(double theta, double t) const;
  double dtheta(double theta, double t) const;

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::kNone || coefficient_ == 0.0; }
  double coefficient() const { return coefficient_; }
  double omega() const { return omega_; }
  std::string_view name() const;

 private:
  Nuisance(Kind kind, double coefficient, double omega)
      : kind_(kind), coefficient_(coefficient), omega_(omega) {}

  Kind kind_;
  double coefficient_;
  double omega_;
};

/// A parametric signal family S(theta, t) on [0, T]. Instances are immutable.
class SignalModel {
 public:
  virtual ~SignalModel() = default;

  virtual std::string_view family() const = 0;

  double horizon() const { return horizon_; }
  ThetaBounds theta_bounds() const { return bounds_; }

  /// S(theta, t). Throws DomainError when t is outside [0, T] or theta outside
  /// the closed parameter set.
  double eval(double theta, double t) const;

  /// Pointwise eval on arbitrary time nodes. Throws DomainError on an empty
  /// node set or nodes outside [0, T].
  std::vector<double> eval_grid(double theta, std::span<const double> times) const;
  std::vector<double> eval_grid(double theta, const TimeGrid& grid) const;

  /// Unchecked batch evaluation used on hot paths (likelihood fields).
  void eval_into(double theta, std::span<const double> times, std::span<double> out) const {
    fill(theta, times, out);
  }

  /// Exponent that governs the estimation rate: kappa for the cusp families
  /// (min kappa_l for several terms), empty for regular signals.
  virtual std::optional<double> cusp_exponent() const { return std::nullopt; }

  /// True when S(theta, t) = f(t - theta) for one profile f. Such signals
  /// admit the lattice (FFT correlation) likelihood route.
  virtual bool translation_invariant() const { return false; }

  /// Unchecked f(s) at the given offsets s = t - theta; only meaningful for
  /// translation-invariant signals.
  void profile_into(std::span<const double> offsets, std::span<double> out) const {
    fill(0.0, offsets, out);
  }

 protected:
  SignalModel(double horizon, ThetaBounds bounds);

  virtual double value(double theta, double t) const = 0;
  virtual void fill(double theta, std::span<const double> times, std::span<double> out) const;

  void check_theta(double theta) const;
  void check_time(double t) const;

 private:
  double horizon_;
  ThetaBounds bounds_;
};

using SignalPtr = std::shared_ptr<const SignalModel>;

/// a |t - theta|^kappa + h(theta, t)
class CuspSignal final : public SignalModel {
 public:
  CuspSignal(double a, double kappa, double horizon, ThetaBounds bounds,
             Nuisance nuisance = Nuisance::none());

  std::string_view family() const override { return "cusp"; }
  std::optional<double> cusp_exponent() const override { return kappa_; }
  bool translation_invariant() const override { return nuisance_.is_zero(); }

  double amplitude() const { return a_; }
  double kappa() const { return kappa_; }
  const Nuisance& nuisance() const { return nuisance_; }

 protected:
  double value(double theta, double t) const override;
  void fill(double theta, std::span<const double> times, std::span<double> out) const override;

 private:
  double a_;
  double kappa_;
  Nuisance nuisance_;
};

struct CuspTerm {
  double a = 1.0;
  double kappa = 0.25;
};

/// sum_l a_l |t - theta|^{kappa_l}, all terms sharing one location.
class MultiCuspSignal final : public SignalModel {
 public:
  MultiCuspSignal(std::vector<CuspTerm> terms, double horizon, ThetaBounds bounds);

  std::string_view family() const override { return "multi-cusp"; }
  std::optional<double> cusp_exponent() const override { return kappa_effective_; }
  bool translation_invariant() const override { return true; }

  const std::vector<CuspTerm>& terms() const { return terms_; }
  double kappa_effective() const { return kappa_effective_; }
  /// Sum of the amplitudes of the terms whose exponent equals the minimum.
  double leading_amplitude() const;

 protected:
  double value(double theta, double t) const override;
  void fill(double theta, std::span<const double> times, std::span<double> out) const override;

 private:
  std::vector<CuspTerm> terms_;
  double kappa_effective_;
};

/// a |t - theta|^kappa 1{t < theta} + b |t - theta|^kappa 1{t >= theta} + h(theta, t)
class TwoSidedCuspSignal final : public SignalModel {
 public:
  TwoSidedCuspSignal(double a, double b, double kappa, double horizon, ThetaBounds bounds,
                     Nuisance nuisance = Nuisance::none());

  std::string_view family() const override { return "two-sided-cusp"; }
  std::optional<double> cusp_exponent() const override { return kappa_; }
  bool translation_invariant() const override { return nuisance_.is_zero(); }

  double left_amplitude() const { return a_; }
  double right_amplitude() const { return b_; }
  double kappa() const { return kappa_; }

 protected:
  double value(double theta, double t) const override;

 private:
  double a_;
  double b_;
  double kappa_;
  Nuisance nuisance_;
};

/// Catalog of signals that are twice continuously differentiable in t.
/// The smoothed cusp a (delta^2 + (t - theta)^2)^{kappa/2} uses theta as its
/// centre; the other entries ignore theta.
class SmoothSignal final : public SignalModel {
 public:
  enum class Kind { kConstant, kQuadratic, kCosine, kSmoothedCusp };

  static SmoothSignal constant(double c, double horizon, ThetaBounds bounds);
  /// c0 + c1 t + c2 t^2
  static SmoothSignal quadratic(double c0, double c1, double c2, double horizon,
                                ThetaBounds bounds);
  /// c0 + c1 cos(omega t)
  static SmoothSignal cosine(double c0, double c1, double omega, double horizon,
                             ThetaBounds bounds);
  /// a (delta^2 + (t - theta)^2)^{kappa/2}
  static SmoothSignal smoothed_cusp(double a, double kappa, double delta, double horizon,
                                    ThetaBounds bounds);

  std::string_view family() const override { return "smooth"; }
  Kind kind() const { return kind_; }
  std::string_view entry() const;

  /// dS/dt and d^2S/dt^2, both checked like eval.
  double d1(double theta, double t) const;
  double d2(double theta, double t) const;

  /// Points in [0, T] where the integrand of an L2 distance changes scale
  /// (the smoothed cusp's core); used to split quadrature panels.
  std::vector<double> breakpoints(double theta) const;

  const std::vector<double>& parameters() const { return params_; }

 protected:
  double value(double theta, double t) const override;

 private:
  SmoothSignal(Kind kind, std::vector<double> params, double horizon, ThetaBounds bounds);

  double raw_d1(double theta, double t) const;
  double raw_d2(double theta, double t) const;

  Kind kind_;
  std::vector<double> params_;
};

/// a sgn(t - theta); evaluation only.
class SignumSignal final : public SignalModel {
 public:
  SignumSignal(double a, double horizon, ThetaBounds bounds);

  std::string_view family() const override { return "signum"; }
  bool translation_invariant() const override { return true; }
  double amplitude() const { return a_; }

 protected:
  double value(double theta, double t) const override;

 private:
  double a_;
};

/// Cusp exponent of a signal, throwing DomainError for regular families.
double require_cusp_exponent(const SignalModel& signal);

}  // namespace cusplab
