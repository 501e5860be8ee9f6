#pragma once

#include <complex>
#include <string>

#include "xiaudit/quadrature.hpp"

namespace xiaudit {

using Complex = std::complex<double>;

/// Euler-Maclaurin settings for zeta. The cutoff N grows with |s| and the
/// number of correction terms adapts until they drop below roundoff, up to
/// `order_cap`.
struct EulerMaclaurinPlan {
  double cutoff_scale = 1.0;
  int order_cap = 20;

  /// Twice the cutoff and twice the order cap; used as a refinement oracle.
  [[nodiscard]] EulerMaclaurinPlan doubled() const { return {2.0 * cutoff_scale, 2 * order_cap}; }
  [[nodiscard]] int cutoff_for(Complex s) const;
};

inline constexpr int kMaxEulerMaclaurinOrder = 40;
inline constexpr int kMaxEulerMaclaurinCutoff = 20000;

/// Principal-ish log Gamma. The real part is exact to roundoff; the
/// imaginary part may differ from the principal branch by a multiple of
/// 2*pi, which is all exp() needs.
Complex log_gamma(Complex z);

/// Complex Gamma. Throws PoleError at non-positive integers and
/// OverflowError when |Gamma(z)| leaves the double range.
Complex gamma(Complex z);

/// Riemann zeta: Euler-Maclaurin for Re s >= 0, the reflection formula
/// for Re s < 0. Throws PoleError at s = 1.
Complex zeta(Complex s, const EulerMaclaurinPlan& plan = {});

/// (s - 1) * zeta(s), analytic at s = 1 where it equals 1.
Complex zeta_times_pole(Complex s, const EulerMaclaurinPlan& plan = {});

/// Completed xi: 1/2 s(s-1) pi^(-s/2) Gamma(s/2) zeta(s), entire, xi(0) = xi(1) = 1/2.
Complex xi(Complex s, const EulerMaclaurinPlan& plan = {});

/// log xi(s) up to a multiple of 2*pi*i; finite wherever xi(s) != 0.
Complex log_xi(Complex s, const EulerMaclaurinPlan& plan = {});

/// Xi(t) = xi(1/2 + it), real. Throws RealnessError if the computed
/// imaginary part exceeds 1e-10 * (1 + |Xi(t)|).
double xi_critical(double t, const EulerMaclaurinPlan& plan = {});

/// exp(pi |t| / 4) * Xi(t). Same sign and zeros as Xi but without the
/// exponential decay, so it stays representable for t in the thousands.
double xi_critical_scaled(double t, const EulerMaclaurinPlan& plan = {});

enum class BesselKind { real, imaginary };

/// Order of K: nu = magnitude (real kind) or nu = i * magnitude (imaginary kind).
struct BesselOrder {
  BesselKind kind = BesselKind::real;
  double magnitude = 0.0;

  static BesselOrder real(double nu);
  static BesselOrder imaginary(double mu);

  [[nodiscard]] bool is_imaginary() const { return kind == BesselKind::imaginary; }
  /// Real order 1, 2, 3, ...: pole of pi*nu / sin(pi*nu).
  [[nodiscard]] bool closed_form_pole() const;
  [[nodiscard]] std::string label() const;

  friend bool operator==(const BesselOrder&, const BesselOrder&) = default;
};

struct BesselOptions {
  /// Accuracy demanded from the quadrature, relative to the scale of the
  /// integrand (|K| itself for real order).
  double tolerance = 1e-10;
  /// Internal quadrature tolerance; halve it for a doubled-depth re-evaluation.
  double quadrature_rel_tol = 1e-13;
};

/// Value and error estimate of K, carried as exp(log_scale) * scaled so that
/// K_{i mu}(x) ~ exp(-pi mu / 2) stays representable for large mu.
struct BesselValue {
  double scaled = 0.0;
  double log_scale = 0.0;
  double err_estimate = 0.0;  // absolute, in the scaled units
  std::size_t evaluations = 0;

  [[nodiscard]] double value() const;
};

/// K_order(x) via the integral representations
///   int_0^inf exp(-x cosh t) cosh(nu t) dt        (real order),
///   int_0^inf exp(-x cosh t) cos(mu t) dt         (imaginary order),
/// the latter deformed onto its steepest-descent contour so that the
/// exp(-pi mu / 2) cancellation never happens in floating point.
/// Throws DomainError for x <= 0 and AccuracyError when the quadrature
/// error estimate exceeds options.tolerance.
BesselValue bessel_k_detail(const BesselOrder& order, double x, const BesselOptions& options = {});

double bessel_k(const BesselOrder& order, double x, const BesselOptions& options = {});

/// K_nu for a signed real order; K_{-nu} = K_nu.
double bessel_k_real(double nu, double x, const BesselOptions& options = {});

}  // namespace xiaudit
