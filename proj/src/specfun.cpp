#include "xiaudit/specfun.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "xiaudit/errors.hpp"

namespace xiaudit {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogPi = 1.1447298858494001741434273513530587116473;
constexpr double kLog2 = std::numbers::ln2;
constexpr double kHalfLog2Pi = 0.9189385332046727417803297364056176398614;
// Below this x the imaginary-order integral oscillates too long to resolve.
constexpr double kSeriesThreshold = 1e-3;
// log(DBL_MAX)
constexpr double kMaxLog = 709.782712893384;

// B_{2k} / (2k)! for k = 1..40.
constexpr std::array<double, kMaxEulerMaclaurinOrder> kBernoulliOverFactorial = {
    8.3333333333333333e-2,   -1.3888888888888889e-3,  3.3068783068783069e-5,
    -8.2671957671957672e-7,  2.0876756987868099e-8,   -5.2841901386874932e-10,
    1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
    -2.1748686985580619e-16, 5.5090028283602295e-18,  -1.3954464685812523e-19,
    3.5347070396294675e-21,  -8.9535174270375469e-23, 2.2679524523376831e-24,
    -5.7447906688722024e-26, 1.4551724756148649e-27,  -3.6859949406653102e-29,
    9.3367342570950447e-31,  -2.3650224157006299e-32, 5.9906717624821343e-34,
    -1.5174548844682903e-35, 3.8437581254541882e-37,  -9.736353072646691e-39,
    2.466247044200681e-40,   -6.2470767418207437e-42, 1.5824030244644914e-43,
    -4.008273685948936e-45,  1.0153075855569556e-46,  -2.5718041582418717e-48,
    6.5144560352338149e-50,  -1.6501309906896525e-51, 4.1798306285394759e-53,
    -1.0587634667702909e-54, 2.6818791912607707e-56,  -6.7932793511074212e-58,
    1.7207577616681405e-59,  -4.3587303293488938e-61, 1.1040792903684667e-62,
    -2.7966655133781345e-64};

// Stirling coefficients B_{2k} / (2k (2k-1)).
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,          -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,     1.0 / 156.0,           -3617.0 / 122400.0,
    43867.0 / 244188.0,  -174611.0 / 125400.0};

constexpr double kStirlingRadius = 15.0;
constexpr double kReflectionImagLimit = 50.0;

bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

Complex stirling_log_gamma(Complex w) {
  const Complex inv = 1.0 / w;
  const Complex inv2 = inv * inv;
  Complex series = 0.0;
  Complex power = inv;
  for (double c : kStirling) {
    series += c * power;
    power *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + kHalfLog2Pi + series;
}

// sinh(d) - d without cancellation for small d.
double sinh_minus_identity(double d) {
  if (std::abs(d) < 0.5) {
    const double d2 = d * d;
    double term = d * d2 / 6.0;
    double sum = term;
    for (int k = 2; k < 12; ++k) {
      term *= d2 / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term;
    }
    return sum;
  }
  return std::sinh(d) - d;
}

}  // namespace

int EulerMaclaurinPlan::cutoff_for(Complex s) const {
  // Consecutive correction terms shrink by roughly |s + 2k|^2 / (2 pi N)^2;
  // this cutoff keeps that ratio below 1/9 for every k up to the cap.
  const double reach = std::abs(s) + 2.0 * order_cap;
  const double n = cutoff_scale * std::max(10.0, 3.0 * reach / (2.0 * kPi));
  return std::min(kMaxEulerMaclaurinCutoff, static_cast<int>(std::ceil(n)));
}

Complex log_gamma(Complex z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError(fmt::format("gamma: pole at non-positive integer {}", z.real()));
  }
  if (!(std::isfinite(z.real()) && std::isfinite(z.imag()))) {
    throw DomainError("gamma: non-finite argument");
  }
  if (z.real() < 0.5 && std::abs(z.imag()) <= kReflectionImagLimit) {
    const Complex sine = std::sin(kPi * z);
    return kLogPi - std::log(sine) - log_gamma(1.0 - z);
  }
  Complex w = z;
  Complex shift_log = 0.0;
  while (w.real() < 0.0 || std::abs(w) < kStirlingRadius) {
    shift_log += std::log(w);
    w += 1.0;
  }
  return stirling_log_gamma(w) - shift_log;
}

Complex gamma(Complex z) {
  const Complex lg = log_gamma(z);
  if (lg.real() > kMaxLog) {
    throw OverflowError("gamma: result exceeds the double range");
  }
  return std::exp(lg);
}

namespace {

// Euler-Maclaurin for (s - 1) zeta(s); valid for any s, accurate for Re s >= 0.
Complex euler_maclaurin_times_pole(Complex s, const EulerMaclaurinPlan& plan) {
  const int cutoff = plan.cutoff_for(s);
  const double big_n = static_cast<double>(cutoff);
  Complex head = 0.0;
  for (int n = cutoff - 1; n >= 1; --n) {
    head += std::exp(-s * std::log(static_cast<double>(n)));
  }
  const Complex n_pow = std::exp(-s * std::log(big_n));  // N^{-s}
  Complex tail = 0.5 * n_pow;
  Complex rising = s;           // s (s+1) ... (s+2k-2)
  Complex power = n_pow / big_n;  // N^{-s-2k+1}
  const double inv_n2 = 1.0 / (big_n * big_n);
  const int cap = std::min(plan.order_cap, kMaxEulerMaclaurinOrder);
  for (int k = 1; k <= cap; ++k) {
    if (k > 1) {
      rising *= (s + (2.0 * k - 3.0)) * (s + (2.0 * k - 2.0));
      power *= inv_n2;
    }
    const Complex term = kBernoulliOverFactorial[k - 1] * rising * power;
    tail += term;
    if (std::abs(term) <= 1e-17 * std::abs(head + tail)) break;
  }
  return (s - 1.0) * (head + tail) + n_pow * big_n;
}

// (s - 1) zeta(s) through zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s).
Complex reflected_times_pole(Complex s, const EulerMaclaurinPlan& plan) {
  const Complex one_minus = 1.0 - s;
  const Complex zeta_reflected = euler_maclaurin_times_pole(one_minus, plan) / (-s);
  const Complex factor = std::exp(s * kLog2 + (s - 1.0) * kLogPi + log_gamma(one_minus));
  return (s - 1.0) * factor * std::sin(0.5 * kPi * s) * zeta_reflected;
}

}  // namespace

Complex zeta_times_pole(Complex s, const EulerMaclaurinPlan& plan) {
  if (s.real() < 0.0) return reflected_times_pole(s, plan);
  return euler_maclaurin_times_pole(s, plan);
}

Complex zeta(Complex s, const EulerMaclaurinPlan& plan) {
  if (s == Complex(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
  return zeta_times_pole(s, plan) / (s - 1.0);
}

namespace {

// Pieces of xi as exp(log_factor) * multiplier; both routes avoid the
// removable singularities at s = 0, 1 and the Gamma poles at s = -2, -4, ...
struct XiParts {
  Complex log_factor;
  Complex multiplier;
};

XiParts xi_parts(Complex s, const EulerMaclaurinPlan& plan) {
  if (s.real() >= 0.0) {
    // xi(s) = (s-1) zeta(s) * Gamma(s/2 + 1) * pi^(-s/2)
    return {log_gamma(0.5 * s + 1.0) - 0.5 * s * kLogPi, euler_maclaurin_times_pole(s, plan)};
  }
  // xi(s) = 1/2 (1-s) 2^s pi^(s/2) Gamma(1-s)/Gamma(1-s/2) * (-s) zeta(1-s)
  const Complex one_minus = 1.0 - s;
  const Complex log_factor =
      s * kLog2 + 0.5 * s * kLogPi + log_gamma(one_minus) - log_gamma(1.0 - 0.5 * s);
  return {log_factor, 0.5 * one_minus * euler_maclaurin_times_pole(one_minus, plan)};
}

}  // namespace

Complex xi(Complex s, const EulerMaclaurinPlan& plan) {
  const auto parts = xi_parts(s, plan);
  if (parts.log_factor.real() > kMaxLog) throw OverflowError("xi: result exceeds the double range");
  return std::exp(parts.log_factor) * parts.multiplier;
}

Complex log_xi(Complex s, const EulerMaclaurinPlan& plan) {
  const auto parts = xi_parts(s, plan);
  return parts.log_factor + std::log(parts.multiplier);
}

namespace {

// `envelope` is the size against which roundoff in the imaginary part is
// judged: 1 for Xi itself, the prefactor magnitude for the scaled variant.
double checked_real(Complex v, double t, double envelope) {
  if (std::abs(v.imag()) > 1e-10 * (envelope + std::abs(v.real()))) {
    throw RealnessError(
        fmt::format("xi_critical: imaginary residue {:.3e} at t = {:.17g}", v.imag(), t));
  }
  return v.real();
}

}  // namespace

double xi_critical(double t, const EulerMaclaurinPlan& plan) {
  return checked_real(xi(Complex(0.5, t), plan), t, 1.0);
}

double xi_critical_scaled(double t, const EulerMaclaurinPlan& plan) {
  const Complex s(0.5, t);
  const auto parts = xi_parts(s, plan);
  const Complex factor = std::exp(parts.log_factor + 0.25 * kPi * std::abs(t));
  const Complex v = factor * parts.multiplier;
  return checked_real(v, t, std::abs(factor) * std::abs(s));
}

// ---------------------------------------------------------------------------
// Bessel K

BesselOrder BesselOrder::real(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("BesselOrder: magnitude must be >= 0");
  return {BesselKind::real, nu};
}

BesselOrder BesselOrder::imaginary(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("BesselOrder: magnitude must be >= 0");
  return {BesselKind::imaginary, mu};
}

bool BesselOrder::closed_form_pole() const {
  return kind == BesselKind::real && magnitude >= 1.0 && magnitude == std::floor(magnitude);
}

std::string BesselOrder::label() const {
  return fmt::format("{:.15g}{}", magnitude, is_imaginary() ? "i" : "");
}

double BesselValue::value() const {
  if (scaled == 0.0) return 0.0;
  return std::exp(log_scale) * scaled;
}

namespace {

// Exponent drop at which the integrands are truncated; exp(-60) ~ 1e-26.
constexpr double kTailDrop = 60.0;

template <typename Exponent>
double find_cutoff(Exponent&& exponent, double start, double initial_step) {
  double step = initial_step;
  double t = start + step;
  while (exponent(t) > -kTailDrop) {
    step *= 2.0;
    t = start + step;
    if (t > 720.0) return 720.0;
  }
  return t;
}

struct Pieces {
  double value = 0.0;
  double err = 0.0;
  double abs = 0.0;
  std::size_t evaluations = 0;

  void add(const QuadratureResult& r) {
    value += r.value;
    err += r.err_estimate;
    abs += r.abs_value;
    evaluations += r.evaluations;
  }
};

BesselValue real_order(double nu, double x, const BesselOptions& options) {
  const double t_peak = std::asinh(nu / x);
  const double log_peak = nu * t_peak - x * std::cosh(t_peak);
  // x (cosh t - cosh t_peak) in product form; the direct difference loses
  // everything to cancellation once x is large.
  auto drop = [&](double t) {
    return 2.0 * x * std::sinh(0.5 * (t + t_peak)) * std::sinh(0.5 * (t - t_peak));
  };
  auto exponent = [&](double t) { return nu * (t - t_peak) - drop(t); };
  auto integrand = [&](double t) {
    const double d = drop(t);
    return 0.5 * (std::exp(nu * (t - t_peak) - d) + std::exp(-nu * (t + t_peak) - d));
  };
  const double cutoff = find_cutoff(exponent, t_peak, 1.0);
  FiniteOptions fo;
  fo.rel_tol = options.quadrature_rel_tol;
  Pieces acc;
  if (t_peak > 0.0) acc.add(integrate_finite(integrand, 0.0, t_peak, fo));
  acc.add(integrate_finite(integrand, t_peak, cutoff, fo));
  if (acc.err > options.tolerance * std::abs(acc.value)) {
    throw AccuracyError("bessel_k: quadrature error estimate above tolerance");
  }
  return {acc.value, log_peak, acc.err, acc.evaluations};
}

// x >= mu: the steepest-descent path leaves the saddle at i*asin(mu/x) and
// Im(phase) = 0 along it, so K is the integral of a positive function.
BesselValue imaginary_order_above(double mu, double x, const BesselOptions& options) {
  const double ratio = mu / x;
  auto path = [mu, x, ratio](double u, double& sin_v, double& cos_v) {
    double one_minus;
    if (u == 0.0) {
      sin_v = ratio;
      one_minus = (x - mu) / x;
    } else {
      const double sh = std::sinh(u);
      sin_v = mu * u / (x * sh);
      one_minus = (x * sinh_minus_identity(u) + (x - mu) * u) / (x * sh);
    }
    cos_v = std::sqrt(std::max(0.0, one_minus * (1.0 + sin_v)));
  };
  double sin_v0, cos_v0;
  path(0.0, sin_v0, cos_v0);
  const double v0 = std::atan2(sin_v0, cos_v0);
  const double log_scale = -x * cos_v0 - mu * v0;
  // Phase relative to u = 0, arranged so no O(x) terms cancel:
  // cosh u cos v - cos v0 = 2 sinh^2(u/2) cos v + (sin^2 v0 - sin^2 v) / (cos v + cos v0).
  auto relative_phase = [&](double u) {
    if (u == 0.0) return 0.0;
    double sin_v, cos_v;
    path(u, sin_v, cos_v);
    const double sh = std::sinh(u);
    const double half = std::sinh(0.5 * u);
    const double sin_sq_gap = ratio * ratio * sinh_minus_identity(u) * (sh + u) / (sh * sh);
    const double gap = 2.0 * half * half * cos_v + sin_sq_gap / (cos_v + cos_v0);
    return -x * gap - mu * (std::atan2(sin_v, cos_v) - v0);
  };
  auto integrand = [&](double u) { return std::exp(relative_phase(u)); };
  const double cutoff = find_cutoff(relative_phase, 0.0, 0.5);
  FiniteOptions fo;
  fo.rel_tol = options.quadrature_rel_tol;
  const auto r = integrate_finite(integrand, 0.0, cutoff, fo);
  if (r.err_estimate > options.tolerance * std::abs(r.value)) {
    throw AccuracyError("bessel_k: quadrature error estimate above tolerance");
  }
  return {r.value, log_scale, r.err_estimate, r.evaluations};
}

// x < mu: the contour climbs to Im t = pi/2, runs along it to the saddle
// u0 + i pi/2 (u0 = acosh(mu/x)), then follows the steepest-descent path
// back to the real axis. Everything carries the common factor exp(-pi mu/2).
BesselValue imaginary_order_below(double mu, double x, const BesselOptions& options) {
  const double u0 = std::acosh(mu / x);
  const double sinh_u0 = std::sqrt((mu - x) * (mu + x)) / x;
  const double cosh_u0 = mu / x;
  const double phase_at_saddle = mu * u0 - x * sinh_u0;
  const double cos_c = std::cos(phase_at_saddle);
  const double sin_c = std::sin(phase_at_saddle);

  FiniteOptions segment_options;
  segment_options.rel_tol = options.quadrature_rel_tol;
  segment_options.abs_tol = options.quadrature_rel_tol;
  // At most ~pi of phase per initial piece.
  const double pieces = std::ceil((mu - x) * u0 / kPi) + 1.0;
  segment_options.initial_pieces = static_cast<std::size_t>(std::min(pieces, 40000.0));
  Pieces acc;
  acc.add(integrate_finite(
      [mu, x](double u) { return std::cos(mu * u - x * std::sinh(u)); }, 0.0, u0,
      segment_options));

  // With v = pi/2 - w along the descent path, 1 - cos w = g below.
  auto descent = [=](double u, double& w, double& dv_du) {
    const double d = u - u0;
    const double sh = std::sinh(u);
    const double half_sinh = std::sinh(0.5 * d);
    const double g_num = sinh_u0 * 2.0 * half_sinh * half_sinh + cosh_u0 * sinh_minus_identity(d);
    const double g = std::clamp(g_num / sh, 0.0, 1.0);
    w = 2.0 * std::asin(std::sqrt(0.5 * g));
    if (d == 0.0) {
      dv_du = -1.0;
      return;
    }
    const double numer = std::cosh(u) * g - 2.0 * std::sinh(0.5 * (u + u0)) * half_sinh;
    dv_du = numer / (sh * std::sin(w));
  };
  auto exponent = [=](double u) {
    double w, dv;
    descent(u, w, dv);
    return mu * w - x * std::cosh(u) * std::sin(w);
  };
  auto integrand = [=](double u) {
    double w, dv;
    descent(u, w, dv);
    const double weight = std::exp(mu * w - x * std::cosh(u) * std::sin(w));
    return weight * (cos_c - sin_c * dv);
  };
  const double cutoff = find_cutoff(exponent, u0, 0.5);
  FiniteOptions descent_options;
  descent_options.rel_tol = options.quadrature_rel_tol;
  descent_options.abs_tol = options.quadrature_rel_tol;
  acc.add(integrate_finite(integrand, u0, cutoff, descent_options));

  if (acc.err > options.tolerance * std::max(std::abs(acc.value), acc.abs)) {
    throw AccuracyError("bessel_k: quadrature error estimate above tolerance");
  }
  return {acc.value, -0.5 * kPi * mu, acc.err, acc.evaluations};
}

// Tiny x: K_{i mu}(x) = Re[Gamma(i mu) (x/2)^{-i mu} sum_k (x^2/4)^k / (k! (1 - i mu)_k)].
// Both halves of the reflection pair are conjugate, so no cancellation beyond
// the cosine itself.
BesselValue imaginary_order_series(double mu, double x) {
  const Complex lg = log_gamma(Complex(0.0, mu));
  const double q = 0.25 * x * x;
  Complex term(1.0, 0.0);
  Complex sum(1.0, 0.0);
  std::size_t k = 0;
  while (std::abs(term) > 1e-17 * std::abs(sum)) {
    ++k;
    term *= q / (static_cast<double>(k) * Complex(static_cast<double>(k), -mu));
    sum += term;
  }
  const double phase = lg.imag() - mu * std::log(0.5 * x);
  const double scaled = (Complex(std::cos(phase), std::sin(phase)) * sum).real();
  return {scaled, lg.real(), 4.0 * std::numeric_limits<double>::epsilon() * std::abs(sum), k + 1};
}

}  // namespace

BesselValue bessel_k_detail(const BesselOrder& order, double x, const BesselOptions& options) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k: x must be positive");
  if (!order.is_imaginary() || order.magnitude == 0.0) {
    return real_order(order.magnitude, x, options);
  }
  if (x <= kSeriesThreshold) return imaginary_order_series(order.magnitude, x);
  if (x >= order.magnitude) return imaginary_order_above(order.magnitude, x, options);
  return imaginary_order_below(order.magnitude, x, options);
}

double bessel_k(const BesselOrder& order, double x, const BesselOptions& options) {
  return bessel_k_detail(order, x, options).value();
}

double bessel_k_real(double nu, double x, const BesselOptions& options) {
  return bessel_k(BesselOrder::real(std::abs(nu)), x, options);
}

}  // namespace xiaudit
