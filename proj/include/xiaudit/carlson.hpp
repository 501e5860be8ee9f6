#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "xiaudit/hadamard.hpp"
#include "xiaudit/report.hpp"
#include "xiaudit/specfun.hpp"

namespace xiaudit {

using ComplexFunction = std::function<Complex(Complex)>;

enum class Axis { real, imaginary };

/// Log-magnitude slope of f along the positive half of one axis.
struct AxisGrowth {
  double slope = 0.0;
  /// Max deviation of log|f| from the fitted line.
  double fit_residual = 0.0;
  /// Standard error of the slope plus a relative floor for rounding.
  double uncertainty = 0.0;
  double radius = 0.0;
  std::size_t samples_used = 0;
  /// Every sample was below the underflow guard; slope is reported as 0.
  bool all_zero = false;
};

struct GrowthEstimate {
  double alpha = 0.0;
  double beta = 0.0;
  double fit_residual = 0.0;
  double sample_radius = 0.0;
  AxisGrowth real_axis;
  AxisGrowth imaginary_axis;
};

inline constexpr std::size_t kGrowthSamples = 33;
inline constexpr double kUnderflowGuard = 1e-300;

/// Least-squares slope of log|f| against |coordinate| on a geometric grid
/// over [radius/4, radius]. Samples below kUnderflowGuard are skipped.
AxisGrowth estimate_type(const ComplexFunction& f, Axis axis, double radius);

GrowthEstimate estimate_growth(const ComplexFunction& f, double radius);

struct IntegerVanishing {
  bool vanishes = true;
  double max_abs = 0.0;
  /// n attaining max_abs; 0 when N = 0.
  std::size_t argmax = 0;
  std::vector<double> values;  // |f(n)| for n = 1..N
};

/// True iff max_{1<=n<=N} |f(n)| <= tol.
IntegerVanishing check_integer_vanishing(const ComplexFunction& f, std::size_t n_max, double tol,
                                         double scale = 1.0);

enum class CarlsonConclusion { identically_zero_implied, conditions_not_met, inconclusive };

std::string_view to_string(CarlsonConclusion conclusion);

struct CarlsonVerdict {
  bool alpha_finite = false;
  bool beta_below_pi = false;
  bool integer_vanishing = false;
  GrowthEstimate growth;
  IntegerVanishing vanishing;
  double margin = 0.05;
  CarlsonConclusion conclusion = CarlsonConclusion::inconclusive;
};

inline constexpr double kDefaultBetaMargin = 0.05;
inline constexpr double kDefaultVanishingTol = 1e-9;

/// beta counts as below pi only when beta + uncertainty <= pi - margin, so
/// sin(pi z) fails for every positive margin. With N = 0 there is no
/// integer evidence and the conclusion is INCONCLUSIVE.
CarlsonVerdict carlson_verdict(const ComplexFunction& f, std::size_t n_max, double radius,
                               double margin = kDefaultBetaMargin,
                               double vanishing_tol = kDefaultVanishingTol, double scale = 1.0);

/// log X(s') = pi s' fitted on the grid: slope pi, intercept 0.
PrefactorFit audit_jost_exponential(std::span<const double> grid);

/// Fit of log target(s'+1) = log C + A (s'+1) over s' in [0, s_max].
struct ExponentialFit {
  double C = 0.0;
  double A = 0.0;
  double max_residual = 0.0;
  /// L2 residual over [0, s_max]; stable under refinement of the rule.
  double rms_residual = 0.0;
  double s_max = 0.0;
  std::size_t samples = 0;
};

/// Gauss-Legendre nodes on [0, s_max] with their weights, so the fit is the
/// continuous least-squares projection and converges with `samples`.
ExponentialFit audit_xi_exponential(double s_max, std::size_t samples,
                                    const EulerMaclaurinPlan& plan = {});

/// Same fit against an arbitrary positive target sampled at s'+1.
ExponentialFit audit_xi_exponential(const std::function<double(double)>& target, double s_max,
                                    std::size_t samples);

/// Equispaced samples, for synthetic checks.
ExponentialFit fit_exponential_equispaced(const std::function<double(double)>& target, double s_max,
                                          std::size_t samples);

AuditReport to_report(const ExponentialFit& fit);

inline constexpr double kGrowthRadius = 30.0;

struct DifferenceAudit {
  ExponentialFit fit;
  double a = 0.0;
  double b = 0.0;
  int scale_m = 1;
  std::vector<double> residuals;  // |d(n/m)|, n = 1..N
  std::vector<double> targets;    // |target(n/m + 1)|
  double vanishing_tol = 0.0;
  CarlsonVerdict verdict;
};

/// d(u) = e^(a + b u + pi u) - target(u + 1) with a = log C + A and
/// b = A - pi from the exponential fit, sampled at u = n/m. Vanishing is
/// judged at 1e-10 relative to the largest |target| seen.
DifferenceAudit audit_difference(std::size_t n_max, double s_max, int m = 1,
                                 std::size_t fit_samples = 51);
DifferenceAudit audit_difference(const ComplexFunction& target, const ExponentialFit& fit,
                                 std::size_t n_max, int m = 1);

/// IDENTICALLY_ZERO_IMPLIED -> PASS, CONDITIONS_NOT_MET -> NOT_APPLICABLE,
/// INCONCLUSIVE -> INCONCLUSIVE.
AuditReport to_report(const DifferenceAudit& audit);

/// sin(pi z) sharpness over several margins, the zero function, and slope
/// recovery on e^(c z): PASS/FAIL reports that the auditor itself works.
std::vector<AuditReport> carlson_self_checks();

}  // namespace xiaudit
