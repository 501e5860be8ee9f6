#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xiaudit/quadrature.hpp"
#include "xiaudit/report.hpp"
#include "xiaudit/specfun.hpp"
#include "xiaudit/zeros.hpp"

namespace xiaudit {

/// lambda = s (s - 1).
Complex lambda_from_s(Complex s);

/// Both roots of r (r - 1) = lambda, i.e. 1/2 -+ sqrt(1/4 + lambda). The
/// smaller root is recovered from the product of roots so it keeps full
/// relative accuracy when lambda is tiny.
std::pair<Complex, Complex> s_from_lambda(Complex lambda);

/// nu = sqrt(lambda + 1/4): real for lambda >= -1/4, imaginary below.
/// Integer real orders are representable; callers check closed_form_pole().
BesselOrder nu_from_lambda(double lambda);

/// int_0^inf r K_order(r)^2 dr by exp-sinh quadrature, relative error
/// estimate <= rel_tol. Real orders >= 1 make the r -> 0 end
/// non-integrable and surface as DivergenceError.
QuadratureResult norm_integral_quadrature(const BesselOrder& order, double rel_tol = 1e-9,
                                          unsigned threads = 1);

/// Closed form with coefficient 1/8: (1/8) pi nu / sin(pi nu), or
/// (1/8) pi mu / sinh(pi mu) for nu = i mu. PoleError at integer real order.
double norm_integral_claimed(const BesselOrder& order);

/// Standard-table closed form, coefficient 1/2.
double norm_integral_standard(const BesselOrder& order);

inline constexpr double kClaimedCoefficient = 0.125;
inline constexpr double kStandardCoefficient = 0.5;

struct NormIntegralEntry {
  BesselOrder order;
  std::optional<QuadratureResult> quadrature;
  std::optional<double> closed_form;  // coefficient-1/8 form
  std::optional<double> ratio;        // quadrature / closed_form
  std::string failure;                // empty on success

  [[nodiscard]] bool ok() const { return failure.empty(); }
};

struct NormIntegralAudit {
  std::vector<NormIntegralEntry> entries;
  double common_ratio = 0.0;
  /// (max - min) / |mean| over the successful ratios.
  double relative_spread = 0.0;
  double tolerance = 1e-6;
  Verdict verdict = Verdict::inconclusive;
};

/// Ratio of quadrature to the coefficient-1/8 closed form for each order.
/// The batch is CONSISTENT_UP_TO_CONSTANT when every successful ratio agrees
/// with the others to `tolerance` relative (PASS if the constant is 1, FAIL
/// if they disagree). Per-order failures (divergence, pole) are recorded in
/// their entry and do not abort the batch.
NormIntegralAudit audit_norm_identity(const std::vector<BesselOrder>& orders, double tolerance = 1e-6,
                                      unsigned threads = 1);

AuditReport to_report(const NormIntegralAudit& audit);

struct CouplingRecord {
  Complex s;
  Complex lambda;
  BesselOrder nu;
  std::optional<int> source_zero_index;
  /// Present when the finiteness of the norm integral was audited.
  std::optional<QuadratureResult> norm;

  [[nodiscard]] bool lambda_is_real() const { return lambda.imag() == 0.0; }
};

struct SpectrumOptions {
  bool audit_finiteness = true;
  double rel_tol = 1e-9;
  unsigned threads = 1;
};

/// One record per zero, s = 1/2 + i gamma.
std::vector<CouplingRecord> coupling_spectrum(const std::vector<CriticalZero>& zeros,
                                              const SpectrumOptions& options = {});

/// PASS when every lambda is real, below -1/4, equals -(gamma^2 + 1/4) to
/// 1e-12 relative, every nu is imaginary, and every audited norm converged.
AuditReport spectrum_report(const std::vector<CouplingRecord>& records);

}  // namespace xiaudit
