#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "xiaudit/report.hpp"
#include "xiaudit/specfun.hpp"
#include "xiaudit/zeros.hpp"

namespace xiaudit {

/// Genus-1 product over critical-line zeros rho = 1/2 + i gamma. Each
/// ordinate stands for rho and its conjugate; the prefactor is
/// s^multiplicity e^(B + D s).
struct ProductSpec {
  std::vector<double> zero_ordinates;
  int multiplicity = 0;
  double B = 0.0;
  double D = 0.0;

  /// Ordinates strictly increasing and positive, multiplicity >= 0.
  void validate() const;
  static ProductSpec from_zeros(const std::vector<CriticalZero>& zeros);
};

/// e^(B + D s) s^m prod_{n<=N} (1 + s(s-1)/a_n) e^(s/a_n), a_n = 1/4 + gamma_n^2.
/// The paired factor equals (1 - s/rho)(1 - s/conj rho) e^(s/rho + s/conj rho).
/// Blocks of factors are reduced in a fixed pairwise tree, so the result does
/// not depend on `threads`.
Complex paired_product(Complex s, const ProductSpec& spec, std::size_t n_factors,
                       unsigned threads = 1);

/// paired_product without s^m e^(B + D s).
Complex bare_product(Complex s, const ProductSpec& spec, std::size_t n_factors,
                     unsigned threads = 1);

/// prod (1 + s(s-1)/a_n): the part invariant under s -> 1 - s.
Complex symmetric_core(Complex s, const ProductSpec& spec, std::size_t n_factors,
                       unsigned threads = 1);

/// sum_{n<=N} 1/a_n, the coefficient the bare product's exponential
/// corrections contribute to the linear term.
double correction_sum(const ProductSpec& spec, std::size_t n_factors);

/// |1 / (d/ds log P)| at s: a Newton estimate of the distance from s to the
/// nearest zero of the product. Exactly 0 when s hits a stored zero.
double newton_distance(Complex s, const ProductSpec& spec, std::size_t n_factors,
                       unsigned threads = 1);

/// |s|^2 sum_{n>N} 1/a_n, with ordinates past the stored list extrapolated
/// by the mean gap. Infinite when fewer than two ordinates are known.
double truncation_tail_bound(Complex s, const ProductSpec& spec, std::size_t n_factors);

struct PrefactorFit {
  double B = 0.0;
  double D = 0.0;
  /// max |log g_model - log g_target| over the samples.
  double max_residual = 0.0;
  /// Weighted RMS of the same residual.
  double rms_residual = 0.0;
  double sample_lo = 0.0;
  double sample_hi = 0.0;
  std::size_t samples = 0;
};

/// Least squares for log|target(s_k)| - log|bare(s_k)| = B + D s_k on real
/// samples. Throws SingularFitError when fewer than two distinct samples
/// exist and DomainError when a target value is zero.
PrefactorFit fit_prefactor(std::span<const double> s, std::span<const double> target,
                           const ProductSpec& spec, std::size_t n_factors,
                           std::span<const double> weights = {}, unsigned threads = 1);

/// Equispaced samples of `target` on [lo, hi].
PrefactorFit fit_prefactor(const std::function<double(double)>& target, double lo, double hi,
                           std::size_t samples, const ProductSpec& spec, std::size_t n_factors,
                           unsigned threads = 1);

/// PASS when |B_a - B_b| <= max_residual_a + max_residual_b.
AuditReport audit_equality(const PrefactorFit& a, const PrefactorFit& b);

enum class CoincidenceMeasure {
  /// Distance to the nearest product zero, in ordinate units.
  newton_distance,
  /// |P(1/2 + i gamma)| itself.
  magnitude,
};

inline constexpr double kDefaultDistanceThreshold = 1e-6;

struct CoincidenceOptions {
  /// Defaults: kDefaultDistanceThreshold for newton_distance, the truncation
  /// tail bound at the largest probe for magnitude.
  std::optional<double> threshold;
  CoincidenceMeasure measure = CoincidenceMeasure::newton_distance;
  unsigned threads = 1;
};

struct CoincidenceProbe {
  double ordinate = 0.0;
  bool in_spec = false;  // bit-for-bit equal to a stored ordinate
  double magnitude = 0.0;
  double distance = 0.0;
  double tail_bound = 0.0;
};

struct CoincidenceAudit {
  std::vector<CoincidenceProbe> probes;
  CoincidenceMeasure measure = CoincidenceMeasure::newton_distance;
  double threshold = 0.0;
  std::size_t n_factors = 0;
  Verdict verdict = Verdict::coincide;
};

/// COINCIDE when every probe measures <= threshold (vacuously for no
/// probes); DISTINCT when a probe outside the stored set measures more than
/// 10 * threshold; INCONCLUSIVE otherwise.
CoincidenceAudit audit_coincidence(const ProductSpec& spec, std::span<const double> probe_ordinates,
                                   std::size_t n_factors, const CoincidenceOptions& options = {});

AuditReport to_report(const CoincidenceAudit& audit);

struct TruncationPoint {
  std::size_t n_factors = 0;
  PrefactorFit fit;
  /// max |model / target - 1| over the samples.
  double max_relative_misfit = 0.0;
};

struct TruncationStudy {
  std::vector<TruncationPoint> points;
  double sample_lo = -1.0;
  double sample_hi = 2.0;
  std::size_t samples = 21;
};

/// Refits the prefactor to xi for every N and records the misfit.
TruncationStudy truncation_study(const ProductSpec& spec, const std::vector<std::size_t>& n_grid,
                                 double lo = -1.0, double hi = 2.0, std::size_t samples = 21,
                                 unsigned threads = 1);

/// PASS when the misfit never increases along the grid and the last one is
/// below `limit`.
AuditReport to_report(const TruncationStudy& study, double limit = 2e-2);

/// Checks core(s) = core(1-s) and the full relation
/// P(s) = P(1-s) e^((D + sum 1/a_n)(2s - 1)) to `tolerance` relative.
AuditReport symmetry_report(const ProductSpec& spec, std::size_t n_factors,
                            std::span<const Complex> points, double tolerance = 1e-10,
                            unsigned threads = 1);

}  // namespace xiaudit
