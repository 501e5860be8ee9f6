#include "xiaudit/hadamard.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "xiaudit/errors.hpp"
#include "xiaudit/fit.hpp"
#include "xiaudit/parallel.hpp"

namespace xiaudit {
namespace {

// Fixed block size: the reduction tree depends on N only, never on threads.
constexpr std::size_t kBlock = 64;

double pair_coefficient(double gamma) { return 0.25 + gamma * gamma; }

// s(s-1) with the real and imaginary parts formed separately, so that on
// the critical line q = -(1/4 + t^2) rounds exactly like a_n and
// a_n + q vanishes bit-for-bit at a stored zero.
Complex quadratic(Complex s) {
  const double x = s.real();
  const double y = s.imag();
  return {x * (x - 1.0) - y * y, y * (2.0 * x - 1.0)};
}

template <typename T, typename Combine>
T tree_reduce(std::vector<T> values, T identity, Combine combine) {
  if (values.empty()) return identity;
  while (values.size() > 1) {
    std::vector<T> next;
    next.reserve((values.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) next.push_back(combine(values[i], values[i + 1]));
    if (values.size() % 2 == 1) next.push_back(values.back());
    values = std::move(next);
  }
  return values.front();
}

template <typename T, typename Term, typename Combine>
T blocked_reduce(std::size_t n, T identity, unsigned threads, Term term, Combine combine) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  auto partial = parallel_map<T>(blocks, threads, [&](std::size_t b) {
    T acc = identity;
    const std::size_t hi = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < hi; ++i) acc = combine(acc, term(i));
    return acc;
  });
  return tree_reduce(std::move(partial), identity, combine);
}

void check_count(const ProductSpec& spec, std::size_t n_factors) {
  if (n_factors > spec.zero_ordinates.size()) {
    throw DomainError(fmt::format("product: {} factors requested, {} ordinates known", n_factors,
                                  spec.zero_ordinates.size()));
  }
}

Complex prefactor(Complex s, const ProductSpec& spec) {
  Complex g = std::exp(Complex(spec.B, 0.0) + spec.D * s);
  for (int k = 0; k < spec.multiplicity; ++k) g *= s;
  return g;
}

}  // namespace

void ProductSpec::validate() const {
  if (multiplicity < 0) throw DomainError("ProductSpec: negative multiplicity");
  for (std::size_t i = 0; i < zero_ordinates.size(); ++i) {
    if (!(zero_ordinates[i] > 0.0) || !std::isfinite(zero_ordinates[i])) {
      throw DomainError("ProductSpec: ordinates must be positive and finite");
    }
    if (i > 0 && !(zero_ordinates[i] > zero_ordinates[i - 1])) {
      throw DomainError("ProductSpec: ordinates must be strictly increasing");
    }
  }
}

ProductSpec ProductSpec::from_zeros(const std::vector<CriticalZero>& zeros) {
  ProductSpec spec;
  spec.zero_ordinates.reserve(zeros.size());
  for (const auto& z : zeros) spec.zero_ordinates.push_back(z.gamma);
  spec.validate();
  return spec;
}

Complex bare_product(Complex s, const ProductSpec& spec, std::size_t n_factors, unsigned threads) {
  check_count(spec, n_factors);
  const Complex q = quadratic(s);
  return blocked_reduce<Complex>(
      n_factors, Complex(1.0, 0.0), threads,
      [&](std::size_t i) {
        const double a = pair_coefficient(spec.zero_ordinates[i]);
        return ((a + q) / a) * std::exp(s / a);
      },
      [](Complex x, Complex y) { return x * y; });
}

Complex paired_product(Complex s, const ProductSpec& spec, std::size_t n_factors, unsigned threads) {
  return prefactor(s, spec) * bare_product(s, spec, n_factors, threads);
}

Complex symmetric_core(Complex s, const ProductSpec& spec, std::size_t n_factors, unsigned threads) {
  check_count(spec, n_factors);
  const Complex q = quadratic(s);
  return blocked_reduce<Complex>(
      n_factors, Complex(1.0, 0.0), threads,
      [&](std::size_t i) {
        const double a = pair_coefficient(spec.zero_ordinates[i]);
        return (a + q) / a;
      },
      [](Complex x, Complex y) { return x * y; });
}

double correction_sum(const ProductSpec& spec, std::size_t n_factors) {
  check_count(spec, n_factors);
  return blocked_reduce<double>(
      n_factors, 0.0, 1, [&](std::size_t i) { return 1.0 / pair_coefficient(spec.zero_ordinates[i]); },
      [](double x, double y) { return x + y; });
}

double newton_distance(Complex s, const ProductSpec& spec, std::size_t n_factors, unsigned threads) {
  check_count(spec, n_factors);
  const Complex q = quadratic(s);
  const Complex dq = 2.0 * s - 1.0;
  bool exact_zero = false;
  for (std::size_t i = 0; i < n_factors; ++i) {
    if (pair_coefficient(spec.zero_ordinates[i]) + q == Complex(0.0, 0.0)) exact_zero = true;
  }
  if (exact_zero || (spec.multiplicity > 0 && s == Complex(0.0, 0.0))) return 0.0;
  Complex log_derivative = blocked_reduce<Complex>(
      n_factors, Complex(0.0, 0.0), threads,
      [&](std::size_t i) {
        const double a = pair_coefficient(spec.zero_ordinates[i]);
        return dq / (a + q) + 1.0 / a;
      },
      [](Complex x, Complex y) { return x + y; });
  log_derivative += spec.D;
  if (spec.multiplicity > 0) log_derivative += static_cast<double>(spec.multiplicity) / s;
  const double mag = std::abs(log_derivative);
  if (mag == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / mag;
}

double truncation_tail_bound(Complex s, const ProductSpec& spec, std::size_t n_factors) {
  check_count(spec, n_factors);
  const auto& g = spec.zero_ordinates;
  if (g.size() < 2) return std::numeric_limits<double>::infinity();
  double known = 0.0;
  for (std::size_t i = n_factors; i < g.size(); ++i) known += 1.0 / pair_coefficient(g[i]);
  // Ordinates past the list at the mean gap: sum_k 1/(g_L + k h)^2 <= 1/(h (g_L + h/2)).
  const double gap = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
  const double beyond = 1.0 / (gap * (g.back() + 0.5 * gap));
  return std::norm(s) * (known + beyond);
}

PrefactorFit fit_prefactor(std::span<const double> s, std::span<const double> target,
                           const ProductSpec& spec, std::size_t n_factors,
                           std::span<const double> weights, unsigned threads) {
  if (s.size() != target.size()) throw DomainError("fit_prefactor: sample arrays differ in length");
  std::vector<double> y(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (target[k] == 0.0 || !std::isfinite(target[k])) {
      throw DomainError(fmt::format("fit_prefactor: target vanishes or is not finite at s = {}", s[k]));
    }
    Complex bare = bare_product(Complex(s[k], 0.0), spec, n_factors, threads);
    for (int m = 0; m < spec.multiplicity; ++m) bare *= s[k];
    y[k] = std::log(std::abs(target[k])) - std::log(std::abs(bare));
  }
  const LineFit line = fit_line(s, y, weights);
  PrefactorFit fit;
  fit.B = line.intercept;
  fit.D = line.slope;
  fit.max_residual = line.max_residual;
  fit.rms_residual = line.rms_residual;
  fit.sample_lo = *std::min_element(s.begin(), s.end());
  fit.sample_hi = *std::max_element(s.begin(), s.end());
  fit.samples = s.size();
  return fit;
}

PrefactorFit fit_prefactor(const std::function<double(double)>& target, double lo, double hi,
                           std::size_t samples, const ProductSpec& spec, std::size_t n_factors,
                           unsigned threads) {
  if (samples < 2) throw SingularFitError("fit_prefactor: fewer than two samples");
  std::vector<double> s(samples);
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    s[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    t[k] = target(s[k]);
  }
  return fit_prefactor(s, t, spec, n_factors, {}, threads);
}

AuditReport audit_equality(const PrefactorFit& a, const PrefactorFit& b) {
  AuditReport r;
  r.name = "prefactor_equality";
  const double diff = std::abs(a.B - b.B);
  const double bound = a.max_residual + b.max_residual;
  r.measured = {a.B, a.D};
  r.reference = {b.B, b.D};
  r.ratio_or_residual = diff;
  r.tolerance = bound;
  r.params["slope_difference"] = std::abs(a.D - b.D);
  r.params["samples_a"] = static_cast<std::int64_t>(a.samples);
  r.params["samples_b"] = static_cast<std::int64_t>(b.samples);
  r.verdict = diff <= bound ? Verdict::pass : Verdict::fail;
  r.provenance = "constant terms of two prefactor fits, compared at the origin";
  return r;
}

CoincidenceAudit audit_coincidence(const ProductSpec& spec, std::span<const double> probe_ordinates,
                                   std::size_t n_factors, const CoincidenceOptions& options) {
  check_count(spec, n_factors);
  CoincidenceAudit audit;
  audit.measure = options.measure;
  audit.n_factors = n_factors;
  const auto stored = std::span<const double>(spec.zero_ordinates).first(n_factors);
  double worst_tail = 0.0;
  for (double gamma : probe_ordinates) {
    CoincidenceProbe p;
    p.ordinate = gamma;
    p.in_spec = std::binary_search(stored.begin(), stored.end(), gamma);
    const Complex s(0.5, gamma);
    p.magnitude = std::abs(paired_product(s, spec, n_factors, options.threads));
    p.distance = newton_distance(s, spec, n_factors, options.threads);
    p.tail_bound = truncation_tail_bound(s, spec, n_factors);
    worst_tail = std::max(worst_tail, p.tail_bound);
    audit.probes.push_back(p);
  }
  if (options.threshold) {
    audit.threshold = *options.threshold;
  } else {
    audit.threshold = options.measure == CoincidenceMeasure::newton_distance
                          ? kDefaultDistanceThreshold
                          : worst_tail;
  }
  bool all_within = true;
  bool any_distinct = false;
  for (const auto& p : audit.probes) {
    const double value =
        options.measure == CoincidenceMeasure::newton_distance ? p.distance : p.magnitude;
    if (!(value <= audit.threshold)) all_within = false;
    if (!p.in_spec && value > 10.0 * audit.threshold) any_distinct = true;
  }
  audit.verdict = any_distinct ? Verdict::distinct
                  : all_within ? Verdict::coincide
                               : Verdict::inconclusive;
  return audit;
}

AuditReport to_report(const CoincidenceAudit& audit) {
  AuditReport r;
  r.name = "zero_coincidence";
  const bool distance = audit.measure == CoincidenceMeasure::newton_distance;
  double worst = 0.0;
  double max_magnitude = 0.0;
  double max_tail = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::int64_t outside = 0;
  for (const auto& p : audit.probes) {
    const double value = distance ? p.distance : p.magnitude;
    r.measured.push_back(value);
    r.reference.push_back(p.ordinate);
    worst = std::max(worst, value);
    max_magnitude = std::max(max_magnitude, p.magnitude);
    max_tail = std::max(max_tail, p.tail_bound);
    if (!p.in_spec) {
      ++outside;
      min_margin = std::min(min_margin, value / audit.threshold);
    }
  }
  r.params["measure"] = std::string(distance ? "newton_distance" : "magnitude");
  r.params["factors"] = static_cast<std::int64_t>(audit.n_factors);
  r.params["probes"] = static_cast<std::int64_t>(audit.probes.size());
  r.params["probes_outside_spec"] = outside;
  r.params["max_magnitude"] = max_magnitude;
  r.params["tail_bound"] = max_tail;
  r.params["min_margin_outside"] = outside > 0 ? min_margin : 0.0;
  r.ratio_or_residual = worst;
  r.tolerance = audit.threshold;
  r.verdict = audit.verdict;
  r.provenance = "product over the zero set evaluated at probe ordinates on the critical line";
  return r;
}

TruncationStudy truncation_study(const ProductSpec& spec, const std::vector<std::size_t>& n_grid,
                                 double lo, double hi, std::size_t samples, unsigned threads) {
  TruncationStudy study;
  study.sample_lo = lo;
  study.sample_hi = hi;
  study.samples = samples;
  if (samples < 2) throw SingularFitError("truncation_study: fewer than two samples");
  std::vector<double> s(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    s[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  const auto target = parallel_map<double>(samples, threads, [&](std::size_t k) {
    return xi(Complex(s[k], 0.0)).real();
  });
  for (std::size_t n : n_grid) {
    TruncationPoint point;
    point.n_factors = n;
    point.fit = fit_prefactor(s, target, spec, n, {}, threads);
    ProductSpec fitted = spec;
    fitted.B = point.fit.B;
    fitted.D = point.fit.D;
    for (std::size_t k = 0; k < samples; ++k) {
      const double model = paired_product(Complex(s[k], 0.0), fitted, n, threads).real();
      point.max_relative_misfit = std::max(point.max_relative_misfit, std::abs(model / target[k] - 1.0));
    }
    study.points.push_back(point);
  }
  return study;
}

AuditReport to_report(const TruncationStudy& study, double limit) {
  AuditReport r;
  r.name = "product_truncation";
  bool monotone = true;
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    r.measured.push_back(study.points[i].max_relative_misfit);
    r.reference.push_back(static_cast<double>(study.points[i].n_factors));
    if (i > 0 && study.points[i].max_relative_misfit > study.points[i - 1].max_relative_misfit) {
      monotone = false;
    }
  }
  const double last = study.points.empty() ? 0.0 : study.points.back().max_relative_misfit;
  r.params["sample_lo"] = study.sample_lo;
  r.params["sample_hi"] = study.sample_hi;
  r.params["samples"] = static_cast<std::int64_t>(study.samples);
  r.params["non_increasing"] = monotone;
  if (!study.points.empty()) {
    r.params["fitted_B"] = study.points.back().fit.B;
    r.params["fitted_D"] = study.points.back().fit.D;
  }
  r.ratio_or_residual = last;
  r.tolerance = limit;
  r.verdict = study.points.empty() ? Verdict::inconclusive
              : (monotone && last < limit) ? Verdict::pass
                                           : Verdict::fail;
  r.provenance = "genus-1 product with fitted prefactor against xi on the real axis";
  return r;
}

AuditReport symmetry_report(const ProductSpec& spec, std::size_t n_factors,
                            std::span<const Complex> points, double tolerance, unsigned threads) {
  AuditReport r;
  r.name = "product_symmetry";
  const double exponent = spec.D + correction_sum(spec, n_factors);
  double worst_core = 0.0;
  double worst_full = 0.0;
  for (const Complex s : points) {
    const Complex a = symmetric_core(s, spec, n_factors, threads);
    const Complex b = symmetric_core(1.0 - s, spec, n_factors, threads);
    const double core_rel = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    ProductSpec plain = spec;
    plain.multiplicity = 0;
    const Complex p = paired_product(s, plain, n_factors, threads);
    const Complex p_reflected =
        paired_product(1.0 - s, plain, n_factors, threads) * std::exp(exponent * (2.0 * s - 1.0));
    const double full_rel = std::abs(p - p_reflected) / std::max(std::abs(p), std::abs(p_reflected));
    worst_core = std::max(worst_core, core_rel);
    worst_full = std::max(worst_full, full_rel);
    r.measured.push_back(core_rel);
    r.reference.push_back(full_rel);
  }
  r.params["factors"] = static_cast<std::int64_t>(n_factors);
  r.params["linear_exponent"] = exponent;
  r.params["max_core_asymmetry"] = worst_core;
  r.params["max_full_asymmetry"] = worst_full;
  r.ratio_or_residual = std::max(worst_core, worst_full);
  r.tolerance = tolerance;
  r.verdict = r.ratio_or_residual <= tolerance ? Verdict::pass : Verdict::fail;
  r.provenance = "reflection s -> 1 - s of the paired product";
  return r;
}

}  // namespace xiaudit
