#include "xiaudit/carlson.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "xiaudit/errors.hpp"
#include "xiaudit/fit.hpp"
#include "xiaudit/quadrature.hpp"

namespace xiaudit {
namespace {

constexpr double kPi = std::numbers::pi;
// Relative floor on the slope uncertainty: a fitted slope is never trusted
// beyond this many digits.
constexpr double kSlopeFloor = 1e-9;

ExponentialFit fit_from_nodes(const std::function<double(double)>& target, std::span<const double> nodes,
                              std::span<const double> weights, double s_max) {
  std::vector<double> x(nodes.size());
  std::vector<double> y(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    x[k] = nodes[k] + 1.0;
    const double v = target(x[k]);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(fmt::format("exponential fit: target not positive at s' = {}", nodes[k]));
    }
    y[k] = std::log(v);
  }
  const LineFit line = fit_line(x, y, weights);
  ExponentialFit fit;
  fit.C = std::exp(line.intercept);
  fit.A = line.slope;
  fit.max_residual = line.max_residual;
  fit.rms_residual = line.rms_residual;
  fit.s_max = s_max;
  fit.samples = nodes.size();
  return fit;
}

}  // namespace

AxisGrowth estimate_type(const ComplexFunction& f, Axis axis, double radius) {
  if (!(radius > 0.0)) throw DomainError("estimate_type: radius must be positive");
  AxisGrowth g;
  g.radius = radius;
  std::vector<double> r;
  std::vector<double> log_abs;
  bool overflow = false;
  const double r0 = 0.25 * radius;
  for (std::size_t k = 0; k < kGrowthSamples; ++k) {
    const double rk = r0 * std::pow(4.0, static_cast<double>(k) / static_cast<double>(kGrowthSamples - 1));
    const Complex z = axis == Axis::real ? Complex(rk, 0.0) : Complex(0.0, rk);
    const double mag = std::abs(f(z));
    if (!std::isfinite(mag)) {
      overflow = true;
      continue;
    }
    if (mag < kUnderflowGuard) continue;
    r.push_back(rk);
    log_abs.push_back(std::log(mag));
  }
  g.samples_used = r.size();
  if (overflow) {
    g.slope = std::numeric_limits<double>::infinity();
    g.uncertainty = std::numeric_limits<double>::infinity();
    return g;
  }
  if (r.size() < 2) {
    g.all_zero = true;
    return g;
  }
  const LineFit line = fit_line(r, log_abs);
  g.slope = line.slope;
  g.fit_residual = line.max_residual;
  g.uncertainty = line.slope_stderr + kSlopeFloor * std::max(1.0, std::abs(line.slope));
  return g;
}

GrowthEstimate estimate_growth(const ComplexFunction& f, double radius) {
  GrowthEstimate e;
  e.real_axis = estimate_type(f, Axis::real, radius);
  e.imaginary_axis = estimate_type(f, Axis::imaginary, radius);
  e.alpha = e.real_axis.slope;
  e.beta = e.imaginary_axis.slope;
  e.fit_residual = std::max(e.real_axis.fit_residual, e.imaginary_axis.fit_residual);
  e.sample_radius = radius;
  return e;
}

IntegerVanishing check_integer_vanishing(const ComplexFunction& f, std::size_t n_max, double tol,
                                         double scale) {
  IntegerVanishing v;
  v.values.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double mag = std::abs(f(Complex(static_cast<double>(n) * scale, 0.0)));
    v.values.push_back(mag);
    if (!(mag <= v.max_abs)) {
      v.max_abs = mag;
      v.argmax = n;
    }
  }
  v.vanishes = v.max_abs <= tol;
  return v;
}

std::string_view to_string(CarlsonConclusion conclusion) {
  switch (conclusion) {
    case CarlsonConclusion::identically_zero_implied: return "IDENTICALLY_ZERO_IMPLIED";
    case CarlsonConclusion::conditions_not_met: return "CONDITIONS_NOT_MET";
    case CarlsonConclusion::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

CarlsonVerdict carlson_verdict(const ComplexFunction& f, std::size_t n_max, double radius,
                               double margin, double vanishing_tol, double scale) {
  if (!(margin > 0.0)) throw DomainError("carlson_verdict: margin must be positive");
  CarlsonVerdict v;
  v.margin = margin;
  v.growth = estimate_growth(f, radius);
  v.vanishing = check_integer_vanishing(f, n_max, vanishing_tol, scale);
  v.alpha_finite = std::isfinite(v.growth.alpha);
  v.beta_below_pi = v.growth.beta + v.growth.imaginary_axis.uncertainty <= kPi - margin;
  v.integer_vanishing = v.vanishing.vanishes;
  if (n_max == 0) {
    v.conclusion = CarlsonConclusion::inconclusive;
  } else if (v.alpha_finite && v.beta_below_pi && v.integer_vanishing) {
    v.conclusion = CarlsonConclusion::identically_zero_implied;
  } else {
    v.conclusion = CarlsonConclusion::conditions_not_met;
  }
  return v;
}

PrefactorFit audit_jost_exponential(std::span<const double> grid) {
  std::vector<double> y(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) y[k] = std::log(std::exp(kPi * grid[k]));
  const LineFit line = fit_line(grid, y);
  PrefactorFit fit;
  fit.B = line.intercept;
  fit.D = line.slope;
  fit.max_residual = line.max_residual;
  fit.rms_residual = line.rms_residual;
  fit.sample_lo = *std::min_element(grid.begin(), grid.end());
  fit.sample_hi = *std::max_element(grid.begin(), grid.end());
  fit.samples = grid.size();
  return fit;
}

ExponentialFit audit_xi_exponential(const std::function<double(double)>& target, double s_max,
                                    std::size_t samples) {
  if (!(s_max > 0.0)) throw DomainError("exponential fit: s_max must be positive");
  if (samples < 2) throw SingularFitError("exponential fit: fewer than two samples");
  const auto rule = gauss_legendre(samples, 0.0, s_max);
  return fit_from_nodes(target, rule.nodes, rule.weights, s_max);
}

ExponentialFit audit_xi_exponential(double s_max, std::size_t samples, const EulerMaclaurinPlan& plan) {
  return audit_xi_exponential([&plan](double s) { return xi(Complex(s, 0.0), plan).real(); }, s_max,
                              samples);
}

ExponentialFit fit_exponential_equispaced(const std::function<double(double)>& target, double s_max,
                                          std::size_t samples) {
  if (samples < 2) throw SingularFitError("exponential fit: fewer than two samples");
  std::vector<double> nodes(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    nodes[k] = s_max * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  return fit_from_nodes(target, nodes, {}, s_max);
}

AuditReport to_report(const ExponentialFit& fit) {
  AuditReport r;
  r.name = "xi_exponential_fit";
  r.measured = {fit.C, fit.A};
  r.params["C"] = fit.C;
  r.params["A"] = fit.A;
  r.params["s_max"] = fit.s_max;
  r.params["samples"] = static_cast<std::int64_t>(fit.samples);
  r.params["rms_residual"] = fit.rms_residual;
  r.params["max_residual"] = fit.max_residual;
  r.ratio_or_residual = fit.max_residual;
  r.tolerance = 0.0;
  r.verdict = Verdict::not_applicable;
  r.provenance = "hypothesis xi(s'+1) = C e^(A (s'+1)) for real s' >= 0";
  return r;
}

DifferenceAudit audit_difference(const ComplexFunction& target, const ExponentialFit& fit,
                                 std::size_t n_max, int m) {
  if (m <= 0) throw DomainError("audit_difference: m must be positive");
  DifferenceAudit audit;
  audit.fit = fit;
  audit.scale_m = m;
  audit.a = std::log(fit.C) + fit.A;
  audit.b = fit.A - kPi;
  const double a = audit.a;
  const double rate = audit.b + kPi;
  ComplexFunction d = [a, rate, &target](Complex u) { return std::exp(a + rate * u) - target(u + 1.0); };
  const double scale = 1.0 / static_cast<double>(m);
  double largest = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    audit.targets.push_back(std::abs(target(Complex(static_cast<double>(n) * scale + 1.0, 0.0))));
    largest = std::max(largest, audit.targets.back());
  }
  audit.vanishing_tol = 1e-10 * largest;
  audit.verdict = carlson_verdict(d, n_max, kGrowthRadius, kDefaultBetaMargin, audit.vanishing_tol, scale);
  audit.residuals = audit.verdict.vanishing.values;
  return audit;
}

DifferenceAudit audit_difference(std::size_t n_max, double s_max, int m, std::size_t fit_samples) {
  const ExponentialFit fit = audit_xi_exponential(s_max, fit_samples);
  return audit_difference([](Complex s) { return xi(s); }, fit, n_max, m);
}

AuditReport to_report(const DifferenceAudit& audit) {
  AuditReport r;
  r.name = "carlson_difference";
  r.measured = audit.residuals;
  r.reference = audit.targets;
  const auto& v = audit.verdict;
  r.params["C"] = audit.fit.C;
  r.params["A"] = audit.fit.A;
  r.params["a"] = audit.a;
  r.params["b"] = audit.b;
  r.params["m"] = static_cast<std::int64_t>(audit.scale_m);
  r.params["alpha"] = v.growth.alpha;
  r.params["beta"] = v.growth.beta;
  r.params["beta_margin"] = v.margin;
  r.params["growth_radius"] = v.growth.sample_radius;
  r.params["alpha_finite"] = v.alpha_finite;
  r.params["beta_below_pi"] = v.beta_below_pi;
  r.params["integer_vanishing"] = v.integer_vanishing;
  r.params["conclusion"] = std::string(to_string(v.conclusion));
  r.ratio_or_residual = v.vanishing.max_abs;
  r.tolerance = audit.vanishing_tol;
  switch (v.conclusion) {
    case CarlsonConclusion::identically_zero_implied: r.verdict = Verdict::pass; break;
    case CarlsonConclusion::conditions_not_met: r.verdict = Verdict::not_applicable; break;
    case CarlsonConclusion::inconclusive: r.verdict = Verdict::inconclusive; break;
  }
  r.provenance = "difference e^(a+bu) X(u) - xi(u+1) at integers, with growth along both axes";
  return r;
}

std::vector<AuditReport> carlson_self_checks() {
  std::vector<AuditReport> out;

  {
    AuditReport r;
    r.name = "carlson_sharpness";
    const ComplexFunction sine = [](Complex z) { return std::sin(kPi * z); };
    bool ok = true;
    std::string margins;
    for (double margin : {0.5, 0.05, 1e-3, 1e-6, 1e-12}) {
      const auto v = carlson_verdict(sine, 50, 20.0, margin);
      ok = ok && v.conclusion == CarlsonConclusion::conditions_not_met;
      r.measured.push_back(v.growth.beta);
      r.reference.push_back(kPi - margin);
      if (!margins.empty()) margins += ' ';
      margins += fmt::format("{:g}", margin);
    }
    r.params["function"] = std::string("sin(pi z)");
    r.params["margins"] = margins;
    r.ratio_or_residual = r.measured.front() - kPi;
    r.tolerance = 1e-3;
    ok = ok && std::abs(r.ratio_or_residual) <= r.tolerance;
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    r.provenance = "sin(pi z) vanishes at the integers with type exactly pi";
    out.push_back(r);
  }

  {
    AuditReport r;
    r.name = "carlson_zero_function";
    const ComplexFunction zero = [](Complex) { return Complex(0.0, 0.0); };
    const ComplexFunction programmatic = [](Complex z) {
      return std::exp(0.5 * z) * std::sin(kPi * z) * 0.0 + (z - z);
    };
    bool ok = true;
    for (const auto* f : {&zero, &programmatic}) {
      const auto v = carlson_verdict(*f, 50, 20.0);
      ok = ok && v.conclusion == CarlsonConclusion::identically_zero_implied;
      r.measured.push_back(v.vanishing.max_abs);
    }
    r.reference = {0.0, 0.0};
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    r.provenance = "the zero function meets every condition";
    out.push_back(r);
  }

  {
    AuditReport r;
    r.name = "growth_type_recovery";
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0, 3.0}) {
      const auto g = estimate_type([c](Complex z) { return std::exp(c * z); }, Axis::real, kGrowthRadius);
      r.measured.push_back(g.slope);
      r.reference.push_back(c);
      worst = std::max(worst, std::abs(g.slope - c));
    }
    r.ratio_or_residual = worst;
    r.tolerance = 1e-6;
    r.verdict = worst <= r.tolerance ? Verdict::pass : Verdict::fail;
    r.provenance = "slope of log|e^(c z)| along the real axis";
    out.push_back(r);
  }

  {
    const std::vector<double> grid = {0.0, 1.0, 2.0};
    const PrefactorFit fit = audit_jost_exponential(grid);
    AuditReport r;
    r.name = "jost_exponential";
    r.measured = {fit.B, fit.D};
    r.reference = {0.0, kPi};
    r.ratio_or_residual = std::max(std::abs(fit.B), std::abs(fit.D - kPi));
    r.tolerance = 1e-12;
    r.params["max_residual"] = fit.max_residual;
    r.verdict = r.ratio_or_residual <= r.tolerance ? Verdict::pass : Verdict::fail;
    r.provenance = "X(s') = e^(pi s') taken as given";
    out.push_back(r);
  }
  return out;
}

}  // namespace xiaudit
