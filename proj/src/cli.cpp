#include "xiaudit/cli.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "xiaudit/carlson.hpp"
#include "xiaudit/coupling.hpp"
#include "xiaudit/errors.hpp"
#include "xiaudit/hadamard.hpp"
#include "xiaudit/parallel.hpp"

namespace xiaudit {
namespace {

constexpr double kExponentialFitSpan = 10.0;
constexpr std::size_t kExponentialFitSamples = 51;
constexpr std::size_t kDifferenceIntegers = 10;
constexpr std::size_t kCoincidenceProbes = 5;
constexpr std::size_t kRoundtripSamples = 1000;

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions opts;
  opts.threads = cfg.threads;
  return opts;
}

std::optional<ZeroCache> load_cache(const RunConfig& cfg) {
  if (cfg.cache.empty() || !std::filesystem::exists(cfg.cache)) return std::nullopt;
  return read_cache(cfg.cache);
}

// Zeros always pass through the cache text, so a fresh scan and a cache hit
// hand identical bits to every downstream audit.
std::vector<CriticalZero> store_cache(const RunConfig& cfg, const ZeroCache& cache) {
  if (!cfg.cache.empty()) write_cache(cfg.cache, cache);
  return parse_cache(format_cache(cache)).zeros;
}

std::vector<BesselOrder> norm_identity_orders() {
  std::vector<BesselOrder> orders;
  for (int k = 1; k <= 9; ++k) orders.push_back(BesselOrder::real(k / 10.0));
  for (double mu : {0.5, 1.0, 2.0}) orders.push_back(BesselOrder::imaginary(mu));
  return orders;
}

// Both roots of r(r-1) = lambda must map back to lambda.
AuditReport coupling_roundtrip() {
  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> dist(-1e4, 1e4);
  double worst = 0.0;
  for (std::size_t k = 0; k < kRoundtripSamples; ++k) {
    const double re = dist(rng);
    const double im = k % 2 == 0 ? 0.0 : dist(rng);
    const Complex lambda(re, im);
    const auto [lo, hi] = s_from_lambda(lambda);
    for (const Complex root : {lo, hi}) {
      worst = std::max(worst, std::abs(lambda_from_s(root) - lambda) / std::max(1.0, std::abs(lambda)));
    }
  }
  AuditReport r;
  r.name = "coupling_roundtrip";
  r.params["samples"] = static_cast<std::int64_t>(kRoundtripSamples);
  r.ratio_or_residual = worst;
  r.tolerance = 1e-12;
  r.verdict = worst < r.tolerance ? Verdict::pass : Verdict::fail;
  r.provenance = "lambda = s(s-1) inverted and re-applied";
  return r;
}

std::vector<std::size_t> truncation_grid(std::size_t n) {
  std::vector<std::size_t> grid;
  for (std::size_t g : {50u, 100u, 200u, 400u, 800u}) {
    if (g <= n) grid.push_back(g);
  }
  if (grid.empty() || grid.back() != n) grid.push_back(n);
  return grid;
}

std::vector<AuditReport> audit_eq5(const RunConfig& cfg) {
  std::vector<AuditReport> out;
  out.push_back(to_report(audit_norm_identity(norm_identity_orders(), 1e-6, cfg.threads)));
  SpectrumOptions so;
  so.threads = cfg.threads;
  out.push_back(spectrum_report(coupling_spectrum(zeros_up_to(cfg, cfg.t_max), so)));
  out.push_back(coupling_roundtrip());
  return out;
}

std::vector<AuditReport> audit_eq9(const RunConfig&) {
  return {to_report(audit_xi_exponential(kExponentialFitSpan, kExponentialFitSamples))};
}

ProductSpec product_spec(const RunConfig& cfg) {
  return ProductSpec::from_zeros(zeros_by_count(cfg, cfg.n_zeros));
}

std::vector<AuditReport> audit_hadamard(const RunConfig& cfg) {
  std::vector<AuditReport> out;
  ProductSpec spec = product_spec(cfg);
  const std::size_t n = spec.zero_ordinates.size();
  out.push_back(to_report(truncation_study(spec, truncation_grid(n), -1.0, 2.0, 21, cfg.threads)));
  auto target = [](double s) { return xi(Complex(s, 0.0)).real(); };
  const PrefactorFit coarse = fit_prefactor(target, -1.0, 2.0, 21, spec, n, cfg.threads);
  const PrefactorFit fine = fit_prefactor(target, -1.0, 2.0, 31, spec, n, cfg.threads);
  out.push_back(audit_equality(coarse, fine));
  spec.B = coarse.B;
  spec.D = coarse.D;
  const std::vector<Complex> points = {{0.3, 2.0}, {-1.0, 0.0}, {2.0, 5.0}, {0.5, 20.0}, {3.0, -7.0}, {0.25, 0.0}};
  out.push_back(symmetry_report(spec, n, points, 1e-10, cfg.threads));
  return out;
}

std::vector<AuditReport> audit_coincidence_reports(const RunConfig& cfg) {
  const ProductSpec spec = product_spec(cfg);
  const std::size_t n = spec.zero_ordinates.size();
  std::vector<double> probes(spec.zero_ordinates.begin(),
                             spec.zero_ordinates.begin() + static_cast<std::ptrdiff_t>(std::min(n, kCoincidenceProbes)));
  if (!probes.empty()) probes.front() += cfg.perturb;
  CoincidenceOptions opts;
  opts.threads = cfg.threads;
  AuditReport distance = to_report(audit_coincidence(spec, probes, n, opts));
  distance.params["perturb"] = cfg.perturb;
  opts.measure = CoincidenceMeasure::magnitude;
  AuditReport magnitude = to_report(audit_coincidence(spec, probes, n, opts));
  magnitude.name = "zero_coincidence_magnitude";
  magnitude.params["perturb"] = cfg.perturb;
  return {distance, magnitude};
}

std::vector<AuditReport> audit_carlson(const RunConfig& cfg) {
  auto out = carlson_self_checks();
  out.push_back(to_report(audit_difference(kDifferenceIntegers, kExponentialFitSpan, cfg.m,
                                           kExponentialFitSamples)));
  return out;
}

AuditReport aggregate(const std::vector<AuditReport>& parts) {
  AuditReport r;
  r.name = "audit_all";
  bool failed = false;
  bool inconclusive = false;
  for (const auto& p : parts) {
    r.params[p.name] = std::string(to_string(p.verdict));
    failed = failed || is_failure(p.verdict);
    inconclusive = inconclusive || p.verdict == Verdict::inconclusive;
  }
  r.params["reports"] = static_cast<std::int64_t>(parts.size());
  r.verdict = failed ? Verdict::fail : inconclusive ? Verdict::inconclusive : Verdict::pass;
  r.provenance = "aggregate of every audit";
  return r;
}

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

bool wants_color(std::ostream& out) {
  const char* no_color = std::getenv("NO_COLOR");
  if (no_color != nullptr && no_color[0] != '\0') return false;
  return &out == &std::cout && ::isatty(STDOUT_FILENO) != 0;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw DomainError(fmt::format("cannot write {}", cfg.out));
  file << text;
  if (!file) throw DomainError(fmt::format("cannot write {}", cfg.out));
}

std::string zeros_text(const std::vector<CriticalZero>& zeros, const std::string& format) {
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& z : zeros) rows.push_back({{"n", z.index}, {"gamma", z.gamma}, {"abs_err", z.abs_err}});
    return serialize(rows);
  }
  std::string text = "n,gamma,abs_err\n";
  for (const auto& z : zeros) text += format_zero_row(z) + "\n";
  return text;
}

}  // namespace

std::vector<CriticalZero> zeros_up_to(const RunConfig& cfg, double t_max) {
  if (const auto cached = load_cache(cfg); cached && cache_covers(*cached, t_max, cfg.tol)) {
    std::vector<CriticalZero> zeros;
    for (const auto& z : cached->zeros) {
      if (z.gamma <= t_max) zeros.push_back(z);
    }
    return zeros;
  }
  return store_cache(cfg, {t_max, cfg.tol, scan_zeros(t_max, cfg.tol, scan_options(cfg))});
}

std::vector<CriticalZero> zeros_by_count(const RunConfig& cfg, std::size_t count) {
  if (count == 0) return {};
  if (const auto cached = load_cache(cfg); cached && cached->tol == cfg.tol && cached->zeros.size() >= count) {
    return {cached->zeros.begin(), cached->zeros.begin() + static_cast<std::ptrdiff_t>(count)};
  }
  auto zeros = first_zeros(count, cfg.tol, scan_options(cfg));
  const double reach = zeros.back().gamma;
  return store_cache(cfg, {reach, cfg.tol, std::move(zeros)});
}

std::vector<AuditReport> run_audit(AuditKind kind, const RunConfig& cfg) {
  switch (kind) {
    case AuditKind::eq5: return audit_eq5(cfg);
    case AuditKind::eq9: return audit_eq9(cfg);
    case AuditKind::hadamard: return audit_hadamard(cfg);
    case AuditKind::coincidence: return audit_coincidence_reports(cfg);
    case AuditKind::carlson: return audit_carlson(cfg);
    case AuditKind::all: break;
  }
  std::vector<AuditReport> parts;
  for (auto k : {AuditKind::eq5, AuditKind::eq9, AuditKind::hadamard, AuditKind::coincidence, AuditKind::carlson}) {
    auto more = run_audit(k, cfg);
    parts.insert(parts.end(), more.begin(), more.end());
  }
  std::vector<AuditReport> out = {aggregate(parts)};
  out.insert(out.end(), parts.begin(), parts.end());
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError(fmt::format("range '{}' is not of the form a:b", text));
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::stod(lo_text, &used_lo);
    const double hi = std::stod(hi_text, &used_hi);
    if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument("trailing");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw DomainError(fmt::format("range '{}' is not of the form a:b", text));
  }
}

PlotData plot_data(PlotKind kind, const RunConfig& cfg, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError(fmt::format("plot: empty range {}:{}", lo, hi));
  }
  PlotData plot;
  switch (kind) {
    case PlotKind::xi_critical: {
      plot.title = "Xi(t) scaled by exp(pi t / 4)";
      plot.x_label = "t";
      plot.y_label = "exp(pi t/4) Xi(t)";
      const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / 0.05)) + 1;
      Series s{"Xi", {}, {}};
      s.x.resize(n);
      for (std::size_t i = 0; i < n; ++i) s.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      s.y = parallel_map<double>(n, cfg.threads, [&](std::size_t i) { return xi_critical_scaled(s.x[i]); });
      plot.series.push_back(std::move(s));
      break;
    }
    case PlotKind::eq5_ratio: {
      plot.title = "norm integral: quadrature / closed form with coefficient 1/8";
      plot.x_label = "order magnitude";
      plot.y_label = "ratio";
      Series real{"real order nu", {}, {}};
      Series imag{"imaginary order i mu", {}, {}};
      for (int k = 0; k <= 20; ++k) {
        const double x = lo + (hi - lo) * k / 20.0;
        if (x > 0.0 && x <= 0.9) {
          const auto order = BesselOrder::real(x);
          real.x.push_back(x);
          real.y.push_back(norm_integral_quadrature(order).value / norm_integral_claimed(order));
        }
        if (x > 0.0) {
          const auto order = BesselOrder::imaginary(x);
          imag.x.push_back(x);
          imag.y.push_back(norm_integral_quadrature(order).value / norm_integral_claimed(order));
        }
      }
      plot.series = {real, imag};
      break;
    }
    case PlotKind::product_convergence: {
      plot.title = "genus-1 product: max relative misfit to xi on [-1, 2]";
      plot.x_label = "factors N";
      plot.y_label = "max relative misfit";
      plot.log_x = plot.log_y = true;
      const ProductSpec spec = product_spec(cfg);
      std::vector<std::size_t> grid;
      for (std::size_t n : {25u, 50u, 100u, 200u, 400u, 800u, 1600u}) {
        if (n <= spec.zero_ordinates.size() && static_cast<double>(n) >= lo && static_cast<double>(n) <= hi) {
          grid.push_back(n);
        }
      }
      if (grid.empty()) throw DomainError("plot: no product sizes inside the range");
      const auto study = truncation_study(spec, grid, -1.0, 2.0, 21, cfg.threads);
      Series s{"misfit", {}, {}};
      for (const auto& p : study.points) {
        s.x.push_back(static_cast<double>(p.n_factors));
        s.y.push_back(p.max_relative_misfit);
      }
      plot.series.push_back(std::move(s));
      break;
    }
    case PlotKind::residuals: {
      plot.title = "log xi(s'+1) minus the fitted log C + A (s'+1)";
      plot.x_label = "s'";
      plot.y_label = "residual";
      const auto fit = audit_xi_exponential(hi, kExponentialFitSamples);
      Series s{"residual", {}, {}};
      for (int k = 0; k <= 200; ++k) {
        const double x = lo + (hi - lo) * k / 200.0;
        s.x.push_back(x);
        s.y.push_back(std::log(xi(Complex(x + 1.0, 0.0)).real()) - std::log(fit.C) - fit.A * (x + 1.0));
      }
      plot.series.push_back(std::move(s));
      break;
    }
  }
  return plot;
}

std::string reports_to_json(const std::vector<AuditReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return serialize(arr);
}

std::string reports_to_csv(const std::vector<AuditReport>& reports) {
  std::string text = "name,verdict,ratio_or_residual,tolerance,index,measured,reference\n";
  for (const auto& r : reports) {
    const std::size_t rows = std::max<std::size_t>(1, std::max(r.measured.size(), r.reference.size()));
    for (std::size_t i = 0; i < rows; ++i) {
      const bool has_row = i < r.measured.size() || i < r.reference.size();
      text += fmt::format("{},{},{},{},{},{},{}\n", r.name, to_string(r.verdict), csv_number(r.ratio_or_residual),
                          csv_number(r.tolerance), has_row ? std::to_string(i) : "",
                          i < r.measured.size() ? csv_number(r.measured[i]) : "",
                          i < r.reference.size() ? csv_number(r.reference[i]) : "");
    }
  }
  return text;
}

std::string render_reports(const std::vector<AuditReport>& reports, bool color) {
  auto paint = [color](Verdict v) {
    const std::string label(to_string(v));
    if (!color) return label;
    const char* code = is_failure(v) ? "31" : v == Verdict::inconclusive ? "33" : v == Verdict::not_applicable ? "2" : "32";
    return fmt::format("\x1b[{}m{}\x1b[0m", code, label);
  };
  std::string text;
  for (const auto& r : reports) {
    text += fmt::format("{:<28} {}\n", r.name, paint(r.verdict));
    text += fmt::format("  value {:.6g}  tolerance {:.6g}\n", r.ratio_or_residual, r.tolerance);
    for (const auto& [key, value] : r.params) {
      std::string shown = std::visit(
          [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, double>) return fmt::format("{:.10g}", v);
            else return fmt::format("{}", v);
          },
          value);
      text += fmt::format("  {} = {}\n", key, shown);
    }
    if (!r.provenance.empty()) text += fmt::format("  ({})\n", r.provenance);
  }
  return text;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical audit of the xi-function zero correspondence", "xiaudit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig cfg;
  app.add_option("--t-max", cfg.t_max, "Largest ordinate to scan")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "Absolute tolerance on zero ordinates")->check(CLI::PositiveNumber);
  app.add_option("--n-zeros", cfg.n_zeros, "Zeros used by the product audits")->check(CLI::PositiveNumber);
  app.add_option("--perturb", cfg.perturb, "Shift applied to the first coincidence probe");
  app.add_option("--m", cfg.m, "Integer sampling scale for the difference audit")->check(CLI::PositiveNumber);
  app.add_option("--threads", cfg.threads, "Worker threads; 0 = all cores");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "Output file; stdout when absent");
  app.add_option("--cache", cfg.cache, "Zero cache file; empty disables it");

  auto* zeros_cmd = app.add_subcommand("zeros", "List critical-line zeros up to --t-max");

  auto* audit_cmd = app.add_subcommand("audit", "Run one audit or all of them");
  std::string which;
  audit_cmd->add_option("which", which, "eq5 | eq9 | hadamard | coincidence | carlson | all")
      ->required()
      ->check(CLI::IsMember({"eq5", "eq9", "hadamard", "coincidence", "carlson", "all"}));

  auto* plot_cmd = app.add_subcommand("plot", "Write a static SVG plot");
  std::string plot_target;
  std::string range;
  plot_cmd->add_option("target", plot_target, "xi-critical | eq5-ratio | product-convergence | residuals")
      ->required()
      ->check(CLI::IsMember({"xi-critical", "eq5-ratio", "product-convergence", "residuals"}));
  plot_cmd->add_option("--t", range, "Abscissa range a:b");

  auto* report_cmd = app.add_subcommand("report", "Render a JSON report file for the terminal");
  std::string report_path;
  report_cmd->add_option("file", report_path, "Report file written by `audit`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (*zeros_cmd) {
      // Zero tables default to CSV; --format json switches them.
      const std::string format = app.count("--format") > 0 ? cfg.format : "csv";
      const auto zeros = zeros_up_to(cfg, cfg.t_max);
      emit(cfg, zeros_text(zeros, format), out);
      return kExitSuccess;
    }
    if (*audit_cmd) {
      const AuditKind kind = which == "eq5"           ? AuditKind::eq5
                             : which == "eq9"         ? AuditKind::eq9
                             : which == "hadamard"    ? AuditKind::hadamard
                             : which == "coincidence" ? AuditKind::coincidence
                             : which == "carlson"     ? AuditKind::carlson
                                                      : AuditKind::all;
      const auto reports = run_audit(kind, cfg);
      emit(cfg, cfg.format == "csv" ? reports_to_csv(reports) : reports_to_json(reports), out);
      bool failed = false;
      for (const auto& r : reports) {
        if (r.verdict == Verdict::inconclusive) err << fmt::format("note: {} is INCONCLUSIVE\n", r.name);
        failed = failed || is_failure(r.verdict);
      }
      return failed ? kExitAuditFailure : kExitSuccess;
    }
    if (*plot_cmd) {
      const PlotKind kind = plot_target == "xi-critical"   ? PlotKind::xi_critical
                            : plot_target == "eq5-ratio"   ? PlotKind::eq5_ratio
                            : plot_target == "residuals"   ? PlotKind::residuals
                                                           : PlotKind::product_convergence;
      std::string chosen = range;
      if (chosen.empty()) {
        chosen = kind == PlotKind::xi_critical   ? fmt::format("0:{}", cfg.t_max)
                 : kind == PlotKind::eq5_ratio   ? std::string("0.05:3")
                 : kind == PlotKind::residuals   ? fmt::format("0:{}", kExponentialFitSpan)
                                                 : fmt::format("1:{}", cfg.n_zeros);
      }
      const auto [lo, hi] = parse_range(chosen);
      emit(cfg, render_svg(plot_data(kind, cfg, lo, hi)), out);
      return kExitSuccess;
    }
    if (*report_cmd) {
      std::ifstream file(report_path, std::ios::binary);
      if (!file) throw DomainError(fmt::format("cannot read {}", report_path));
      std::vector<AuditReport> reports;
      try {
        const auto doc = nlohmann::json::parse(file);
        if (doc.is_array()) {
          for (const auto& item : doc) reports.push_back(report_from_json(item));
        } else {
          reports.push_back(report_from_json(doc));
        }
      } catch (const std::exception& e) {
        throw DomainError(fmt::format("{} is not a report file: {}", report_path, e.what()));
      }
      const std::string text = render_reports(reports, cfg.out.empty() && wants_color(out));
      emit(cfg, text, out);
      return kExitSuccess;
    }
  } catch (const CacheCorruptionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCacheCorruption;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidBracketError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  }
  return kExitUsage;
}

}  // namespace xiaudit
