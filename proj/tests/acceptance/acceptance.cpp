// Pass/fail line per acceptance criterion. Exit status is non-zero when any
// criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "xiaudit/carlson.hpp"
#include "xiaudit/cli.hpp"
#include "xiaudit/coupling.hpp"
#include "xiaudit/hadamard.hpp"
#include "xiaudit/specfun.hpp"
#include "xiaudit/zeros.hpp"

using namespace xiaudit;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Accumulates failed sub-checks so one line can say what went wrong.
struct Checks {
  std::vector<std::string> failed;
  void expect(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
  Outcome outcome(std::string summary) const {
    if (failed.empty()) return {true, std::move(summary)};
    std::string joined;
    for (const auto& f : failed) joined += (joined.empty() ? "" : "; ") + f;
    return {false, joined};
  }
};

Outcome zero_finder() {
  Checks c;
  const auto zeros = scan_zeros(30.0, 1e-8);
  c.expect(zeros.size() == 3, fmt::format("found {} zeros below 30", zeros.size()));
  double gamma_diff = INFINITY;
  if (!zeros.empty()) {
    const auto& z = zeros.front();
    const auto doubled = refine_zero(z.t_lo - 0.01, z.t_hi + 0.01, 1e-8, EulerMaclaurinPlan{}.doubled());
    gamma_diff = std::abs(doubled.gamma - z.gamma);
    c.expect(gamma_diff < 1e-6, fmt::format("gamma_1 moved {:.3g} at doubled precision", gamma_diff));
  }
  for (double t : {10.0, 30.0, 50.0, 100.0}) {
    const auto report = count_check(t, scan_zeros(t, 1e-8).size());
    c.expect(report.verdict == Verdict::pass, fmt::format("count check at {}", t));
  }
  return c.outcome(fmt::format("3 zeros below 30, gamma_1 = {:.12f}, doubled-precision shift {:.2g}",
                               zeros.empty() ? 0.0 : zeros.front().gamma, gamma_diff));
}

Outcome xi_correctness() {
  Checks c;
  const double e2 = std::abs(xi(2.0).real() / (pi / 6.0) - 1.0);
  const double e0 = std::abs(xi(0.0) - 0.5);
  c.expect(e2 < 1e-10, fmt::format("xi(2) relative error {:.3g}", e2));
  c.expect(e0 < 1e-10, fmt::format("xi(0) error {:.3g}", e0));
  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> radius(0.0, 30.0), angle(-pi, pi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Complex s = std::polar(radius(rng), angle(rng));
    const Complex v = xi(s);
    worst = std::max(worst, std::abs(v - xi(1.0 - s)) / (1.0 + std::abs(v)));
  }
  c.expect(worst <= 1e-10, fmt::format("functional equation residual {:.3g}", worst));
  return c.outcome(fmt::format("xi(2) rel err {:.2g}, xi(0) err {:.2g}, functional equation max {:.2g}", e2,
                               e0, worst));
}

Outcome norm_identity() {
  Checks c;
  const auto half = norm_integral_quadrature(BesselOrder::real(0.5));
  const double err = std::abs(half.value - pi / 4.0);
  c.expect(err < 1e-8, fmt::format("order 1/2 misses pi/4 by {:.3g}", err));
  std::vector<BesselOrder> orders;
  for (int k = 1; k <= 9; ++k) orders.push_back(BesselOrder::real(0.1 * k));
  for (double mu : {0.5, 1.0, 2.0}) orders.push_back(BesselOrder::imaginary(mu));
  const auto audit = audit_norm_identity(orders);
  c.expect(audit.relative_spread <= 1e-6, fmt::format("ratio spread {:.3g}", audit.relative_spread));
  const auto report = to_report(audit);
  for (const char* key : {"common_ratio", "coefficient_claimed", "coefficient_standard", "implied_coefficient"}) {
    c.expect(report.params.count(key) == 1, fmt::format("report lacks {}", key));
  }
  return c.outcome(fmt::format("order 1/2 err {:.2g}; common ratio {:.10f} (spread {:.2g}); implied "
                               "coefficient {:.10f}; hypotheses 1/8 and 1/2 both reported; verdict {}",
                               err, audit.common_ratio, audit.relative_spread, audit.common_ratio / 8.0,
                               to_string(audit.verdict)));
}

Outcome coupling_spectrum_check() {
  Checks c;
  const auto zeros = first_zeros(10, 1e-10);
  const auto records = coupling_spectrum(zeros);
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double expected = -(zeros[i].gamma * zeros[i].gamma + 0.25);
    c.expect(r.lambda_is_real(), fmt::format("lambda_{} not real", i + 1));
    c.expect(r.lambda.real() < -0.25, fmt::format("lambda_{} >= -1/4", i + 1));
    c.expect(r.nu.is_imaginary(), fmt::format("nu_{} not imaginary", i + 1));
    c.expect(r.norm.has_value() && std::isfinite(r.norm->value), fmt::format("norm_{} did not converge", i + 1));
    worst_rel = std::max(worst_rel, std::abs(r.lambda.real() - expected) / std::abs(expected));
  }
  c.expect(records.size() == 10, "spectrum size");
  c.expect(worst_rel <= 1e-12, fmt::format("lambda relative error {:.3g}", worst_rel));

  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> dist(-1e4, 1e4);
  double roundtrip = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double lambda = dist(rng);
    const auto [lo, hi] = s_from_lambda(lambda);
    for (const Complex s : {lo, hi}) {
      roundtrip = std::max(roundtrip, std::abs(lambda_from_s(s) - lambda) / std::max(1.0, std::abs(lambda)));
    }
  }
  c.expect(roundtrip < 1e-12, fmt::format("roundtrip residual {:.3g}", roundtrip));
  return c.outcome(fmt::format("10 real lambdas below -1/4 (max rel err {:.2g}), imaginary orders, finite "
                               "norms; roundtrip residual {:.2g}",
                               worst_rel, roundtrip));
}

Outcome hadamard_product() {
  Checks c;
  const auto spec = ProductSpec::from_zeros(first_zeros(800, 1e-10));
  const auto study = truncation_study(spec, {50, 100, 200, 400, 800});
  std::string misfits;
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    const double m = study.points[i].max_relative_misfit;
    misfits += fmt::format("{}{}:{:.3g}", i ? " " : "", study.points[i].n_factors, m);
    if (i > 0) {
      c.expect(m <= study.points[i - 1].max_relative_misfit,
               fmt::format("misfit grew at N = {}", study.points[i].n_factors));
    }
  }
  const double last = study.points.back().max_relative_misfit;
  c.expect(last < 2e-2, fmt::format("misfit {:.3g} at N = 800", last));
  auto at_origin = spec;
  at_origin.B = study.points.back().fit.B;
  at_origin.D = study.points.back().fit.D;
  const Complex p0 = paired_product(0.0, at_origin, 800);
  c.expect(p0 == Complex(std::exp(at_origin.B), 0.0), "P(0) differs from e^B");
  return c.outcome(fmt::format("misfit {}; P(0) = e^B exactly", misfits));
}

Outcome coincidence() {
  Checks c;
  const auto spec = ProductSpec::from_zeros(first_zeros(800, 1e-10));
  std::vector<double> probes(spec.zero_ordinates.begin(), spec.zero_ordinates.begin() + 5);
  const auto same = audit_coincidence(spec, probes, 800);
  c.expect(same.verdict == Verdict::coincide, "own ordinates not COINCIDE");
  probes[0] += 0.01;
  const auto moved = audit_coincidence(spec, probes, 800);
  c.expect(moved.verdict == Verdict::distinct, "perturbed probe not DISTINCT");
  const double margin = moved.probes[0].distance / moved.threshold;
  c.expect(margin >= 10.0, fmt::format("margin {:.3g}x threshold", margin));
  return c.outcome(fmt::format("own ordinates COINCIDE; gamma_1 + 0.01 DISTINCT at distance {:.6f} "
                               "({:.3g}x threshold)",
                               moved.probes[0].distance, margin));
}

// The literal |P(s)| <= tail-bound reading, reported for information only.
std::string coincidence_magnitude_note() {
  const auto spec = ProductSpec::from_zeros(first_zeros(800, 1e-10));
  std::vector<double> probes(spec.zero_ordinates.begin(), spec.zero_ordinates.begin() + 5);
  probes[0] += 0.01;
  CoincidenceOptions options;
  options.measure = CoincidenceMeasure::magnitude;
  const auto audit = audit_coincidence(spec, probes, 800, options);
  return fmt::format("|P| = {:.3g} against tail bound {:.3g} gives {} for the perturbed probe",
                     audit.probes[0].magnitude, audit.probes[0].tail_bound, to_string(audit.verdict));
}

Outcome carlson() {
  Checks c;
  auto sine = [](Complex z) { return std::sin(pi * z); };
  for (double margin : {0.5, 0.05, 1e-3, 1e-6, 1e-9, 1e-12, 1e-15}) {
    const auto v = carlson_verdict(sine, 10, kGrowthRadius, margin);
    c.expect(v.conclusion == CarlsonConclusion::conditions_not_met,
             fmt::format("sin(pi z) at margin {} gave {}", margin, to_string(v.conclusion)));
  }
  const auto zero = carlson_verdict([](Complex) { return Complex(0.0, 0.0); }, 10, kGrowthRadius);
  c.expect(zero.conclusion == CarlsonConclusion::identically_zero_implied, "zero function");
  double worst = 0.0;
  for (double k : {0.5, 1.0, 2.0, 3.0}) {
    const auto g = estimate_type([k](Complex z) { return std::exp(k * z); }, Axis::real, kGrowthRadius);
    worst = std::max(worst, std::abs(g.slope - k));
  }
  c.expect(worst < 1e-6, fmt::format("type recovery error {:.3g}", worst));
  return c.outcome(fmt::format("sin(pi z) CONDITIONS_NOT_MET at every margin; zero function implied; "
                               "type recovery error {:.2g}",
                               worst));
}

Outcome exponential_fit() {
  Checks c;
  const auto a = to_report(audit_xi_exponential(10.0, 51));
  const auto b = to_report(audit_xi_exponential(10.0, 51));
  const std::string ja = serialize(to_json(a));
  c.expect(ja == serialize(to_json(b)), "report differs between runs");
  c.expect(a.verdict != Verdict::fail, "report verdict is FAIL");
  const auto synthetic = audit_xi_exponential([](double u) { return 0.5 * std::exp(0.3 * u); }, 10.0, 51);
  c.expect(synthetic.max_residual < 1e-12, fmt::format("synthetic residual {:.3g}", synthetic.max_residual));
  return c.outcome(fmt::format("xi residual {:.6g} emitted identically twice (verdict {}); synthetic "
                               "residual {:.2g}",
                               a.ratio_or_residual, to_string(a.verdict), synthetic.max_residual));
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const fs::path& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd =
      fmt::format("cd '{}' && '{}' {} > '{}' 2> /dev/null", dir.string(), XIAUDIT_CLI_PATH, args, out.string());
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

Outcome determinism() {
  Checks c;
  const fs::path dir = fs::temp_directory_path() / "xiaudit-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto first = cli(dir, "--cache zeros.csv audit all");
  const auto second = cli(dir, "--cache zeros.csv audit all");
  c.expect(!first.out.empty() && first.out == second.out, "audit all output differs between runs");
  c.expect(first.code == kExitSuccess || first.code == kExitAuditFailure,
           fmt::format("audit all exit {}", first.code));
  c.expect(first.code == second.code, "audit all exit codes differ");

  std::string text;
  {
    std::ifstream in(dir / "zeros.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto pos = text.find("\n1,");
  c.expect(pos != std::string::npos, "cache file missing");
  if (pos != std::string::npos) {
    text[pos + 4] = text[pos + 4] == '7' ? '8' : '7';
    std::ofstream(dir / "zeros.csv") << text;
    c.expect(cli(dir, "--cache zeros.csv zeros --t-max 30").code == kExitCacheCorruption, "corruption exit");
  }
  const struct {
    const char* args;
    int code;
  } expected[] = {
      {"--cache '' zeros --t-max 30 --tol 1e-8", kExitSuccess},
      {"--cache '' zeros --t-max -1", kExitUsage},
      {"--cache '' audit nonsense", kExitUsage},
      {"--cache '' plot xi-critical --t 5:5", kExitUsage},
      {"--cache '' --n-zeros 100 audit coincidence", kExitSuccess},
      {"--cache '' --n-zeros 100 --perturb 0.01 audit coincidence", kExitAuditFailure},
      {"--cache '' --tol 1e-20 zeros --t-max 20", kExitNonConvergence},
  };
  for (const auto& e : expected) {
    const int got = cli(dir, e.args).code;
    c.expect(got == e.code, fmt::format("`{}` exited {} (want {})", e.args, got, e.code));
  }
  fs::remove_all(dir);
  return c.outcome(fmt::format("audit all byte-identical ({} bytes, exit {}); corruption exit 3; exit codes "
                               "0/1/2/3/4 as specified",
                               first.out.size(), first.code));
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, zero_finder},   {2, xi_correctness}, {3, norm_identity}, {4, coupling_spectrum_check},
      {5, hadamard_product}, {6, coincidence},  {7, carlson},       {8, exponential_fit},
      {9, determinism},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("criterion {}: {} ({:.2f} s) {}\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail);
    if (id == 6) {
      try {
        fmt::print("criterion 6 (info): {}\n", coincidence_magnitude_note());
      } catch (const std::exception& e) {
        fmt::print("criterion 6 (info): exception: {}\n", e.what());
      }
    }
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
