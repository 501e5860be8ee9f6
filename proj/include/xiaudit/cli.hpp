#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xiaudit/plot.hpp"
#include "xiaudit/report.hpp"
#include "xiaudit/zeros.hpp"

namespace xiaudit {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitAuditFailure = 1,
  kExitUsage = 2,
  kExitCacheCorruption = 3,
  kExitNonConvergence = 4,
};

struct RunConfig {
  double t_max = 50.0;
  double tol = 1e-8;
  std::size_t n_zeros = 800;
  double perturb = 0.0;
  int m = 1;
  /// 0 = every hardware thread.
  unsigned threads = 0;
  std::string format = "json";
  std::string out;  // empty: stdout
  std::string cache = "xiaudit-zeros.cache";
};

enum class AuditKind { eq5, eq9, hadamard, coincidence, carlson, all };

/// Zeros up to cfg.t_max, from the cache when it covers the request.
std::vector<CriticalZero> zeros_up_to(const RunConfig& cfg, double t_max);

/// The first `count` zeros, from the cache when it holds enough of them.
std::vector<CriticalZero> zeros_by_count(const RunConfig& cfg, std::size_t count);

/// Reports for one audit, in a fixed order. `all` begins with an aggregate
/// report whose verdict is the worst of the rest.
std::vector<AuditReport> run_audit(AuditKind kind, const RunConfig& cfg);

enum class PlotKind { xi_critical, eq5_ratio, product_convergence, residuals };

/// Throws DomainError for an empty or reversed range.
PlotData plot_data(PlotKind kind, const RunConfig& cfg, double lo, double hi);

/// Parses "a:b".
std::pair<double, double> parse_range(const std::string& text);

std::string reports_to_json(const std::vector<AuditReport>& reports);
std::string reports_to_csv(const std::vector<AuditReport>& reports);

/// Human-readable summary; ANSI colour only when `color` is set.
std::string render_reports(const std::vector<AuditReport>& reports, bool color);

/// Entry point shared by the binary and the tests. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xiaudit
