#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "xiaudit/report.hpp"
#include "xiaudit/specfun.hpp"

namespace xiaudit {

/// Ordinate of the n-th zero 1/2 + i*gamma of xi on the critical line.
/// (t_lo, t_hi) is the final refinement bracket; gamma is its midpoint.
struct CriticalZero {
  int index = 0;
  double gamma = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double abs_err = 0.0;

  friend bool operator==(const CriticalZero&, const CriticalZero&) = default;
};

struct ScanOptions {
  /// Coarse sampling step; never larger than 0.25.
  double step = 0.25;
  /// Finest step used when a same-sign dip is rescanned.
  double min_step = 1.0 / 512.0;
  unsigned threads = 1;
  EulerMaclaurinPlan plan{};
};

struct ScanResult {
  std::vector<CriticalZero> zeros;
  /// Step-resolution warnings: places where a local rescan found sign
  /// changes the coarse grid had skipped.
  std::vector<std::string> warnings;
};

/// All sign changes of Xi on (0, t_max], each refined to abs_err <= tol.
ScanResult scan_zeros_detailed(double t_max, double tol, const ScanOptions& options = {});
std::vector<CriticalZero> scan_zeros(double t_max, double tol, const ScanOptions& options = {});

/// The first `count` zeros, extending the scan range until enough are found.
std::vector<CriticalZero> first_zeros(std::size_t count, double tol, const ScanOptions& options = {});

/// Safeguarded Illinois iteration on Xi inside (t_lo, t_hi) until the
/// bracket is narrower than tol. Throws InvalidBracketError when Xi has
/// the same sign at both ends. The returned index is 0.
CriticalZero refine_zero(double t_lo, double t_hi, double tol, const EulerMaclaurinPlan& plan = {});

/// (T / 2pi) log(T / (2 pi e)) + 7/8.
double estimated_zero_count(double t);

/// PASS when the found count is within 1 of the rounded estimate.
AuditReport count_check(double t_max, std::size_t found);

// ---------------------------------------------------------------------------
// zeros.csv cache

inline constexpr std::string_view kCacheVersion = "v1";

struct ZeroCache {
  double t_max = 0.0;
  double tol = 0.0;
  std::vector<CriticalZero> zeros;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Renders the file: header line, then `n,gamma,abs_err` rows.
std::string format_cache(const ZeroCache& cache);
/// Parses and verifies a cache file body. Throws CacheCorruptionError on
/// a malformed header, a malformed row or a checksum mismatch.
ZeroCache parse_cache(std::string_view text);

/// Writes to a temporary sibling and renames it over `path`.
void write_cache(const std::filesystem::path& path, const ZeroCache& cache);
ZeroCache read_cache(const std::filesystem::path& path);

/// A cache is reusable for (t_max, tol) when tol matches exactly and it
/// was scanned at least as far as t_max.
bool cache_covers(const ZeroCache& cache, double t_max, double tol);

/// The `n,gamma,abs_err` row for one zero, without newline.
std::string format_zero_row(const CriticalZero& zero);

}  // namespace xiaudit
