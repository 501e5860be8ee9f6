#include "xiaudit/zeros.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <system_error>

#include "xiaudit/errors.hpp"
#include "xiaudit/parallel.hpp"

namespace xiaudit {
namespace {

constexpr double kPi = std::numbers::pi;

bool positive(double v) { return !std::signbit(v); }

struct Bracket {
  double lo;
  double hi;
};

struct Sample {
  double t;
  double value;
};

// Looks for a skipped pair of sign changes around a same-sign dip by
// resampling [lo, hi] at successively finer steps.
void rescan_dip(const Sample& lo, const Sample& hi, double step, const ScanOptions& options,
                std::vector<Bracket>& brackets, std::vector<std::string>& warnings, int depth) {
  const double fine = step / 4.0;
  if (fine < options.min_step || depth > 8) return;
  const auto pieces = static_cast<std::size_t>(std::ceil((hi.t - lo.t) / fine));
  std::vector<Sample> fine_samples;
  fine_samples.reserve(pieces + 1);
  fine_samples.push_back(lo);
  for (std::size_t k = 1; k < pieces; ++k) {
    const double t = lo.t + (hi.t - lo.t) * static_cast<double>(k) / static_cast<double>(pieces);
    fine_samples.push_back({t, xi_critical_scaled(t, options.plan)});
  }
  fine_samples.push_back(hi);
  bool found = false;
  for (std::size_t k = 0; k + 1 < fine_samples.size(); ++k) {
    if (positive(fine_samples[k].value) != positive(fine_samples[k + 1].value)) {
      brackets.push_back({fine_samples[k].t, fine_samples[k + 1].t});
      found = true;
    }
  }
  if (found) {
    warnings.push_back(fmt::format(
        "step-resolution: two sign changes within one step near t = {:.6f}; rescanned at step {:g}",
        0.5 * (lo.t + hi.t), fine));
    return;
  }
  for (std::size_t k = 1; k + 1 < fine_samples.size(); ++k) {
    const double m = std::abs(fine_samples[k].value);
    if (m < std::abs(fine_samples[k - 1].value) && m < std::abs(fine_samples[k + 1].value)) {
      rescan_dip(fine_samples[k - 1], fine_samples[k + 1], fine, options, brackets, warnings,
                 depth + 1);
    }
  }
}

// Brackets for the events attributed to [t_from, t_to). The grid is
// t_k = k * step in absolute terms; a sign change between t_k and t_{k+1}
// and a dip centred on t_k both belong to t_k. Adjacent ranges therefore
// partition the events and see identical samples, so any segmentation of
// the axis yields the same brackets bit for bit.
std::vector<Bracket> bracket_range(double t_from, double t_to, const ScanOptions& options,
                                   std::vector<std::string>& warnings) {
  const double step = std::min(options.step, 0.25);
  const auto k_first = static_cast<long long>(std::ceil(t_from / step));
  const auto k_last = static_cast<long long>(std::ceil(t_to / step)) - 1;
  std::vector<Bracket> brackets;
  if (k_last < k_first) return brackets;
  // One padding sample on each side for the dip test.
  const auto count = static_cast<std::size_t>(k_last - k_first + 3);
  const auto samples = parallel_map<Sample>(count, options.threads, [&](std::size_t i) {
    const double t = static_cast<double>(k_first - 1 + static_cast<long long>(i)) * step;
    return Sample{t, xi_critical_scaled(t, options.plan)};
  });
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    const auto& c = samples[i + 1];
    if (positive(b.value) != positive(c.value)) {
      brackets.push_back({b.t, c.t});
      continue;
    }
    if (positive(a.value) != positive(b.value)) continue;
    if (std::abs(b.value) < std::abs(a.value) && std::abs(b.value) < std::abs(c.value)) {
      rescan_dip(a, c, step, options, brackets, warnings, 0);
    }
  }
  std::sort(brackets.begin(), brackets.end(),
            [](const Bracket& l, const Bracket& r) { return l.lo < r.lo; });
  return brackets;
}

std::vector<CriticalZero> refine_all(const std::vector<Bracket>& brackets, double tol,
                                     const ScanOptions& options) {
  auto zeros = parallel_map<CriticalZero>(brackets.size(), options.threads, [&](std::size_t i) {
    return refine_zero(brackets[i].lo, brackets[i].hi, tol, options.plan);
  });
  std::sort(zeros.begin(), zeros.end(),
            [](const CriticalZero& l, const CriticalZero& r) { return l.gamma < r.gamma; });
  return zeros;
}

void validate_scan_args(double t_max, double tol) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("scan_zeros: t_max must be > 0");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("scan_zeros: tol must be > 0");
}

}  // namespace

CriticalZero refine_zero(double t_lo, double t_hi, double tol, const EulerMaclaurinPlan& plan) {
  if (!(tol > 0.0)) throw DomainError("refine_zero: tol must be > 0");
  if (!(t_lo < t_hi)) throw InvalidBracketError("refine_zero: bracket must satisfy t_lo < t_hi");
  double lo = t_lo;
  double hi = t_hi;
  double f_lo = xi_critical_scaled(lo, plan);
  double f_hi = xi_critical_scaled(hi, plan);
  if (f_lo == 0.0 || f_hi == 0.0) {
    const double root = f_lo == 0.0 ? lo : hi;
    const double half = std::min(0.25 * tol, 0.5 * (hi - lo));
    return {0, root, root - half, root + half, half};
  }
  if (positive(f_lo) == positive(f_hi)) {
    throw InvalidBracketError(
        fmt::format("refine_zero: Xi has the same sign at t = {} and t = {}", t_lo, t_hi));
  }
  int stale_side = 0;  // -1: lo kept last time, +1: hi kept last time
  int slow_steps = 0;
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double width = hi - lo;
    double x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi) || slow_steps >= 2) {
      x = 0.5 * (lo + hi);
      slow_steps = 0;
    }
    if (x <= lo || x >= hi) break;  // bracket is down to adjacent doubles
    const double fx = xi_critical_scaled(x, plan);
    if (fx == 0.0) {
      const double half = std::min(0.25 * tol, 0.5 * std::min(x - lo, hi - x));
      return {0, x, x - half, x + half, half};
    }
    if (positive(fx) == positive(f_hi)) {
      hi = x;
      f_hi = fx;
      if (stale_side == -1) f_lo *= 0.5;
      stale_side = -1;
    } else {
      lo = x;
      f_lo = fx;
      if (stale_side == 1) f_hi *= 0.5;
      stale_side = 1;
    }
    slow_steps = (hi - lo > 0.5 * width) ? slow_steps + 1 : 0;
  }
  if (hi - lo > tol) {
    throw NonConvergenceError(fmt::format(
        "refine_zero: bracket [{:.17g}, {:.17g}] cannot be narrowed to width {:.3g}", lo, hi, tol));
  }
  const double mid = 0.5 * (lo + hi);
  return {0, mid, lo, hi, 0.5 * (hi - lo)};
}

ScanResult scan_zeros_detailed(double t_max, double tol, const ScanOptions& options) {
  validate_scan_args(t_max, tol);
  ScanResult result;
  const auto brackets = bracket_range(0.0, t_max, options, result.warnings);
  result.zeros = refine_all(brackets, tol, options);
  // The last bracket may reach one step past t_max.
  std::erase_if(result.zeros, [t_max](const CriticalZero& z) { return z.gamma > t_max; });
  for (std::size_t i = 0; i < result.zeros.size(); ++i) {
    result.zeros[i].index = static_cast<int>(i + 1);
  }
  return result;
}

std::vector<CriticalZero> scan_zeros(double t_max, double tol, const ScanOptions& options) {
  return scan_zeros_detailed(t_max, tol, options).zeros;
}

double estimated_zero_count(double t) {
  if (t <= 0.0) return 0.0;
  const double two_pi = 2.0 * kPi;
  return t / two_pi * std::log(t / (two_pi * std::numbers::e)) + 0.875;
}

std::vector<CriticalZero> first_zeros(std::size_t count, double tol, const ScanOptions& options) {
  if (!(tol > 0.0)) throw DomainError("first_zeros: tol must be > 0");
  std::vector<CriticalZero> zeros;
  if (count == 0) return zeros;
  // Smallest T whose estimated count exceeds the request by a small margin.
  const double wanted = static_cast<double>(count) + 1.5;
  double t_hi = 20.0;
  while (estimated_zero_count(t_hi) < wanted) t_hi *= 1.5;
  double t_lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    (estimated_zero_count(mid) < wanted ? t_lo : t_hi) = mid;
  }
  double scanned = 0.0;
  double target = std::max(15.0, t_hi);
  std::vector<std::string> warnings;
  while (zeros.size() < count) {
    const auto brackets = bracket_range(scanned, target, options, warnings);
    auto more = refine_all(brackets, tol, options);
    zeros.insert(zeros.end(), more.begin(), more.end());
    scanned = target;
    target *= 1.1;
  }
  zeros.resize(count);
  for (std::size_t i = 0; i < zeros.size(); ++i) zeros[i].index = static_cast<int>(i + 1);
  return zeros;
}

AuditReport count_check(double t_max, std::size_t found) {
  const double estimate = estimated_zero_count(t_max);
  const double rounded = std::max(0.0, std::round(estimate));
  const double diff = static_cast<double>(found) - rounded;
  AuditReport r;
  r.name = "zero_count";
  r.params["t_max"] = t_max;
  r.params["found"] = static_cast<std::int64_t>(found);
  r.params["estimate_unrounded"] = estimate;
  r.measured = {static_cast<double>(found)};
  r.reference = {rounded};
  r.ratio_or_residual = diff;
  r.tolerance = 1.0;
  r.verdict = std::abs(diff) <= 1.0 ? Verdict::pass : Verdict::fail;
  r.provenance = "zero-counting estimate (T/2pi) log(T/2pi e) + 7/8";
  return r;
}

// ---------------------------------------------------------------------------
// cache

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string format_zero_row(const CriticalZero& zero) {
  return fmt::format("{},{:.15g},{:.6e}", zero.index, zero.gamma, zero.abs_err);
}

std::string format_cache(const ZeroCache& cache) {
  std::string body;
  for (const auto& z : cache.zeros) {
    body += format_zero_row(z);
    body += '\n';
  }
  return fmt::format("# xi-zeros {} tol={} tmax={} checksum={:016x}\n", kCacheVersion, cache.tol,
                     cache.t_max, fnv1a64(body)) +
         body;
}

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw CacheCorruptionError("zeros cache: malformed " + std::string(what) + " '" +
                               std::string(text) + "'");
  }
  return v;
}

std::string_view field_after(std::string_view header, std::string_view key) {
  const auto pos = header.find(key);
  if (pos == std::string_view::npos) {
    throw CacheCorruptionError("zeros cache: header lacks '" + std::string(key) + "'");
  }
  auto rest = header.substr(pos + key.size());
  return rest.substr(0, rest.find(' '));
}

}  // namespace

ZeroCache parse_cache(std::string_view text) {
  const auto eol = text.find('\n');
  if (eol == std::string_view::npos) throw CacheCorruptionError("zeros cache: missing header");
  const auto header = text.substr(0, eol);
  const std::string prefix = fmt::format("# xi-zeros {} ", kCacheVersion);
  if (header.substr(0, prefix.size()) != prefix) {
    throw CacheCorruptionError("zeros cache: unrecognized header or version");
  }
  ZeroCache cache;
  cache.tol = parse_double(field_after(header, "tol="), "tol");
  cache.t_max = parse_double(field_after(header, "tmax="), "tmax");
  const auto checksum_text = field_after(header, "checksum=");
  std::uint64_t checksum = 0;
  {
    const auto* end = checksum_text.data() + checksum_text.size();
    const auto [ptr, ec] = std::from_chars(checksum_text.data(), end, checksum, 16);
    if (ec != std::errc{} || ptr != end) throw CacheCorruptionError("zeros cache: bad checksum field");
  }
  const auto body = text.substr(eol + 1);
  if (fnv1a64(body) != checksum) throw CacheCorruptionError("zeros cache: checksum mismatch");

  std::size_t pos = 0;
  while (pos < body.size()) {
    auto next = body.find('\n', pos);
    if (next == std::string_view::npos) throw CacheCorruptionError("zeros cache: truncated row");
    const auto line = body.substr(pos, next - pos);
    pos = next + 1;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
      throw CacheCorruptionError("zeros cache: malformed row");
    }
    CriticalZero z;
    z.index = static_cast<int>(parse_double(line.substr(0, c1), "index"));
    z.gamma = parse_double(line.substr(c1 + 1, c2 - c1 - 1), "gamma");
    z.abs_err = parse_double(line.substr(c2 + 1), "abs_err");
    const double half = z.abs_err > 0.0 ? z.abs_err : std::abs(z.gamma) * 1e-16;
    z.t_lo = z.gamma - half;
    z.t_hi = z.gamma + half;
    if (z.index != static_cast<int>(cache.zeros.size()) + 1) {
      throw CacheCorruptionError("zeros cache: indices are not contiguous");
    }
    cache.zeros.push_back(z);
  }
  return cache;
}

void write_cache(const std::filesystem::path& path, const ZeroCache& cache) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << format_cache(cache);
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ZeroCache read_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cache(ss.str());
}

bool cache_covers(const ZeroCache& cache, double t_max, double tol) {
  return cache.tol == tol && cache.t_max >= t_max;
}

}  // namespace xiaudit
