#include "xiaudit/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "xiaudit/errors.hpp"

namespace xiaudit {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae; odd indices are the embedded Gauss points.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double err = 0.0;
  double abs = 0.0;
};

Piece gauss_kronrod15(const RealIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  Piece p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.abs = abs_sum * std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  if (p.abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * p.abs, err);
  }
  p.err = err;
  return p;
}

}  // namespace

QuadratureResult integrate_finite(const RealIntegrand& f, double a, double b,
                                  const FiniteOptions& options) {
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw DomainError("integrate_finite: interval endpoints must be finite");
  }
  QuadratureResult result;
  if (a == b) {
    result.evaluations = 1;
    return result;
  }
  const std::size_t n0 = std::max<std::size_t>(1, options.initial_pieces);
  std::vector<Piece> pieces;
  pieces.reserve(n0 * 2);
  const double width = (b - a) / static_cast<double>(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = (i + 1 == n0) ? b : a + width * static_cast<double>(i + 1);
    pieces.push_back(gauss_kronrod15(f, lo, hi));
    if (!std::isfinite(pieces.back().value)) {
      throw NonConvergenceError(fmt::format("integrate_finite: estimate not finite on [{:.6g}, {:.6g}]", lo, hi));
    }
  }
  std::size_t evaluations = 15 * n0;

  // Max-heap on error; ties broken by lower index for a reproducible order.
  auto worse = [&pieces](std::size_t lhs, std::size_t rhs) {
    if (pieces[lhs].err != pieces[rhs].err) return pieces[lhs].err < pieces[rhs].err;
    return lhs > rhs;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < pieces.size(); ++i) heap.push(i);

  auto totals = [&pieces]() {
    double value = 0.0, err = 0.0, abs = 0.0;
    for (const auto& p : pieces) {
      value += p.value;
      err += p.err;
      abs += p.abs;
    }
    return std::array<double, 3>{value, err, abs};
  };

  auto [value, err, abs] = totals();
  std::size_t since_resum = 0;
  while (true) {
    const double target = std::max(options.abs_tol, options.rel_tol * std::abs(value));
    if (err <= target || err <= 50.0 * kEps * abs) {
      std::tie(value, err, abs) = [&] {
        const auto t = totals();
        return std::tuple{t[0], t[1], t[2]};
      }();
      const double exact_target = std::max(options.abs_tol, options.rel_tol * std::abs(value));
      if (err <= exact_target || err <= 50.0 * kEps * abs) break;
    }
    if (pieces.size() >= options.max_pieces) {
      throw NonConvergenceError(
          fmt::format("integrate_finite: subdivision budget exhausted (err {:.3g})", err));
    }
    const std::size_t worst = heap.top();
    heap.pop();
    const Piece old = pieces[worst];
    const double mid = 0.5 * (old.a + old.b);
    const Piece left = gauss_kronrod15(f, old.a, mid);
    const Piece right = gauss_kronrod15(f, mid, old.b);
    evaluations += 30;
    if (!std::isfinite(left.value + right.value) || !std::isfinite(left.err + right.err)) {
      throw NonConvergenceError(
          fmt::format("integrate_finite: estimate not finite near x = {:.6g}", mid));
    }
    value += left.value + right.value - old.value;
    err += left.err + right.err - old.err;
    abs += left.abs + right.abs - old.abs;
    pieces[worst] = left;
    pieces.push_back(right);
    heap.push(worst);
    heap.push(pieces.size() - 1);
    if (++since_resum == 64) {
      since_resum = 0;
      const auto t = totals();
      value = t[0];
      err = t[1];
      abs = t[2];
    }
  }

  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
  result = QuadratureResult{};
  for (const auto& p : pieces) {
    result.value += p.value;
    result.err_estimate += p.err;
    result.abs_value += p.abs;
  }
  result.evaluations = evaluations;
  return result;
}

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
// exp(+-700) stays inside the double range with headroom for the weight.
constexpr double kMaxLogX = 700.0;

struct ExpSinhNode {
  double x;
  double weight;
};

ExpSinhNode exp_sinh_node(double tau) {
  const double log_x = kHalfPi * std::sinh(tau);
  const double x = std::exp(log_x);
  return {x, kHalfPi * std::cosh(tau) * x};
}

}  // namespace

QuadratureResult integrate_semiinfinite(const RealIntegrand& f, double tol,
                                        const SemiInfiniteOptions& options) {
  if (!(tol > 0.0)) throw DomainError("integrate_semiinfinite: tol must be positive");
  const double tau_limit = std::asinh(kMaxLogX / kHalfPi);
  const double h0 = options.initial_step;
  std::size_t evaluations = 0;

  auto term_at = [&](double tau) {
    const auto node = exp_sinh_node(tau);
    const double fx = f(node.x);
    ++evaluations;
    const double t = node.weight * fx;
    if (!std::isfinite(t)) {
      throw DivergenceError(
          fmt::format("integrate_semiinfinite: integrand not finite at x = {:.6g}", node.x));
    }
    return t;
  };

  // Level 0: walk outwards from tau = 0 until both tails have decayed.
  double sum = term_at(0.0);
  double abs_sum = std::abs(sum);
  double max_term = std::abs(sum);
  std::array<double, 2> tau_end{};
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? -1.0 : 1.0;
    int small_run = 0;
    int k = 1;
    for (;; ++k) {
      const double tau = dir * h0 * k;
      if (std::abs(tau) > tau_limit) {
        // One negligible term at the edge of the representable range is
        // accepted; the next would lie past it.
        if (small_run >= 1) {
          --k;
          break;
        }
        throw DivergenceError(
            "integrate_semiinfinite: partial sums grow without bound (tail does not decay "
            "within the representable range)");
      }
      const double t = term_at(tau);
      sum += t;
      abs_sum += std::abs(t);
      max_term = std::max(max_term, std::abs(t));
      small_run = (std::abs(t) <= options.tail_cutoff * max_term) ? small_run + 1 : 0;
      if (small_run >= 2) break;
    }
    tau_end[side] = dir * h0 * k;
  }

  double estimate = h0 * sum;
  double h = h0;
  QuadratureResult result;
  for (int level = 1; level <= options.max_levels; ++level) {
    h *= 0.5;
    double added = 0.0;
    // Odd multiples of h inside the retained tau window.
    const long k_lo = static_cast<long>(std::floor(tau_end[0] / h));
    const long k_hi = static_cast<long>(std::ceil(tau_end[1] / h));
    for (long k = k_lo; k <= k_hi; ++k) {
      if ((k & 1L) == 0) continue;
      const double t = term_at(static_cast<double>(k) * h);
      added += t;
      abs_sum += std::abs(t);
    }
    sum += added;
    const double refined = h * sum;
    const double change = std::abs(refined - estimate);
    estimate = refined;
    const bool converged = change <= tol * std::abs(refined);
    const bool at_roundoff = change <= 64.0 * kEps * h * abs_sum;
    if (level >= 3 && (converged || at_roundoff)) {
      result.value = refined;
      result.err_estimate = change;
      result.evaluations = evaluations;
      result.abs_value = h * abs_sum;
      return result;
    }
  }
  throw NonConvergenceError("integrate_semiinfinite: level budget exhausted");
}

}  // namespace xiaudit

namespace xiaudit {

GaussLegendreRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like guess, largest root first.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.nodes[i] = mid - half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace xiaudit
