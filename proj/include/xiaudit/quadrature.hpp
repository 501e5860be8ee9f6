#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace xiaudit {

struct QuadratureResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
  /// Sum of |f| weights; scale against which oscillatory integrands are judged.
  double abs_value = 0.0;
};

using RealIntegrand = std::function<double(double)>;

struct FiniteOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-13;
  /// Number of equal pieces the interval is split into before adaptation starts.
  std::size_t initial_pieces = 1;
  std::size_t max_pieces = 50000;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
///
/// Bisects the piece with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|). Pieces are kept in a
/// fixed order so the final summation is deterministic. Throws
/// NonConvergenceError when max_pieces is exhausted.
QuadratureResult integrate_finite(const RealIntegrand& f, double a, double b,
                                  const FiniteOptions& options = {});

struct SemiInfiniteOptions {
  /// Coarsest trapezoid step in the transformed variable.
  double initial_step = 0.5;
  int max_levels = 12;
  /// Tail terms below tail_cutoff * (largest term) are dropped.
  double tail_cutoff = 1e-20;
};

/// Double-exponential (exp-sinh) quadrature of f over (0, inf).
///
/// Uses x = exp(pi/2 * sinh(tau)) and the trapezoid rule in tau, halving
/// the step until two successive levels agree to `tol` relative. The
/// reported err_estimate is the last level-to-level change.
///
/// Throws DivergenceError when a tail of the transformed sum fails to decay
/// (or f stops being finite) before the representable range of x is
/// exhausted, and NonConvergenceError when max_levels is reached.
QuadratureResult integrate_semiinfinite(const RealIntegrand& f, double tol,
                                        const SemiInfiniteOptions& options = {});

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b], nodes ascending.
GaussLegendreRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

}  // namespace xiaudit
