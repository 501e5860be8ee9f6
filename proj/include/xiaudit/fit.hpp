#pragma once

#include <span>
#include <vector>

namespace xiaudit {

/// y ~ intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
  /// sqrt(sum w r^2 / sum w).
  double rms_residual = 0.0;
  /// Standard error of the slope from the residual scatter; 0 for exact fits.
  double slope_stderr = 0.0;
};

/// Weighted least squares; unit weights when `weights` is empty. Throws
/// SingularFitError unless at least two distinct abscissae carry weight.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys,
                 std::span<const double> weights = {});

}  // namespace xiaudit
