#include "xiaudit/fit.hpp"

#include <algorithm>
#include <cmath>

#include "xiaudit/errors.hpp"

namespace xiaudit {

LineFit fit_line(std::span<const double> xs, std::span<const double> ys,
                 std::span<const double> weights) {
  const std::size_t n = xs.size();
  if (ys.size() != n || (!weights.empty() && weights.size() != n)) {
    throw DomainError("fit_line: sample arrays differ in length");
  }
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w(i);
    sx += w(i) * xs[i];
    sy += w(i) * ys[i];
  }
  if (n < 2 || !(sw > 0.0)) throw SingularFitError("fit_line: fewer than two samples");
  const double mx = sx / sw;
  const double my = sy / sw;
  // Centered sums keep the normal equations well conditioned.
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    sxx += w(i) * dx * dx;
    sxy += w(i) * dx * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw SingularFitError("fit_line: all abscissae coincide");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
    ss += w(i) * r * r;
  }
  fit.rms_residual = std::sqrt(ss / sw);
  if (n > 2) {
    fit.slope_stderr = std::sqrt(ss / (static_cast<double>(n - 2) * sxx));
  }
  return fit;
}

}  // namespace xiaudit
