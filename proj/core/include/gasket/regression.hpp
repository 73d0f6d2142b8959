#pragma once

#include <span>

namespace gasket {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Root-mean-square residual.
  double residual = 0.0;
  int points = 0;
};

/// Ordinary least squares y ≈ slope·x + intercept. Throws ParameterError
/// with fewer than two points or when all x coincide.
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace gasket
