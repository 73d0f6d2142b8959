#pragma once

#include <cmath>
#include <span>

namespace gasket {

/// Neumaier-compensated sum; error bounded by a few ulps of the result
/// independent of the number of terms.
[[nodiscard]] inline double compensated_sum(std::span<const double> v) {
  double sum = 0.0, carry = 0.0;
  for (double x : v) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace gasket
