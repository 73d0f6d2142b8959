#pragma once

#include <string>

namespace gasket {

/// Hausdorff dimension of the gasket, ln 3 / ln 2.
inline constexpr double kHausdorffDim = 1.5849625007211562;
/// Walk dimension of the gasket diffusion, ln 5 / ln 2.
inline constexpr double kWalkDim = 2.3219280948873622;
/// Spectral exponent d_h / d_w = ln 3 / ln 5 governing eigenvalue counting.
inline constexpr double kSpectralExponent = kHausdorffDim / kWalkDim;

/// Energy renormalization factor per level.
inline constexpr double kEnergyRatio = 5.0 / 3.0;

/// Open interval of fractional orders s for which the field is
/// Hölder continuous: (d_h / 2d_w, 1 - d_h / 2d_w).
struct OpenInterval {
  double lo;
  double hi;

  [[nodiscard]] constexpr bool contains(double v) const { return v > lo && v < hi; }
};

/// "(lo, hi)" with five decimals, rounded inward so every printed interior
/// value is admissible.
[[nodiscard]] std::string describe(const OpenInterval& iv);

inline constexpr OpenInterval kAdmissibleOrder{kSpectralExponent / 2.0, 1.0 - kSpectralExponent / 2.0};
inline constexpr OpenInterval kAdmissibleHurst{0.0, kWalkDim - kHausdorffDim};

/// H = s d_w - d_h / 2.
[[nodiscard]] constexpr double hurst_from_order(double s) { return s * kWalkDim - kHausdorffDim / 2.0; }

/// s = (H + d_h / 2) / d_w.
[[nodiscard]] constexpr double order_from_hurst(double hurst) { return (hurst + kHausdorffDim / 2.0) / kWalkDim; }

/// Throws ParameterError naming the admissible interval when s is outside it.
void require_admissible_order(double s);
void require_admissible_hurst(double hurst);

}  // namespace gasket
