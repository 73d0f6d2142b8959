#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gasket/geometry.hpp"
#include "gasket/spectral.hpp"

namespace gasket {

/// Truncated heat kernel p_t(x,y) = Φ_0(x)Φ_0(y) + Σ_{j=1}^{J} e^{-λ_j t} Φ_j(x)Φ_j(y).
/// Holds a reference to the basis, which must outlive it.
class HeatKernel {
 public:
  HeatKernel(const SpectralBasis& basis, int J);

  [[nodiscard]] int truncation() const noexcept { return J_; }
  [[nodiscard]] const SpectralBasis& basis() const noexcept { return *basis_; }

  /// Throws ParameterError unless t > 0.
  [[nodiscard]] double operator()(double t, VertexId x, VertexId y) const;
  /// p_t(x,y) minus the constant mode, summed directly so that it stays
  /// accurate when p_t is close to its limit.
  [[nodiscard]] double deviation(double t, VertexId x, VertexId y) const;
  [[nodiscard]] Matrix matrix(double t) const;
  /// matrix(t) minus the constant mode, without cancellation.
  [[nodiscard]] Matrix deviation_matrix(double t) const;
  [[nodiscard]] Vector diagonal(double t) const;
  /// Σ_x p_t(x,x) M(x) = Σ_{j=0}^{J} e^{-λ_j t}.
  [[nodiscard]] double trace(double t) const;
  /// C with |p_t(x,y) - Φ_0²| <= C e^{-λ_1 t} for all x, y and t >= 1:
  /// max_x Σ_j e^{-(λ_j - λ_1)} Φ_j(x)².
  [[nodiscard]] double long_time_constant() const;

 private:
  const SpectralBasis* basis_;
  int J_;
};

struct HeatDiagonalFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Sandwich c t^{-d_h/d_w} <= p_t(x,x) <= C t^{-d_h/d_w} over all vertices
  /// and sampled times.
  double lower_constant = 0.0;
  double upper_constant = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
};

/// Log-log fit of the mass-averaged diagonal Σ_x p_t(x,x)M(x) over
/// `samples` log-spaced times in [t_lo, t_hi].
[[nodiscard]] HeatDiagonalFit fit_heat_diagonal(const HeatKernel& h, double t_lo, double t_hi, int samples = 33);

/// Truncated Riesz kernel G_s(x,y) = Σ_{j=1}^{J} λ_j^{-s} Φ_j(x)Φ_j(y).
class RieszKernel {
 public:
  /// s must be positive; the field-level admissibility is enforced where
  /// fields are built.
  RieszKernel(const SpectralBasis& basis, double s, int J);

  [[nodiscard]] double order() const noexcept { return s_; }
  [[nodiscard]] int truncation() const noexcept { return J_; }
  [[nodiscard]] const SpectralBasis& basis() const noexcept { return *basis_; }

  [[nodiscard]] double operator()(VertexId x, VertexId y) const;
  [[nodiscard]] Matrix dense() const;
  /// Σ_y G_s(x,y) M(y).
  [[nodiscard]] double row_integral(VertexId x) const;
  /// Σ_z (G(x,z) - G(y,z))² M(z) = Σ_j λ_j^{-2s} (Φ_j(x) - Φ_j(y))².
  [[nodiscard]] double increment_energy(VertexId x, VertexId y) const;

 private:
  const SpectralBasis* basis_;
  double s_;
  int J_;
  Vector weights_;
};

/// 𝒢_s f = Σ_j λ_j^{-s} (Φ_jᵀ M f) Φ_j. With zero_mean the caller asserts
/// f already integrates to zero (ParameterError otherwise); without it f is
/// projected onto L²_0 first.
[[nodiscard]] Vector apply_riesz(const RieszKernel& k, const Eigen::Ref<const Vector>& f, bool zero_mean);

/// (-Δ)^s f = Σ_{j=1}^{J} λ_j^{s} (Φ_jᵀ M f) Φ_j on the L²_0 projection of f.
/// J < 0 uses all modes.
[[nodiscard]] Vector apply_fractional_laplacian(const SpectralBasis& b, double s, const Eigen::Ref<const Vector>& f,
                                                int J = -1);

/// Independent evaluation of G_s(x,y) from the heat-kernel time integral
/// (1/Γ(s)) ∫_0^∞ t^{s-1} (p_t(x,y) - Φ_0²) dt. Adaptive Gauss-Kronrod on
/// log-spaced panels up to T = 20/λ_1; the remainder uses the incomplete
/// gamma tail Σ_j λ_j^{-s} Q(s, λ_j T) Φ_j(x)Φ_j(y).
[[nodiscard]] double riesz_by_time_integral(const SpectralBasis& b, double s, VertexId x, VertexId y, int J);

using VertexPair = std::pair<VertexId, VertexId>;

struct PairSampling {
  double d_min = 1.0 / 32.0;
  double d_max = 0.25;
  /// Levels up to this use every pair; deeper levels draw `max_pairs`.
  int exhaustive_level = 4;
  std::size_t max_pairs = 100000;
  std::uint64_t seed = 20240601;
};

/// Distinct pairs x < y with d_min <= d(x,y) <= d_max. Deterministic given
/// the sampling seed.
[[nodiscard]] std::vector<VertexPair> sample_pairs(const LevelGraph& g, const PairSampling& opts);

enum class KernelRegime { Power, Logarithmic, Bounded };

[[nodiscard]] KernelRegime regime_for_order(double s);
[[nodiscard]] std::string to_string(KernelRegime r);

struct KernelEstimateReport {
  double s = 0.0;
  KernelRegime regime = KernelRegime::Power;
  /// Decay exponent of the binned sup envelope of |G_s|: -slope against
  /// log d (power, bounded) or slope against log|ln d| (logarithmic).
  double fitted_exponent = 0.0;
  /// d_h - s d_w, 1 or 0 depending on regime.
  double bound_exponent = 0.0;
  double constant = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;
  double tail_variance = 0.0;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  bool within_bound = false;
};

[[nodiscard]] KernelEstimateReport estimate_bound_fit(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                                                      const PairSampling& opts = {});

struct IncrementReport {
  double s = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// 2 s d_w - d_h.
  double expected_slope = 0.0;
  /// expected_slope - 0.2.
  double threshold = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double tail_variance = 0.0;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  bool pass = false;
};

/// Regresses log Σ_z (G_s(x,z) - G_s(y,z))² M(z) on log d(x,y). Requires s
/// in the admissible interval.
[[nodiscard]] IncrementReport increment_l2_check(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                                                 const PairSampling& opts = {});

}  // namespace gasket
