#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gasket/geometry.hpp"
#include "gasket/kernels.hpp"
#include "gasket/spectral.hpp"

namespace gasket {

/// Name of the Gaussian generator recorded in output metadata.
inline constexpr const char* kGaussianGenerator = "mt19937_64/boost-ziggurat-normal";

/// J standard normal draws from a stream seeded by `seed`, consumed in mode
/// order: the first k draws do not depend on J.
[[nodiscard]] Vector gaussian_coefficients(std::uint64_t seed, int J);

/// Per-replication seeds derived from a base seed (SplitMix64 sequence).
[[nodiscard]] std::vector<std::uint64_t> replication_seeds(std::uint64_t base, std::size_t count);

/// One realization X(x) = Σ_{j=1}^{J} λ_j^{-s} N_j Φ_j(x).
struct FieldSample {
  int level = 0;
  double s = 0.0;
  double hurst = 0.0;
  int modes = 0;
  std::uint64_t seed = 0;
  Vector coefficients;
  Vector values;
};

/// Throws ParameterError for s outside the admissible interval and
/// BoundsError for J > count.
[[nodiscard]] FieldSample sample_field(const SpectralBasis& b, double s, std::uint64_t seed, int J);

/// X(x) - X(q): the field pinned to vanish at q.
[[nodiscard]] Vector pin_field(const FieldSample& x, VertexId q = 0);

struct DualityCheck {
  /// ((-Δ)^s f)ᵀ M X.
  double lhs = 0.0;
  /// Σ_j (Φ_jᵀ M f) N_j, the white-noise integral of f.
  double rhs = 0.0;

  [[nodiscard]] double error() const { return std::abs(lhs - rhs); }
};

/// Both sides of ∫ (-Δ)^s f X dμ = ∫ f dW for the realization's noise. f is
/// projected onto span{Φ_1..Φ_J} first.
[[nodiscard]] DualityCheck white_noise_pairing(const SpectralBasis& b, const FieldSample& x,
                                               const Eigen::Ref<const Vector>& f);

struct CovarianceReport {
  double s = 0.0;
  int modes = 0;
  std::size_t replications = 0;
  std::vector<VertexPair> pairs;
  std::vector<double> exact;
  std::vector<double> empirical;
  std::vector<double> z_scores;
  double max_abs_z = 0.0;
  double mean_abs_z = 0.0;
  bool pass = false;
};

inline constexpr std::size_t kMinCovarianceReplications = 1000;

/// Monte Carlo E[X(x)X(y)] against the truncated G_{2s}(x,y); passes when
/// every standardized error is within 5. Requires at least 1000 seeds.
[[nodiscard]] CovarianceReport empirical_covariance(const SpectralBasis& b, double s, int J,
                                                    std::span<const std::uint64_t> seeds,
                                                    std::span<const VertexPair> pairs);

enum class VariogramMode { Exact, MonteCarlo };

struct VariogramBin {
  double lo = 0.0;
  double hi = 0.0;
  /// Mean of log d over the bin's pairs.
  double log_center = 0.0;
  std::size_t count = 0;
  double mean_square_increment = 0.0;
  /// Monte Carlo 95% half-width of the bin mean (0 in exact mode).
  double half_width = 0.0;
  bool used = false;
};

struct VariogramReport {
  double s = 0.0;
  double hurst_target = 0.0;
  VariogramMode mode = VariogramMode::Exact;
  std::vector<VariogramBin> bins;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t replications = 0;
  double confidence_half_width = 0.0;
  std::vector<std::string> warnings;
};

/// Half-octave distance bin edges covering [2^{-m+1}, 2^{-2}].
[[nodiscard]] std::vector<double> default_variogram_bins(int level);

/// Bin-averaged E(X(x) - X(y))² against distance and its log-log slope
/// (expected 2H). Exact mode uses Σ_j λ_j^{-2s}(Φ_j(x) - Φ_j(y))²; Monte
/// Carlo mode averages sampled fields over `seeds`. Bins with a single pair
/// are dropped with a warning; an empty bin is a ParameterError.
[[nodiscard]] VariogramReport variogram(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                                        std::span<const double> bin_edges, VariogramMode mode = VariogramMode::Exact,
                                        std::span<const std::uint64_t> seeds = {}, const PairSampling& sampling = {});

struct HoelderReport {
  double hurst = 0.0;
  std::vector<double> deltas;
  /// S(δ) = sup over pairs with δ/2 < d <= δ of |X(x) - X(y)| / (d^H √|ln d|).
  std::vector<double> statistics;
  /// S(smallest δ) / S(largest δ).
  double ratio = 0.0;
  /// Calibration cap on the ratio; a diagnostic, not a theorem check.
  double cap = 2.0;
  bool bounded_trend = false;
};

/// Deltas must lie in (0, 1/e).
[[nodiscard]] HoelderReport hoelder_statistic(const LevelGraph& g, const Eigen::Ref<const Vector>& values, double hurst,
                                              std::span<const double> deltas);

struct InvarianceReport {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  bool pass = false;
};

/// max_{x,y} |G_{2s}(σx, σy) - G_{2s}(x, y)|, plus the spread of Var X at
/// the three corners. J should not split a degenerate cluster.
[[nodiscard]] InvarianceReport symmetry_invariance_test(const SpectralBasis& b, double s, int J,
                                                        const SymmetryMap& sigma, double tolerance = 1e-8);

/// Compares the sub-gasket basis (solved on build_subgasket(w, m)) with the
/// parent basis at level m: λ_j^w / λ_j against 5^n for j <= 20 (1%) and
/// G^w_{2s}(F_w x, F_w y) / G_{2s}(x, y) against 2^{-2nH} (2%) on pairs whose
/// parent covariance is at least 10% of its maximum.
[[nodiscard]] InvarianceReport scaling_invariance_test(const SpectralBasis& parent, const SpectralBasis& sub, double s,
                                                       const Word& w);

}  // namespace gasket
