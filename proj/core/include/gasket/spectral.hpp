#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gasket/dirichlet.hpp"

namespace gasket {

enum class EigenMethod { Auto, Dense, ShiftInvert };

struct EigenOptions {
  EigenMethod method = EigenMethod::Auto;
  /// Auto picks the dense solver up to this dimension.
  Eigen::Index dense_limit = 4000;
  /// Pole of the shift-invert operator (S - shift·M)^{-1} M; negative keeps
  /// the factorization positive definite.
  double shift = -1.0;
  int max_iterations = 400;
  std::uint64_t start_seed = 0x5eed;
};

struct SolveDiagnostics {
  std::string solver = "external";
  /// max_j ‖M^{-1/2}(S Φ_j - λ_j M Φ_j)‖ / λ_j over j >= 1.
  double residual_norm = 0.0;
  /// max_{j,k} |Φ_jᵀ M Φ_k - δ_jk|, including the constant mode.
  double gram_residual = 0.0;
  /// max_{j>=1} |Σ_x Φ_j(x) M(x)|.
  double mean_residual = 0.0;
  int iterations = 0;
};

/// Run of eigenvalues whose consecutive relative gaps are below the
/// degeneracy threshold. Indices refer to mode numbers j >= 1; `last` is
/// one past the end.
struct EigenCluster {
  int first = 0;
  int last = 0;
  double lambda = 0.0;

  [[nodiscard]] int multiplicity() const { return last - first; }
};

inline constexpr double kDegeneracyGap = 1e-9;

/// Eigenpairs {λ_j, Φ_j}, j = 0..J, of S Φ = λ M Φ with Φ_0 constant and
/// the Φ_j mass-orthonormal. Mode 0 is stored but excluded from count().
/// Immutable; safe to share between threads.
class SpectralBasis {
 public:
  /// `lambdas` and the columns of `modes` include mode 0.
  SpectralBasis(int level, Vector lambdas, Matrix modes, Vector mass, SolveDiagnostics diag = {});

  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] int count() const noexcept { return static_cast<int>(lambdas_.size()) - 1; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return modes_.rows(); }

  [[nodiscard]] double lambda(int j) const { return lambdas_[j]; }
  [[nodiscard]] const Vector& lambdas() const noexcept { return lambdas_; }
  [[nodiscard]] auto mode(int j) const { return modes_.col(j); }
  [[nodiscard]] const Matrix& modes() const noexcept { return modes_; }
  /// Columns 1..J of the mode matrix.
  [[nodiscard]] auto usable_modes(int J) const { return modes_.middleCols(1, J); }
  [[nodiscard]] const Vector& mass() const noexcept { return mass_; }
  [[nodiscard]] const SolveDiagnostics& diagnostics() const noexcept { return diag_; }

  [[nodiscard]] std::vector<EigenCluster> clusters(double rel_gap = kDegeneracyGap) const;
  /// Smallest J' >= J that does not split a degenerate cluster.
  [[nodiscard]] int cluster_end(int J) const;

  /// (Φ_jᵀ M f)_{j=1..J}.
  [[nodiscard]] Vector coefficients(const Eigen::Ref<const Vector>& f, int J) const;
  /// Σ_{j=1}^{J} c_j Φ_j with J = c.size().
  [[nodiscard]] Vector synthesize(const Eigen::Ref<const Vector>& c) const;
  /// f minus its M-mean (the L²_0 projection).
  [[nodiscard]] Vector remove_mean(const Eigen::Ref<const Vector>& f) const;

  /// Throws BoundsError unless 0 <= J <= count().
  void check_truncation(int J) const;

 private:
  int level_;
  Vector lambdas_;
  Matrix modes_;
  Vector mass_;
  SolveDiagnostics diag_;
};

/// The `count` smallest nonzero generalized eigenpairs of (S, M). Dense
/// symmetric solve below `opts.dense_limit`, shift-invert subspace iteration
/// above. Throws BoundsError if count > dim - 1 and SolverError (carrying
/// the achieved residual) if the residual exceeds `tol`.
[[nodiscard]] SpectralBasis solve_eigen(const StiffnessMatrix& s, const MassMatrix& m, int count, double tol,
                                        const EigenOptions& opts = {});

/// N(t) = #{j >= 1 : λ_j <= t}.
[[nodiscard]] int counting_function(const SpectralBasis& b, double t);

struct WeylFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Mode window [window_lo, window_hi) the regression was restricted to.
  int window_lo = 0;
  int window_hi = 0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  /// Number of distinct eigenvalues entering the fit.
  int points = 0;
};

inline constexpr int kMinWeylModes = 100;

/// Fits log N(λ) against log λ over the middle 60% of the first J modes
/// (all computed modes when J < 0), one point per distinct eigenvalue
/// (degenerate clusters are not multiplicity-weighted).
[[nodiscard]] WeylFit weyl_exponent_fit(const SpectralBasis& b, int J = -1);
/// Same fit on a sorted list of positive eigenvalues λ_1 <= λ_2 <= ...
[[nodiscard]] WeylFit weyl_exponent_fit(std::span<const double> lambdas);

/// Σ_{J < j <= count} λ_j^{-2s}; requires s > d_h / (2 d_w).
[[nodiscard]] double tail_variance(const SpectralBasis& b, double s, int J);
/// Smallest J whose tail_variance is at most `fraction` of the total.
[[nodiscard]] int truncation_for_tail(const SpectralBasis& b, double s, double fraction);

}  // namespace gasket
