#include "gasket/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/regression.hpp"
#include "gasket/summation.hpp"
#include "subspace_iteration.hpp"

namespace gasket {

// ---------------------------------------------------------------- SpectralBasis

SpectralBasis::SpectralBasis(int level, Vector lambdas, Matrix modes, Vector mass, SolveDiagnostics diag)
    : level_(level),
      lambdas_(std::move(lambdas)),
      modes_(std::move(modes)),
      mass_(std::move(mass)),
      diag_(std::move(diag)) {
  if (lambdas_.size() < 1 || modes_.cols() != lambdas_.size())
    throw DimensionError("spectral basis: one column per eigenvalue (mode 0 included) required");
  if (modes_.rows() != mass_.size()) throw DimensionError("spectral basis: mode length does not match mass");
}

std::vector<EigenCluster> SpectralBasis::clusters(double rel_gap) const {
  std::vector<EigenCluster> out;
  const int J = count();
  int j = 1;
  while (j <= J) {
    int k = j;
    while (k + 1 <= J && lambdas_[k + 1] - lambdas_[k] < rel_gap * lambdas_[k + 1]) ++k;
    out.push_back({j, k + 1, lambdas_[j]});
    j = k + 1;
  }
  return out;
}

int SpectralBasis::cluster_end(int J) const {
  check_truncation(J);
  if (J == 0) return 0;
  for (const auto& c : clusters())
    if (J >= c.first && J < c.last) return c.last - 1;
  return J;
}

void SpectralBasis::check_truncation(int J) const {
  if (J < 0 || J > count())
    throw BoundsError("truncation " + std::to_string(J) + " outside [0, " + std::to_string(count()) + "]");
}

Vector SpectralBasis::coefficients(const Eigen::Ref<const Vector>& f, int J) const {
  check_truncation(J);
  if (f.size() != dim()) throw DimensionError("vector does not match basis dimension");
  return usable_modes(J).transpose() * mass_.cwiseProduct(f);
}

Vector SpectralBasis::synthesize(const Eigen::Ref<const Vector>& c) const {
  const auto J = static_cast<int>(c.size());
  check_truncation(J);
  return usable_modes(J) * c;
}

Vector SpectralBasis::remove_mean(const Eigen::Ref<const Vector>& f) const {
  if (f.size() != dim()) throw DimensionError("vector does not match basis dimension");
  return f.array() - mass_.dot(f) / mass_.sum();
}

// ---------------------------------------------------------------- solve

namespace {

double m_dot(const Vector& mass, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  return a.dot(mass.cwiseProduct(b));
}

// Pins mode 0 to the normalized constant and re-orthonormalizes every
// degenerate cluster (and its complement to mode 0) in the M-inner product.
void finalize_modes(Vector& lambdas, Matrix& modes, const Vector& mass) {
  const double total = compensated_sum(std::span<const double>(mass.data(), static_cast<std::size_t>(mass.size())));
  lambdas[0] = 0.0;
  modes.col(0).setConstant(1.0 / std::sqrt(total));

  const auto J = static_cast<int>(lambdas.size()) - 1;
  int j = 1;
  while (j <= J) {
    int k = j;
    while (k + 1 <= J && lambdas[k + 1] - lambdas[k] < kDegeneracyGap * lambdas[k + 1]) ++k;
    for (int a = j; a <= k; ++a) {
      for (int pass = 0; pass < 2; ++pass) {
        modes.col(a) -= m_dot(mass, modes.col(0), modes.col(a)) * modes.col(0);
        for (int b = j; b < a; ++b) modes.col(a) -= m_dot(mass, modes.col(b), modes.col(a)) * modes.col(b);
      }
      modes.col(a) /= std::sqrt(m_dot(mass, modes.col(a), modes.col(a)));
    }
    j = k + 1;
  }
}

SolveDiagnostics measure_quality(const SparseMatrix& s, const Vector& mass, const Vector& lambdas,
                                 const Matrix& modes) {
  SolveDiagnostics d;
  const Vector inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  const Matrix sm = s * modes;
  for (Eigen::Index j = 1; j < lambdas.size(); ++j) {
    const Vector r = inv_sqrt.asDiagonal() * (sm.col(j) - lambdas[j] * mass.asDiagonal() * modes.col(j));
    d.residual_norm = std::max(d.residual_norm, r.norm() / lambdas[j]);
    d.mean_residual = std::max(d.mean_residual, std::abs(mass.dot(modes.col(j))));
  }
  const Matrix gram = modes.transpose() * mass.asDiagonal() * modes;
  d.gram_residual = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return d;
}

}  // namespace

SpectralBasis solve_eigen(const StiffnessMatrix& s, const MassMatrix& m, int count, double tol,
                          const EigenOptions& opts) {
  const Eigen::Index n = s.dim();
  if (m.dim() != n) throw DimensionError("stiffness and mass dimensions differ");
  if (count < 0 || count > n - 1)
    throw BoundsError("requested " + std::to_string(count) + " modes but at most " + std::to_string(n - 1) +
                      " nonzero modes exist");
  if (!(tol > 0.0)) throw ParameterError("solver tolerance must be positive");

  const Vector& mass = m.diagonal;
  const bool dense = opts.method == EigenMethod::Dense ||
                     (opts.method == EigenMethod::Auto && n <= opts.dense_limit);

  Vector lambdas;
  Matrix modes;
  SolveDiagnostics diag;

  if (dense) {
    const Vector inv_sqrt = mass.cwiseSqrt().cwiseInverse();
    Matrix a = inv_sqrt.asDiagonal() * Matrix(s.entries) * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed", INFINITY);
    const Vector& ev = es.eigenvalues();
    const double scale = std::max(std::abs(ev[n - 1]), 1.0);
    if (n > 1 && ev[1] <= 1e-10 * scale)
      throw ConsistencyError("stiffness kernel is larger than the constants");
    lambdas = ev.head(count + 1);
    modes = inv_sqrt.asDiagonal() * es.eigenvectors().leftCols(count + 1);
    diag.solver = "dense-symmetric";
  } else {
    auto raw = detail::shift_invert_subspace(s.entries, mass, count + 1, tol, opts);
    lambdas = std::move(raw.lambdas);
    modes = std::move(raw.vectors);
    diag.solver = "shift-invert-subspace";
    diag.iterations = raw.iterations;
    if (count >= 1 && lambdas[1] <= 1e-10 * std::max(lambdas[count], 1.0))
      throw ConsistencyError("stiffness kernel is larger than the constants");
  }

  finalize_modes(lambdas, modes, mass);
  SolveDiagnostics quality = measure_quality(s.entries, mass, lambdas, modes);
  quality.solver = diag.solver;
  quality.iterations = diag.iterations;
  if (quality.residual_norm > tol)
    throw SolverError("eigen residual " + std::to_string(quality.residual_norm) + " exceeds tolerance",
                      quality.residual_norm);
  return SpectralBasis(s.level, std::move(lambdas), std::move(modes), mass, quality);
}

// ---------------------------------------------------------------- counting & Weyl

int counting_function(const SpectralBasis& b, double t) {
  if (t < 0.0) throw ParameterError("counting function needs t >= 0");
  const auto& l = b.lambdas();
  const auto* first = l.data() + 1;
  const auto* last = l.data() + l.size();
  return static_cast<int>(std::upper_bound(first, last, t) - first);
}

WeylFit weyl_exponent_fit(std::span<const double> lambdas) {
  const auto J = static_cast<int>(lambdas.size());
  if (J < kMinWeylModes)
    throw ParameterError("Weyl fit needs at least " + std::to_string(kMinWeylModes) + " modes, got " +
                         std::to_string(J));

  WeylFit out;
  out.window_lo = static_cast<int>(std::floor(0.2 * J));
  out.window_hi = static_cast<int>(std::ceil(0.8 * J));

  std::vector<double> x, y;
  int i = 0;
  while (i < J) {
    int k = i;
    while (k + 1 < J && lambdas[k + 1] - lambdas[k] < kDegeneracyGap * lambdas[k + 1]) ++k;
    // Cluster occupies positions [i, k]; N(λ) is right-continuous so it counts k + 1.
    if (i >= out.window_lo && k < out.window_hi) {
      x.push_back(std::log(lambdas[i]));
      y.push_back(std::log(static_cast<double>(k + 1)));
    }
    i = k + 1;
  }
  if (x.size() < 2) throw ParameterError("Weyl fit window holds fewer than two distinct eigenvalues");

  const LineFit fit = fit_line(x, y);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  out.points = fit.points;
  out.lambda_lo = std::exp(x.front());
  out.lambda_hi = std::exp(x.back());
  return out;
}

WeylFit weyl_exponent_fit(const SpectralBasis& b, int J) {
  if (J < 0) J = b.count();
  b.check_truncation(J);
  const auto& l = b.lambdas();
  WeylFit fit = weyl_exponent_fit(std::span<const double>(l.data() + 1, static_cast<std::size_t>(J)));
  // Shift positions to mode numbers j >= 1.
  fit.window_lo += 1;
  fit.window_hi += 1;
  return fit;
}

// ---------------------------------------------------------------- tails

double tail_variance(const SpectralBasis& b, double s, int J) {
  if (!(s > kSpectralExponent / 2.0))
    throw ParameterError("tail variance needs s > " + std::to_string(kSpectralExponent / 2.0));
  b.check_truncation(J);
  double tail = 0.0;
  for (int j = b.count(); j > J; --j) tail += std::pow(b.lambda(j), -2.0 * s);
  return tail;
}

int truncation_for_tail(const SpectralBasis& b, double s, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("tail fraction must lie in [0, 1]");
  const double total = tail_variance(b, s, 0);
  double tail = total;
  for (int J = 0; J <= b.count(); ++J) {
    if (J > 0) tail -= std::pow(b.lambda(J), -2.0 * s);
    if (tail <= fraction * total * (1.0 + 1e-12)) return J;
  }
  return b.count();
}

}  // namespace gasket
