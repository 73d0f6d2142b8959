#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gasket/constants.hpp"
#include "gasket/dirichlet.hpp"
#include "gasket/errors.hpp"
#include "gasket/spectral.hpp"
#include "support.hpp"

namespace gasket {
namespace {

SpectralBasis solve_level(int m, int count, EigenMethod method = EigenMethod::Auto) {
  const LevelGraph g = build_level(m);
  EigenOptions opts;
  opts.method = method;
  return solve_eigen(assemble_energy(g), assemble_mass(g), count, 1e-9, opts);
}

TEST(Spectral, GroundStateIsConstant) {
  const SpectralBasis& b = test::full_basis(4);
  EXPECT_EQ(b.lambda(0), 0.0);
  EXPECT_LE((b.mode(0).array() - 1.0).abs().maxCoeff(), 1e-14);
  EXPECT_GT(b.lambda(1), 0.0);
}

TEST(Spectral, DenseOrthonormality) {
  const SpectralBasis& b = test::full_basis(5);
  const Matrix gram = b.modes().transpose() * b.mass().asDiagonal() * b.modes();
  EXPECT_LE((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(std::is_sorted(b.lambdas().begin(), b.lambdas().end()));
  EXPECT_LE(b.diagnostics().residual_norm, 1e-9);
}

TEST(Spectral, FirstEigenvalueConvergesAcrossLevels) {
  std::vector<double> l1;
  for (int m = 3; m <= 6; ++m) l1.push_back(test::full_basis(m).lambda(1));
  EXPECT_LE(std::abs(l1[0] - l1[2]) / l1[2], 0.05);
  // Successive differences shrink geometrically (by about 5 per level).
  for (std::size_t k = 2; k < l1.size(); ++k) {
    const double prev = l1[k - 1] - l1[k - 2], cur = l1[k] - l1[k - 1];
    EXPECT_GT(cur, 0.0);
    EXPECT_LT(cur, 0.3 * prev);
  }
  // Richardson estimate from levels 5 and 6 against the reference 27.11443.
  const double extrapolated = l1[3] + (l1[3] - l1[2]) / 4.0;
  EXPECT_NEAR(extrapolated, 27.11443, 5e-4);
}

TEST(Spectral, DegenerateClustersAreSymmetryInvariant) {
  const LevelGraph& g = test::graph(4);
  const SpectralBasis& b = test::full_basis(4);
  int degenerate = 0;
  for (const auto& c : b.clusters()) {
    if (c.multiplicity() < 2) continue;
    ++degenerate;
    const Matrix block = b.modes().middleCols(c.first, c.multiplicity());
    // σ maps the eigenspace to itself: the M-projection of σΦ onto it is exact.
    for (int i = 1; i <= 3; ++i) {
      const SymmetryMap s = symmetry_permutation(g, i);
      Matrix image(block.rows(), block.cols());
      for (Eigen::Index x = 0; x < block.rows(); ++x) image.row(x) = block.row(s(static_cast<VertexId>(x)));
      const Matrix proj = block * (block.transpose() * b.mass().asDiagonal() * image);
      EXPECT_LE((proj - image).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
  EXPECT_GT(degenerate, 0);
}

TEST(Spectral, DecimationOracle) {
  // Test-only oracle: M^{-1}S = 6·5^m (I - P), and eigenvalues z of I - P at
  // level m+1 map to level-m eigenvalues through z ↦ z(5 - 4z).
  for (int m = 3; m <= 5; ++m) {
    const SpectralBasis& coarse = test::full_basis(m);
    const SpectralBasis& fine = test::full_basis(m + 1);
    const double scale_c = 6.0 * std::pow(5.0, m), scale_f = 6.0 * std::pow(5.0, m + 1);
    for (int j = 1; j <= 30; ++j) {
      const double z = fine.lambda(j) / scale_f;
      const double image = z * (5.0 - 4.0 * z) * scale_c;
      double best = INFINITY;
      for (int k = 1; k <= coarse.count(); ++k) best = std::min(best, std::abs(coarse.lambda(k) - image));
      EXPECT_LE(best / image, 1e-9) << "m = " << m << " j = " << j;
    }
  }
}

TEST(Spectral, IterativeMatchesDense) {
  const int count = 40;
  const SpectralBasis dense = solve_level(5, count, EigenMethod::Dense);
  const SpectralBasis iter = solve_level(5, count, EigenMethod::ShiftInvert);
  EXPECT_EQ(iter.diagnostics().solver, "shift-invert-subspace");
  for (int j = 1; j <= count; ++j) EXPECT_NEAR(iter.lambda(j), dense.lambda(j), 1e-8 * dense.lambda(j));
  // Eigenvectors are compared through spectral projectors of closed clusters.
  const int J = dense.cluster_end(24);
  ASSERT_LT(J, count);
  const Matrix pd = dense.usable_modes(J) * dense.usable_modes(J).transpose();
  const Matrix pi = iter.usable_modes(J) * iter.usable_modes(J).transpose();
  EXPECT_LE((pd - pi).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(iter.diagnostics().gram_residual, 1e-8);
}

TEST(Spectral, SolverFailureReportsResidual) {
  const LevelGraph g = build_level(5);
  EigenOptions opts;
  opts.method = EigenMethod::ShiftInvert;
  opts.max_iterations = 1;
  try {
    (void)solve_eigen(assemble_energy(g), assemble_mass(g), 60, 1e-14, opts);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.achieved_residual(), 1e-14);
  }
}

TEST(Spectral, RequestBounds) {
  const LevelGraph g = build_level(2);
  EXPECT_THROW((void)solve_eigen(assemble_energy(g), assemble_mass(g), static_cast<int>(g.dim()), 1e-9), BoundsError);
  EXPECT_NO_THROW((void)solve_eigen(assemble_energy(g), assemble_mass(g), static_cast<int>(g.dim()) - 1, 1e-9));
}

TEST(Spectral, CountingFunction) {
  const SpectralBasis& b = test::full_basis(4);
  EXPECT_EQ(counting_function(b, 0.5 * b.lambda(1)), 0);
  EXPECT_EQ(counting_function(b, b.lambda(b.count())), b.count());
  for (const auto& c : b.clusters()) {
    const int jump = counting_function(b, c.lambda * (1.0 + 1e-7)) - counting_function(b, c.lambda * (1.0 - 1e-7));
    EXPECT_EQ(jump, c.multiplicity());
  }
  EXPECT_THROW((void)counting_function(b, -1.0), ParameterError);
}

TEST(Spectral, WeylFitOnPowerSequence) {
  std::vector<double> l(300);
  for (int j = 1; j <= 300; ++j) l[j - 1] = std::pow(j, 1.0 / 0.6826);
  const WeylFit fit = weyl_exponent_fit(l);
  EXPECT_NEAR(fit.slope, 0.6826, 1e-6);
  EXPECT_EQ(fit.window_lo, 60);
  EXPECT_EQ(fit.window_hi, 240);
  l.resize(99);
  EXPECT_THROW((void)weyl_exponent_fit(l), ParameterError);
}

TEST(Spectral, WeylExponentAtLevelSix) {
  const WeylFit fit = weyl_exponent_fit(test::full_basis(6), 300);
  EXPECT_NEAR(fit.slope, kSpectralExponent, 0.05);
}

TEST(Spectral, TailVariance) {
  const SpectralBasis& b = test::full_basis(5);
  EXPECT_EQ(tail_variance(b, 0.5, b.count()), 0.0);
  EXPECT_GT(tail_variance(b, 0.4, 50), tail_variance(b, 0.5, 50));
  EXPECT_GT(tail_variance(b, 0.5, 50), tail_variance(b, 0.6, 50));
  EXPECT_THROW((void)tail_variance(b, 0.3, 10), ParameterError);
  EXPECT_THROW((void)tail_variance(b, 0.5, b.count() + 1), BoundsError);
}

TEST(Spectral, TailBudgetTruncationIsMinimal) {
  const SpectralBasis& b = test::full_basis(6);
  const int j = truncation_for_tail(b, 0.5, 0.01);
  const double total = tail_variance(b, 0.5, 0);
  EXPECT_LE(tail_variance(b, 0.5, j), 0.01 * total * (1 + 1e-12));
  ASSERT_GT(j, 0);
  EXPECT_GT(tail_variance(b, 0.5, j - 1), 0.01 * total);
  const int closed = b.cluster_end(j);
  EXPECT_GE(closed, j);
  RecordProperty("J_star", j);
  RecordProperty("J_cluster_closed", closed);
}

TEST(Spectral, CoefficientRoundTrip) {
  const SpectralBasis& b = test::full_basis(4);
  Vector c = Vector::LinSpaced(20, -1.0, 1.0);
  const Vector f = b.synthesize(c);
  EXPECT_LE((b.coefficients(f, 20) - c).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(b.mass().dot(f), 0.0, 1e-14);
}

}  // namespace
}  // namespace gasket
