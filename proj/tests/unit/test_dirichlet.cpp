#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "gasket/dirichlet.hpp"
#include "gasket/errors.hpp"
#include "support.hpp"

namespace gasket {
namespace {

// Oracle: (5/3)^m Σ_{edges} (f(x) - f(y))², summed directly from the edge list.
double edge_sum(const LevelGraph& g, const Vector& f) {
  double e = 0.0;
  for (auto [a, b] : g.edges()) e += (f[a] - f[b]) * (f[a] - f[b]);
  return std::pow(5.0 / 3.0, g.level()) * e;
}

Vector coordinate_x(const LevelGraph& g) {
  Vector f(static_cast<Eigen::Index>(g.dim()));
  for (const auto& v : g.vertices()) f[v.id] = g.point(v.id).x;
  return f;
}

Vector gaussian(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector f(static_cast<Eigen::Index>(n));
  for (auto& x : f) x = nd(rng);
  return f;
}

TEST(Dirichlet, IndicatorOnBaseTriangle) {
  const LevelGraph g = build_level(0);
  Vector f = Vector::Zero(3);
  f[test::corner_id(g, 0)] = 1.0;
  EXPECT_DOUBLE_EQ(energy_value(assemble_energy(g), f), 2.0);
}

TEST(Dirichlet, ConstantsHaveZeroEnergy) {
  for (int m : {0, 2, 5}) {
    const LevelGraph g = build_level(m);
    const Vector c = Vector::Constant(static_cast<Eigen::Index>(g.dim()), 3.7);
    const StiffnessMatrix s = assemble_energy(g);
    // Roundoff scale: every edge contributes prefactor * c² before cancelling.
    const double scale = s.prefactor * 3.7 * 3.7 * static_cast<double>(g.edges().size());
    EXPECT_NEAR(energy_value(s, c), 0.0, 1e-14 * scale);
    EXPECT_EQ(energy_value(s, Vector::Zero(c.size())), 0.0);
  }
}

TEST(Dirichlet, StiffnessStructure) {
  const LevelGraph g = build_level(4);
  const StiffnessMatrix s = assemble_energy(g);
  EXPECT_DOUBLE_EQ(s.prefactor, std::pow(5.0 / 3.0, 4));
  const Matrix dense(s.entries);
  EXPECT_LE((dense - dense.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((dense * Vector::Ones(dense.rows())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dirichlet, MassIsLumpedCellMeasure) {
  const LevelGraph g = build_level(3);
  const MassMatrix m = assemble_mass(g);
  EXPECT_NEAR(m.trace(), 1.0, 1e-15);
  // A vertex carries a third of the measure of each of its cells.
  Vector oracle = Vector::Zero(static_cast<Eigen::Index>(g.dim()));
  for (const auto& c : g.cells())
    for (VertexId id : c.ids) oracle[id] += std::pow(3.0, -3) / 3.0;
  EXPECT_LE((m.diagonal - oracle).cwiseAbs().maxCoeff(), 1e-17);
}

TEST(Dirichlet, CoordinateEnergyMatchesEdgeSum) {
  const LevelGraph g = build_level(2);
  const Vector f = coordinate_x(g);
  const double e = energy_value(assemble_energy(g), f);
  EXPECT_GT(e, 0.0);
  EXPECT_NEAR(e, edge_sum(g, f), 1e-13 * e);
}

TEST(Dirichlet, RandomEnergyMatchesEdgeSum) {
  const LevelGraph g = build_level(4);
  const Vector f = gaussian(g.dim(), 3);
  const double e = energy_value(assemble_energy(g), f);
  EXPECT_NEAR(e, edge_sum(g, f), 1e-12 * e);
}

TEST(Dirichlet, EnergyDimensionMismatch) {
  const StiffnessMatrix s = assemble_energy(build_level(2));
  EXPECT_THROW((void)energy_value(s, Vector::Zero(3)), DimensionError);
}

TEST(Dirichlet, HarmonicExtensionOneFifthTwoFifths) {
  const LevelGraph fine = build_level(1);
  Vector coarse = Vector::Zero(3);
  coarse[test::corner_id(fine, 0)] = 1.0;
  const Vector h = harmonic_extension(fine, coarse);

  // Oracle: minimize E_1 over the three midpoints. Each midpoint has four
  // neighbours (m01 ~ q0, q1, m02, m12 and cyclically), so harmonicity reads
  // 4 h(m) = Σ neighbours; only m01 and m02 see the unit corner.
  Eigen::Matrix3d a;
  a << 4, -1, -1, -1, 4, -1, -1, -1, 4;
  const Eigen::Vector3d b(1, 1, 0);
  const Eigen::Vector3d oracle = a.lu().solve(b);
  EXPECT_NEAR(oracle[0], 0.4, 1e-15);
  EXPECT_NEAR(oracle[2], 0.2, 1e-15);

  const auto m01 = *fine.find(midpoint(corner(0), corner(1)));
  const auto m02 = *fine.find(midpoint(corner(0), corner(2)));
  const auto m12 = *fine.find(midpoint(corner(1), corner(2)));
  EXPECT_NEAR(h[m01], oracle[0], 1e-14);
  EXPECT_NEAR(h[m02], oracle[1], 1e-14);
  EXPECT_NEAR(h[m12], oracle[2], 1e-14);
  EXPECT_NEAR(energy_value(assemble_energy(fine), h), 2.0, 1e-13);
}

TEST(Dirichlet, HarmonicExtensionPreservesEnergyAcrossLevels) {
  // Renormalization: the harmonic extension of boundary data keeps E constant.
  Vector f = Vector::Zero(3);
  f << 0.3, -1.2, 2.0;
  const double e0 = energy_value(assemble_energy(build_level(0)), f);
  Vector cur = f;
  for (int m = 1; m <= 5; ++m) {
    const LevelGraph g = build_level(m);
    cur = harmonic_extension(g, cur);
    EXPECT_NEAR(energy_value(assemble_energy(g), cur), e0, 1e-11 * e0) << "m = " << m;
  }
}

TEST(Dirichlet, SelfSimilarityResidual) {
  const LevelGraph g2 = build_level(2);
  EXPECT_NEAR(self_similar_energy_residual(g2, Vector::Constant(static_cast<Eigen::Index>(g2.dim()), 1.0)), 0.0, 1e-14);

  const Vector f = gaussian(g2.dim(), 11);
  EXPECT_LE(self_similar_energy_residual(g2, f) / edge_sum(g2, f), 1e-12);

  const LevelGraph g3 = build_level(3);
  const Vector x = coordinate_x(g3);
  EXPECT_LE(self_similar_energy_residual(g3, x) / edge_sum(g3, x), 1e-12);

  EXPECT_THROW((void)self_similar_energy_residual(build_level(0), Vector::Zero(3)), BoundsError);
}

}  // namespace
}  // namespace gasket
