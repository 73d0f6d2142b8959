#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/geometry.hpp"
#include "support.hpp"

namespace gasket {
namespace {

long long pow3(int k) {
  long long p = 1;
  while (k-- > 0) p *= 3;
  return p;
}

TEST(Geometry, BaseTriangle) {
  const LevelGraph g = build_level(0);
  EXPECT_EQ(g.dim(), 3u);
  EXPECT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.cells().size(), 1u);
}

TEST(Geometry, LevelOne) {
  const LevelGraph g = build_level(1);
  EXPECT_EQ(g.dim(), 6u);
  EXPECT_EQ(g.edges().size(), 9u);
  EXPECT_EQ(g.cells().size(), 3u);
}

TEST(Geometry, CountsFollowClosedForm) {
  for (int m = 0; m <= 7; ++m) {
    const LevelGraph g = build_level(m);
    EXPECT_EQ(static_cast<long long>(g.dim()), (pow3(m + 1) + 3) / 2) << "m = " << m;
    EXPECT_EQ(static_cast<long long>(g.edges().size()), pow3(m + 1));
    EXPECT_EQ(static_cast<long long>(g.cells().size()), pow3(m));
  }
}

TEST(Geometry, CountsMatchBruteForce) {
  // Oracle: enumerate every cell corner F_w(q_i) over all words of length m.
  for (int m = 0; m <= 4; ++m) {
    std::set<std::pair<std::int64_t, std::int64_t>> pts;
    std::vector<Word> words{Word{}};
    for (int k = 0; k < m; ++k) {
      std::vector<Word> next;
      for (const auto& w : words)
        for (int i = 0; i < 3; ++i) next.push_back(w.child(i));
      words = std::move(next);
    }
    for (const auto& w : words)
      for (int i = 0; i < 3; ++i) {
        const Point2 p = apply_cell_map(w, Point2{corner(i).px(), corner(i).py()});
        pts.emplace(std::llround(p.x * 1024 * 4), std::llround(p.y * 1024 * 4));
      }
    EXPECT_EQ(pts.size(), build_level(m).dim());
  }
}

TEST(Geometry, LevelTwoWeights) {
  const LevelGraph g = build_level(2);
  double total = 0.0;
  for (const auto& v : g.vertices()) {
    const double w = g.measure()[static_cast<std::size_t>(v.id)];
    EXPECT_DOUBLE_EQ(w, v.is_boundary ? 1.0 / 27.0 : 2.0 / 27.0);
    total += w;
  }
  EXPECT_EQ(g.boundary().size(), 3u);
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Geometry, CellMaps) {
  const Point2 p = apply_cell_map(Word{}, Point2{0.3, 0.1});
  EXPECT_EQ(p.x, 0.3);
  EXPECT_EQ(p.y, 0.1);

  EXPECT_EQ(apply_cell_map(Word::parse("0"), corner(0)), corner(0));

  const ExactPoint q = apply_cell_map(Word::parse("11"), corner(0));
  EXPECT_EQ(q.x, Dyadic::make(3, 2));
  EXPECT_EQ(q.y_sqrt3, Dyadic::make(0, 0));
  const Point2 r = apply_cell_map(Word::parse("11"), Point2{0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.x, 0.75);
  EXPECT_DOUBLE_EQ(r.y, 0.0);
}

TEST(Geometry, CellMapCompositionOrder) {
  // F_{01}(q_2) = F_0(F_1(q_2)): F_1(q_2) = (3/4, √3/4), then halved toward q_0.
  const Point2 p = apply_cell_map(Word::parse("01"), Point2{corner(2).px(), corner(2).py()});
  EXPECT_DOUBLE_EQ(p.x, 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(p.y, std::sqrt(3.0) / 8.0);
}

TEST(Geometry, Distances) {
  EXPECT_DOUBLE_EQ(euclidean_distance(corner(0), corner(1)), 1.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(corner(0), corner(2)), 1.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(corner(0), midpoint(corner(0), corner(1))), 0.5);
}

TEST(Geometry, WordParsing) {
  EXPECT_EQ(Word::parse("0120").to_string(), "0120");
  EXPECT_TRUE(Word::parse("").empty());
  EXPECT_THROW((void)Word::parse("013"), ParameterError);
  EXPECT_THROW((void)Word{}.child(3), ParameterError);
}

TEST(Geometry, LevelBounds) {
  EXPECT_THROW((void)build_level(-1), BoundsError);
  EXPECT_THROW((void)build_level(kMaxLevel + 1), BoundsError);
}

TEST(Geometry, IdsStableUnderRefinement) {
  const LevelGraph coarse = build_level(3);
  const LevelGraph fine = build_level(5);
  for (const auto& v : coarse.vertices()) {
    EXPECT_EQ(fine.vertex(v.id).coord, v.coord);
    EXPECT_EQ(fine.vertex(v.id).level_introduced, v.level_introduced);
  }
}

TEST(Geometry, MirrorSwapsBaseCorners) {
  const LevelGraph& g = test::graph(3);
  const SymmetryMap s = symmetry_permutation(g, 3);
  const VertexId q0 = test::corner_id(g, 0), q1 = test::corner_id(g, 1), q2 = test::corner_id(g, 2);
  EXPECT_EQ(s(q0), q1);
  EXPECT_EQ(s(q1), q0);
  EXPECT_EQ(s(q2), q2);
}

TEST(Geometry, ReflectionsFixTheirCorner) {
  const LevelGraph& g = test::graph(3);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(reflect(corner(i - 1), i), corner(i - 1));
  for (int i = 1; i <= 3; ++i) {
    const SymmetryMap s = symmetry_permutation(g, i);
    const VertexId fixed = test::corner_id(g, i - 1);
    EXPECT_EQ(s(fixed), fixed);
  }
}

TEST(Geometry, ReflectionsAreEdgePreservingInvolutions) {
  const LevelGraph& g = test::graph(3);
  std::set<Edge> edges(g.edges().begin(), g.edges().end());
  for (int i = 1; i <= 3; ++i) {
    const SymmetryMap s = symmetry_permutation(g, i);
    EXPECT_FALSE(s.is_identity());
    for (const auto& v : g.vertices()) EXPECT_EQ(s(s(v.id)), v.id);
    std::set<Edge> image;
    for (auto [a, b] : g.edges()) image.emplace(std::min(s(a), s(b)), std::max(s(a), s(b)));
    EXPECT_EQ(image, edges) << "sigma_" << i;
  }
  EXPECT_TRUE(identity_symmetry(g).is_identity());
  EXPECT_THROW((void)symmetry_permutation(g, 4), ParameterError);
}

TEST(Geometry, SubgasketIsImageOfLevel) {
  const Word w = Word::parse("12");
  const LevelGraph base = build_level(3);
  const LevelGraph sub = build_subgasket(w, 3);
  EXPECT_EQ(sub.level(), 5);
  EXPECT_EQ(sub.root(), w);
  ASSERT_EQ(sub.dim(), base.dim());
  double total = 0.0;
  for (const auto& v : base.vertices()) {
    EXPECT_EQ(sub.vertex(v.id).coord, apply_cell_map(w, v.coord));
    total += sub.measure()[static_cast<std::size_t>(v.id)];
  }
  EXPECT_NEAR(total, 1.0 / 9.0, 1e-15);

  // The sub-gasket vertices are vertices of V_5 of the full gasket.
  const auto ids = embed_subcell(base, build_level(5), w);
  EXPECT_EQ(ids.size(), base.dim());
}

TEST(Geometry, AhlforsRegularBalls) {
  // μ(B(x, r)) is comparable to r^{d_h} at scales above the mesh.
  const LevelGraph& g = test::graph(7);
  for (VertexId x : {VertexId{0}, VertexId{3}, VertexId{17}, VertexId{200}, VertexId{1500}}) {
    for (double r : {0.25, 0.125, 0.0625, 0.03125}) {
      const double ratio = ball_mass(g, x, r) / std::pow(r, kHausdorffDim);
      EXPECT_GE(ratio, 0.1) << "x = " << x << " r = " << r;
      EXPECT_LE(ratio, 10.0) << "x = " << x << " r = " << r;
    }
  }
}

}  // namespace
}  // namespace gasket
