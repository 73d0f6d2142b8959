#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gasket {

using VertexId = std::int32_t;

inline constexpr int kMaxLevel = 10;

/// Cell address i_1 ... i_m over the alphabet {0, 1, 2}. The empty word
/// addresses the whole gasket.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(std::span<const int> letters);

  [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
  [[nodiscard]] bool empty() const noexcept { return letters_.empty(); }
  [[nodiscard]] int operator[](std::size_t i) const { return letters_[i]; }
  [[nodiscard]] const std::vector<std::uint8_t>& letters() const noexcept { return letters_; }

  [[nodiscard]] Word child(int letter) const;
  [[nodiscard]] Word concat(const Word& tail) const;
  [[nodiscard]] std::string to_string() const;
  static Word parse(const std::string& text);

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

/// num / 2^exp, kept in lowest terms (num odd or exp == 0).
struct Dyadic {
  std::int64_t num = 0;
  int exp = 0;

  static Dyadic make(std::int64_t num, int exp);
  [[nodiscard]] double value() const;

  friend Dyadic operator+(Dyadic a, Dyadic b);
  friend Dyadic operator-(Dyadic a, Dyadic b);
  friend Dyadic operator-(Dyadic a) { return {-a.num, a.exp}; }
  [[nodiscard]] Dyadic half() const { return make(num, exp + 1); }
  [[nodiscard]] Dyadic times(std::int64_t k) const { return make(num * k, exp); }

  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

/// Plane point (x, y) with x = a and y = b·√3 for dyadic a, b. Every
/// gasket vertex has this form, so equality is exact.
struct ExactPoint {
  Dyadic x;
  Dyadic y_sqrt3;

  [[nodiscard]] double px() const { return x.value(); }
  [[nodiscard]] double py() const;

  friend bool operator==(const ExactPoint&, const ExactPoint&) = default;
};

struct ExactPointHash {
  std::size_t operator()(const ExactPoint& p) const noexcept;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

[[nodiscard]] ExactPoint corner(int i);
[[nodiscard]] ExactPoint midpoint(const ExactPoint& a, const ExactPoint& b);

/// F_w(p) = F_{i_1}(F_{i_2}(... F_{i_n}(p))), F_i(z) = (z - q_i)/2 + q_i.
[[nodiscard]] Point2 apply_cell_map(const Word& w, Point2 p);
[[nodiscard]] ExactPoint apply_cell_map(const Word& w, const ExactPoint& p);

/// Reflection of the triangle that fixes q_{index-1}; index in {1, 2, 3}.
[[nodiscard]] ExactPoint reflect(const ExactPoint& p, int index);

struct Vertex {
  VertexId id = 0;
  ExactPoint coord;
  int level_introduced = 0;
  bool is_boundary = false;
};

struct Cell {
  Word word;
  std::array<VertexId, 3> ids{};
};

using Edge = std::pair<VertexId, VertexId>;

/// Graph approximation V_m of a gasket. For the full gasket root() is empty;
/// a sub-gasket K_w carries root() == w and level() == |w| + depth().
///
/// Vertex ids are stable under refinement: V_m ids embed into V_{m+1}
/// unchanged. Immutable after construction.
class LevelGraph {
 public:
  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] const Word& root() const noexcept { return root_; }
  [[nodiscard]] int depth() const noexcept { return level_ - static_cast<int>(root_.size()); }
  [[nodiscard]] std::size_t dim() const noexcept { return vertices_.size(); }

  [[nodiscard]] const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] const std::vector<Cell>& cells() const noexcept { return cells_; }
  [[nodiscard]] const std::vector<double>& measure() const noexcept { return measure_; }

  [[nodiscard]] const Vertex& vertex(VertexId id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] Point2 point(VertexId id) const;
  [[nodiscard]] std::optional<VertexId> find(const ExactPoint& p) const;
  [[nodiscard]] std::vector<VertexId> boundary() const;

 private:
  friend LevelGraph build_level(int m);
  friend LevelGraph build_subgasket(const Word& w, int m);

  int level_ = 0;
  Word root_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
  std::vector<double> measure_;
  std::unordered_map<ExactPoint, VertexId, ExactPointHash> index_;
};

/// Builds V_m for 0 <= m <= kMaxLevel; throws BoundsError otherwise.
[[nodiscard]] LevelGraph build_level(int m);

/// Builds F_w(V_m) as the graph of the sub-gasket K_w. Vertex k is the
/// image of vertex k of build_level(m); cell masses are 3^{-(|w|+m)}.
[[nodiscard]] LevelGraph build_subgasket(const Word& w, int m);

[[nodiscard]] double euclidean_distance(const Vertex& a, const Vertex& b);
[[nodiscard]] double euclidean_distance(const ExactPoint& a, const ExactPoint& b);

/// For every vertex k of `coarse`, the id in `fine` of F_w(x_k).
/// Throws ConsistencyError if an image is missing from `fine`.
[[nodiscard]] std::vector<VertexId> embed_subcell(const LevelGraph& coarse, const LevelGraph& fine, const Word& w);

/// Mass of the discrete ball {y : |x - y| <= r}.
[[nodiscard]] double ball_mass(const LevelGraph& g, VertexId center, double r);

struct SymmetryMap {
  int index = 0;
  std::vector<VertexId> permutation;

  [[nodiscard]] bool is_identity() const;
  [[nodiscard]] VertexId operator()(VertexId v) const { return permutation[static_cast<std::size_t>(v)]; }
};

/// σ_i fixes q_{i-1}: σ_1 and σ_2 are the reflections through q_0 and q_1,
/// σ_3 is the reflection about x = 1/2. The returned permutation has been
/// checked to preserve edges.
[[nodiscard]] SymmetryMap symmetry_permutation(const LevelGraph& g, int index);

[[nodiscard]] SymmetryMap identity_symmetry(const LevelGraph& g);

}  // namespace gasket
