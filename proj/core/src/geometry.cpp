#include "gasket/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gasket/errors.hpp"

namespace gasket {

// ---------------------------------------------------------------- Word

Word::Word(std::initializer_list<int> letters) : Word(std::span<const int>(letters.begin(), letters.size())) {}

Word::Word(std::span<const int> letters) {
  letters_.reserve(letters.size());
  for (int l : letters) {
    if (l < 0 || l > 2) throw ParameterError("word letters must be in {0,1,2}, got " + std::to_string(l));
    letters_.push_back(static_cast<std::uint8_t>(l));
  }
}

Word Word::child(int letter) const {
  if (letter < 0 || letter > 2) throw ParameterError("word letters must be in {0,1,2}");
  Word out = *this;
  out.letters_.push_back(static_cast<std::uint8_t>(letter));
  return out;
}

Word Word::concat(const Word& tail) const {
  Word out = *this;
  out.letters_.insert(out.letters_.end(), tail.letters_.begin(), tail.letters_.end());
  return out;
}

std::string Word::to_string() const {
  std::string s;
  s.reserve(letters_.size());
  for (auto l : letters_) s.push_back(static_cast<char>('0' + l));
  return s;
}

Word Word::parse(const std::string& text) {
  Word w;
  for (char c : text) {
    if (c < '0' || c > '2') throw ParameterError("invalid word '" + text + "': letters must be 0, 1 or 2");
    w.letters_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

// ---------------------------------------------------------------- Dyadic

Dyadic Dyadic::make(std::int64_t num, int exp) {
  if (num == 0) return {0, 0};
  while (exp > 0 && (num % 2) == 0) {
    num /= 2;
    --exp;
  }
  while (exp < 0) {
    num *= 2;
    ++exp;
  }
  return {num, exp};
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -exp); }

Dyadic operator+(Dyadic a, Dyadic b) {
  const int e = std::max(a.exp, b.exp);
  return Dyadic::make((a.num << (e - a.exp)) + (b.num << (e - b.exp)), e);
}

Dyadic operator-(Dyadic a, Dyadic b) { return a + (-b); }

double ExactPoint::py() const { return y_sqrt3.value() * std::sqrt(3.0); }

std::size_t ExactPointHash::operator()(const ExactPoint& p) const noexcept {
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  };
  std::uint64_t h = 0;
  h = mix(h, static_cast<std::uint64_t>(p.x.num));
  h = mix(h, static_cast<std::uint64_t>(p.x.exp));
  h = mix(h, static_cast<std::uint64_t>(p.y_sqrt3.num));
  h = mix(h, static_cast<std::uint64_t>(p.y_sqrt3.exp));
  return static_cast<std::size_t>(h);
}

ExactPoint corner(int i) {
  switch (i) {
    case 0: return {Dyadic::make(0, 0), Dyadic::make(0, 0)};
    case 1: return {Dyadic::make(1, 0), Dyadic::make(0, 0)};
    case 2: return {Dyadic::make(1, 1), Dyadic::make(1, 1)};
    default: throw ParameterError("corner index must be 0, 1 or 2");
  }
}

ExactPoint midpoint(const ExactPoint& a, const ExactPoint& b) {
  return {(a.x + b.x).half(), (a.y_sqrt3 + b.y_sqrt3).half()};
}

Point2 apply_cell_map(const Word& w, Point2 p) {
  for (std::size_t k = w.size(); k-- > 0;) {
    const ExactPoint q = corner(w[k]);
    p.x = 0.5 * (p.x - q.px()) + q.px();
    p.y = 0.5 * (p.y - q.py()) + q.py();
  }
  return p;
}

ExactPoint apply_cell_map(const Word& w, const ExactPoint& p) {
  ExactPoint out = p;
  for (std::size_t k = w.size(); k-- > 0;) out = midpoint(out, corner(w[k]));
  return out;
}

ExactPoint reflect(const ExactPoint& p, int index) {
  const auto mirror_x = [](const ExactPoint& z) { return ExactPoint{Dyadic::make(1, 0) - z.x, z.y_sqrt3}; };
  // Reflection across the line through q_0 at 30 degrees:
  // x' = x/2 + 3b/2, b' = (x - b)/2 where y = b√3.
  const auto through_q0 = [](const ExactPoint& z) {
    return ExactPoint{(z.x + z.y_sqrt3.times(3)).half(), (z.x - z.y_sqrt3).half()};
  };
  switch (index) {
    case 1: return through_q0(p);
    case 2: return mirror_x(through_q0(mirror_x(p)));
    case 3: return mirror_x(p);
    default: throw ParameterError("symmetry index must be 1, 2 or 3");
  }
}

// ---------------------------------------------------------------- LevelGraph

Point2 LevelGraph::point(VertexId id) const {
  const auto& c = vertex(id).coord;
  return {c.px(), c.py()};
}

std::optional<VertexId> LevelGraph::find(const ExactPoint& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<VertexId> LevelGraph::boundary() const {
  std::vector<VertexId> out;
  for (const auto& v : vertices_)
    if (v.is_boundary) out.push_back(v.id);
  return out;
}

LevelGraph build_level(int m) {
  if (m < 0 || m > kMaxLevel)
    throw BoundsError("level must lie in [0, " + std::to_string(kMaxLevel) + "], got " + std::to_string(m));

  LevelGraph g;
  g.level_ = m;
  const std::size_t n_vertices = (static_cast<std::size_t>(std::pow(3, m + 1)) + 3) / 2;
  g.vertices_.reserve(n_vertices);
  g.index_.reserve(n_vertices);

  for (int i = 0; i < 3; ++i) {
    g.vertices_.push_back({i, corner(i), 0, true});
    g.index_.emplace(corner(i), i);
  }
  g.cells_.push_back({Word{}, {0, 1, 2}});

  for (int lev = 1; lev <= m; ++lev) {
    std::vector<Cell> refined;
    refined.reserve(g.cells_.size() * 3);
    for (const auto& cell : g.cells_) {
      // mid[i][j] = vertex at the midpoint of corners i and j of the parent.
      std::array<std::array<VertexId, 3>, 3> mid{};
      for (int i = 0; i < 3; ++i) {
        mid[i][i] = cell.ids[i];
        for (int j = i + 1; j < 3; ++j) {
          const ExactPoint p = midpoint(g.vertices_[cell.ids[i]].coord, g.vertices_[cell.ids[j]].coord);
          auto [it, inserted] = g.index_.try_emplace(p, static_cast<VertexId>(g.vertices_.size()));
          if (inserted) g.vertices_.push_back({it->second, p, lev, false});
          mid[i][j] = mid[j][i] = it->second;
        }
      }
      for (int i = 0; i < 3; ++i) refined.push_back({cell.word.child(i), {mid[i][0], mid[i][1], mid[i][2]}});
    }
    g.cells_ = std::move(refined);
  }

  if (g.vertices_.size() != n_vertices) throw ConsistencyError("vertex count mismatch in build_level");

  g.edges_.reserve(g.cells_.size() * 3);
  std::vector<int> incidence(g.vertices_.size(), 0);
  for (const auto& cell : g.cells_) {
    const auto& v = cell.ids;
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
      g.edges_.emplace_back(std::min(v[a], v[b]), std::max(v[a], v[b]));
    for (VertexId id : v) ++incidence[id];
  }

  const double share = std::pow(3.0, -(m + 1));
  g.measure_.resize(g.vertices_.size());
  for (std::size_t i = 0; i < incidence.size(); ++i) g.measure_[i] = incidence[i] * share;
  return g;
}

LevelGraph build_subgasket(const Word& w, int m) {
  LevelGraph base = build_level(m);
  LevelGraph g;
  g.level_ = m + static_cast<int>(w.size());
  g.root_ = w;
  g.vertices_ = std::move(base.vertices_);
  g.edges_ = std::move(base.edges_);
  g.cells_ = std::move(base.cells_);
  g.measure_ = std::move(base.measure_);
  for (auto& v : g.vertices_) {
    v.coord = apply_cell_map(w, v.coord);
    v.level_introduced += static_cast<int>(w.size());
    g.index_.emplace(v.coord, v.id);
  }
  for (auto& c : g.cells_) c.word = w.concat(c.word);
  const double scale = std::pow(3.0, -static_cast<double>(w.size()));
  for (double& x : g.measure_) x *= scale;
  return g;
}

double euclidean_distance(const ExactPoint& a, const ExactPoint& b) {
  const double dx = (a.x - b.x).value();
  const double dy = (a.y_sqrt3 - b.y_sqrt3).value();
  return std::sqrt(dx * dx + 3.0 * dy * dy);
}

double euclidean_distance(const Vertex& a, const Vertex& b) { return euclidean_distance(a.coord, b.coord); }

std::vector<VertexId> embed_subcell(const LevelGraph& coarse, const LevelGraph& fine, const Word& w) {
  std::vector<VertexId> out(coarse.dim());
  for (const auto& v : coarse.vertices()) {
    auto id = fine.find(apply_cell_map(w, v.coord));
    if (!id) throw ConsistencyError("cell image of vertex " + std::to_string(v.id) + " missing from finer graph");
    out[static_cast<std::size_t>(v.id)] = *id;
  }
  return out;
}

double ball_mass(const LevelGraph& g, VertexId center, double r) {
  const auto& c = g.vertex(center);
  double mass = 0.0;
  for (const auto& v : g.vertices())
    if (euclidean_distance(c, v) <= r * (1.0 + 1e-12)) mass += g.measure()[static_cast<std::size_t>(v.id)];
  return mass;
}

bool SymmetryMap::is_identity() const {
  for (std::size_t i = 0; i < permutation.size(); ++i)
    if (permutation[i] != static_cast<VertexId>(i)) return false;
  return true;
}

SymmetryMap identity_symmetry(const LevelGraph& g) {
  SymmetryMap s;
  s.permutation.resize(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) s.permutation[i] = static_cast<VertexId>(i);
  return s;
}

SymmetryMap symmetry_permutation(const LevelGraph& g, int index) {
  if (index < 1 || index > 3) throw ParameterError("symmetry index must be 1, 2 or 3");
  if (!g.root().empty()) throw ParameterError("symmetries are defined on the full gasket only");

  SymmetryMap s;
  s.index = index;
  s.permutation.resize(g.dim());
  for (const auto& v : g.vertices()) {
    auto image = g.find(reflect(v.coord, index));
    if (!image) throw ConsistencyError("vertex " + std::to_string(v.id) + " has no mirror image");
    s.permutation[static_cast<std::size_t>(v.id)] = *image;
  }

  std::set<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto [a, b] : g.edges()) {
    const VertexId pa = s(a), pb = s(b);
    if (!edges.contains({std::min(pa, pb), std::max(pa, pb)}))
      throw ConsistencyError("reflection does not preserve the edge set");
  }
  return s;
}

}  // namespace gasket
