#include "gasket/dirichlet.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

#include "gasket/errors.hpp"

namespace gasket {

StiffnessMatrix assemble_energy(const LevelGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  const double c = std::pow(kEnergyRatio, g.level());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edges().size() * 2 + g.dim());
  std::vector<double> diag(g.dim(), 0.0);
  for (auto [a, b] : g.edges()) {
    triplets.emplace_back(a, b, -c);
    triplets.emplace_back(b, a, -c);
    diag[static_cast<std::size_t>(a)] += c;
    diag[static_cast<std::size_t>(b)] += c;
  }
  // Diagonal is the negated off-diagonal row sum, so rows sum to zero exactly.
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[static_cast<std::size_t>(i)]);

  StiffnessMatrix s;
  s.level = g.level();
  s.prefactor = c;
  s.entries.resize(n, n);
  s.entries.setFromTriplets(triplets.begin(), triplets.end());
  s.entries.makeCompressed();
  return s;
}

MassMatrix assemble_mass(const LevelGraph& g) {
  MassMatrix m;
  m.level = g.level();
  m.diagonal = Eigen::Map<const Vector>(g.measure().data(), static_cast<Eigen::Index>(g.dim()));
  return m;
}

double energy_value(const StiffnessMatrix& s, const Eigen::Ref<const Vector>& f) {
  if (f.size() != s.dim())
    throw DimensionError("vector of size " + std::to_string(f.size()) + " does not match stiffness dimension " +
                         std::to_string(s.dim()));
  return f.dot(s.entries * f);
}

namespace {

double edge_sum(const LevelGraph& g, const std::vector<VertexId>& ids, const Eigen::Ref<const Vector>& f) {
  double e = 0.0;
  for (auto [a, b] : g.edges()) {
    const double d = f[ids[static_cast<std::size_t>(a)]] - f[ids[static_cast<std::size_t>(b)]];
    e += d * d;
  }
  return e;
}

}  // namespace

double self_similar_energy_residual(const LevelGraph& fine, const Eigen::Ref<const Vector>& f) {
  if (fine.level() < 1) throw BoundsError("self-similar identity needs level >= 1");
  if (!fine.root().empty()) throw ParameterError("self-similar identity is stated on the full gasket graph");
  if (static_cast<std::size_t>(f.size()) != fine.dim()) throw DimensionError("vector does not match graph");

  const int m = fine.level() - 1;
  const LevelGraph coarse = build_level(m);
  const double whole = energy_value(assemble_energy(fine), f);

  double parts = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto ids = embed_subcell(coarse, fine, Word{i});
    parts += std::pow(kEnergyRatio, m) * edge_sum(coarse, ids, f);
  }
  return std::abs(whole - kEnergyRatio * parts);
}

Vector harmonic_extension(const LevelGraph& fine, const Eigen::Ref<const Vector>& coarse_values) {
  const auto n_fixed = coarse_values.size();
  const auto n = static_cast<Eigen::Index>(fine.dim());
  if (n_fixed <= 0 || n_fixed > n) throw DimensionError("coarse vector does not embed into the finer graph");

  const StiffnessMatrix s = assemble_energy(fine);
  const Eigen::Index n_free = n - n_fixed;
  Vector out(n);
  out.head(n_fixed) = coarse_values;
  if (n_free == 0) return out;

  // Stationarity on free vertices: S_ff u = -S_fc c.
  const SparseMatrix s_ff = s.entries.bottomRightCorner(n_free, n_free);
  const SparseMatrix s_fc = s.entries.bottomLeftCorner(n_free, n_fixed);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(s_ff);
  if (ldlt.info() != Eigen::Success) throw ConsistencyError("interior energy block is singular");
  out.tail(n_free) = ldlt.solve(-(s_fc * coarse_values));
  return out;
}

}  // namespace gasket
