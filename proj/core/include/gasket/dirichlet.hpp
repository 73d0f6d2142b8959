#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gasket/constants.hpp"
#include "gasket/geometry.hpp"
#include "gasket/summation.hpp"

namespace gasket {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Renormalized graph energy E_m as a symmetric matrix:
/// fᵀ S f = (5/3)^m Σ_{edges (x,y)} (f(x) - f(y))².
struct StiffnessMatrix {
  int level = 0;
  double prefactor = 1.0;
  SparseMatrix entries;

  [[nodiscard]] Eigen::Index dim() const { return entries.rows(); }
};

/// Lumped mass: each cell's measure split equally among its corners.
struct MassMatrix {
  int level = 0;
  Vector diagonal;

  [[nodiscard]] Eigen::Index dim() const { return diagonal.size(); }
  [[nodiscard]] double trace() const {
    return compensated_sum(std::span<const double>(diagonal.data(), static_cast<std::size_t>(diagonal.size())));
  }
};

[[nodiscard]] StiffnessMatrix assemble_energy(const LevelGraph& g);
[[nodiscard]] MassMatrix assemble_mass(const LevelGraph& g);

/// fᵀ S f; throws DimensionError on size mismatch.
[[nodiscard]] double energy_value(const StiffnessMatrix& s, const Eigen::Ref<const Vector>& f);

/// |E_{m+1}(f) - (5/3) Σ_i E_m(f ∘ F_i)| for f on the full-gasket graph
/// `fine` (level >= 1).
[[nodiscard]] double self_similar_energy_residual(const LevelGraph& fine, const Eigen::Ref<const Vector>& f);

/// Minimizes E_{m+1} over the vertices of `fine` introduced at its level,
/// keeping the values of V_m (ids below coarse_values.size()) fixed.
[[nodiscard]] Vector harmonic_extension(const LevelGraph& fine, const Eigen::Ref<const Vector>& coarse_values);

}  // namespace gasket
