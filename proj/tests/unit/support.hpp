#pragma once

#include <map>
#include <memory>

#include "gasket/dirichlet.hpp"
#include "gasket/geometry.hpp"
#include "gasket/spectral.hpp"

namespace gasket::test {

// Full dense spectrum of V_m, solved once per level and shared by a test binary.
inline const SpectralBasis& full_basis(int m) {
  static std::map<int, std::unique_ptr<SpectralBasis>> cache;
  auto& slot = cache[m];
  if (!slot) {
    const LevelGraph g = build_level(m);
    slot = std::make_unique<SpectralBasis>(
        solve_eigen(assemble_energy(g), assemble_mass(g), static_cast<int>(g.dim()) - 1, 1e-9));
  }
  return *slot;
}

inline const LevelGraph& graph(int m) {
  static std::map<int, std::unique_ptr<LevelGraph>> cache;
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<LevelGraph>(build_level(m));
  return *slot;
}

inline VertexId corner_id(const LevelGraph& g, int i) { return *g.find(corner(i)); }

}  // namespace gasket::test
