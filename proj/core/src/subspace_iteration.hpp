#pragma once

#include "gasket/dirichlet.hpp"
#include "gasket/spectral.hpp"

namespace gasket::detail {

struct RawEigenpairs {
  Vector lambdas;
  Matrix vectors;
  int iterations = 0;
  double residual = 0.0;
};

/// Block shift-invert subspace iteration with Rayleigh-Ritz: the `wanted`
/// smallest eigenpairs of S x = λ M x using products with S, solves with
/// S - σM, and M-inner products only. Vectors are M-orthonormal.
RawEigenpairs shift_invert_subspace(const SparseMatrix& s, const Vector& mass, int wanted, double tol,
                                    const EigenOptions& opts);

}  // namespace gasket::detail
