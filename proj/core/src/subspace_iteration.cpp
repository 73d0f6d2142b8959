#include "subspace_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "gasket/errors.hpp"

namespace gasket::detail {

namespace {

// Cholesky-QR in the M-inner product, applied twice for stability.
void m_orthonormalize(Matrix& z, const Vector& mass) {
  for (int pass = 0; pass < 2; ++pass) {
    const Matrix gram = z.transpose() * mass.asDiagonal() * z;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw SolverError("subspace lost rank during orthonormalization", INFINITY);
    z = llt.matrixU().solve<Eigen::OnTheRight>(z);
  }
}

}  // namespace

RawEigenpairs shift_invert_subspace(const SparseMatrix& s, const Vector& mass, int wanted, double tol,
                                    const EigenOptions& opts) {
  const Eigen::Index n = s.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, wanted + std::max(12, wanted / 2));

  const SparseMatrix shifted = s - opts.shift * SparseMatrix(mass.asDiagonal());
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw SolverError("factorization of S - shift*M failed", INFINITY);

  std::mt19937_64 rng(opts.start_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix q(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = unif(rng);
  m_orthonormalize(q, mass);

  const Vector inv_sqrt_mass = mass.cwiseSqrt().cwiseInverse();
  RawEigenpairs out;
  double achieved = INFINITY;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    Matrix z = solver.solve(mass.asDiagonal() * q);
    m_orthonormalize(z, mass);

    const Matrix sz = s * z;
    Matrix projected = z.transpose() * sz;
    projected = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(projected);
    q = z * ritz.eigenvectors();
    const Matrix sq = sz * ritz.eigenvectors();
    const Vector& theta = ritz.eigenvalues();

    // Residuals relative to the first nonzero Ritz value for the null mode.
    const double floor = std::max(theta[std::min<Eigen::Index>(1, block - 1)], 1e-300);
    achieved = 0.0;
    for (int j = 0; j < wanted; ++j) {
      const Vector r = inv_sqrt_mass.asDiagonal() * (sq.col(j) - theta[j] * mass.asDiagonal() * q.col(j));
      achieved = std::max(achieved, r.norm() / std::max(std::abs(theta[j]), floor));
    }
    out.iterations = it;
    if (achieved <= 0.25 * tol) break;
  }

  out.residual = achieved;
  if (!(achieved <= tol))
    throw SolverError("shift-invert subspace iteration did not converge: residual " + std::to_string(achieved), achieved);

  out.vectors = q.leftCols(wanted);
  out.lambdas = (out.vectors.transpose() * (s * out.vectors)).diagonal();
  return out;
}

}  // namespace gasket::detail
