#include "pairmn/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pairmn/errors.hpp"

namespace pairmn {

SymMatrix::SymMatrix(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInput("SymMatrix: matrix must be square with dim >= 1");
  m_ = 0.5 * (m + m.transpose());
}

EigenDecomp sym_eig(const SymMatrix& a) {
  if (!a.mat().allFinite()) throw InvalidInput("sym_eig: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> solver(a.mat());
  if (solver.info() != Eigen::Success)
    throw InvalidInput("sym_eig: eigendecomposition failed");
  // Eigen returns ascending order; flip to descending.
  const int d = a.dim();
  EigenDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(d, d);
  for (int j = 0; j < d; ++j) out.vectors.col(j) = solver.eigenvectors().col(d - 1 - j);
  return out;
}

SymMatrix pinv_truncated(const SymMatrix& a, int rank_cap, double rel_tol,
                         PinvDiag* diag) {
  if (rank_cap < 0) throw InvalidInput("pinv_truncated: rank_cap must be >= 0");
  if (!(rel_tol > 0.0)) throw InvalidInput("pinv_truncated: rel_tol must be > 0");
  const EigenDecomp eig = sym_eig(a);
  const int d = a.dim();
  const double lambda_max = eig.values.size() > 0 ? eig.values(0) : 0.0;
  const double cut = lambda_max > 0.0 ? rel_tol * lambda_max : 0.0;

  PinvDiag local;
  Vec inv = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    const double lam = eig.values(j);
    if (lam < 0.0) {
      ++local.truncated_negative;
    } else if (lam <= cut || local.retained >= rank_cap) {
      ++local.truncated_small;
    } else {
      inv(j) = 1.0 / lam;
      ++local.retained;
    }
  }
  if (diag) *diag = local;
  if (local.retained == 0)
    throw ZeroRank("pinv_truncated: all eigenvalues truncated");
  Mat p = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  return SymMatrix(p);
}

}  // namespace pairmn
