#pragma once

#include <Eigen/Dense>

namespace pairmn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense symmetric matrix; entries are symmetrized on construction so that
// (i,j) == (j,i) holds exactly.
class SymMatrix {
 public:
  explicit SymMatrix(const Mat& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Mat m_;
};

// Eigenvalues sorted descending; columns of `vectors` are the matching
// orthonormal eigenvectors.
struct EigenDecomp {
  Vec values;
  Mat vectors;
};

// Symmetric eigendecomposition. Throws InvalidInput on non-finite entries.
EigenDecomp sym_eig(const SymMatrix& a);

struct PinvDiag {
  int retained = 0;           // eigenvalues actually inverted
  int truncated_negative = 0; // negative eigenvalues zeroed
  int truncated_small = 0;    // below rel_tol * lambda_max, or over rank cap
};

// Truncated Moore-Penrose pseudoinverse: eigenvalues <= rel_tol * lambda_max
// (and all negative ones) are treated as zero, and at most `rank_cap`
// eigenvalues are inverted, largest first. Throws ZeroRank when nothing
// survives truncation.
SymMatrix pinv_truncated(const SymMatrix& a, int rank_cap, double rel_tol,
                         PinvDiag* diag = nullptr);

}  // namespace pairmn
