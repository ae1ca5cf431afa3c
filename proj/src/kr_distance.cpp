#include "pairmn/kr_distance.hpp"

#include <cmath>

#include "pairmn/errors.hpp"

namespace pairmn {

Vec remainder_profile(const TaxTree& tree, const CountVec& q) {
  if (q.size() != tree.size())
    throw InvalidInput("remainder_profile: size must equal node count");
  const long long root_total = q(tree.root());
  if (root_total <= 0) throw DegenerateInput("remainder_profile: zero root total");
  Vec p(tree.size());
  for (int k = 0; k < tree.size(); ++k) {
    long long rem = q(k);
    for (int c : tree.node(k).children) rem -= q(c);
    p(k) = static_cast<double>(rem) / static_cast<double>(root_total);
  }
  return p;
}

double kr_distance(const TaxTree& tree, const CountVec& qa, const CountVec& qb) {
  const Vec pa = remainder_profile(tree, qa);
  const Vec pb = remainder_profile(tree, qb);
  return (pa - pb).cwiseAbs().sum();
}

Mat kr_distance_matrix(const TaxTree& tree, const CountMat& q_rows) {
  const int m = static_cast<int>(q_rows.rows());
  std::vector<Vec> profiles;
  profiles.reserve(m);
  for (int i = 0; i < m; ++i)
    profiles.push_back(remainder_profile(tree, q_rows.row(i).transpose()));
  Mat d = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double dist = (profiles[i] - profiles[j]).cwiseAbs().sum();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  return d;
}

}  // namespace pairmn
