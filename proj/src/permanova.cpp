#include "pairmn/permanova.hpp"

#include <cmath>
#include <limits>

#include "pairmn/errors.hpp"

namespace pairmn {

namespace {

// Pseudo-F for a balanced two-group labeling given the Gower matrix.
// `sel[i]` picks which element of pair i belongs to group 1.
double pseudo_f(const Mat& gower, const std::vector<std::pair<int, int>>& pairs,
                const std::vector<bool>& sel) {
  const int n = static_cast<int>(pairs.size());
  const int total = 2 * n;
  double ss1 = 0.0, ss2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const int a_i = sel[i] ? pairs[i].second : pairs[i].first;
    const int b_i = sel[i] ? pairs[i].first : pairs[i].second;
    for (int j = 0; j < n; ++j) {
      const int a_j = sel[j] ? pairs[j].second : pairs[j].first;
      const int b_j = sel[j] ? pairs[j].first : pairs[j].second;
      ss1 += gower(a_i, a_j);
      ss2 += gower(b_i, b_j);
    }
  }
  const double ss_among = ss1 / n + ss2 / n;
  const double ss_total = gower.trace();
  const double ss_within = ss_total - ss_among;
  if (ss_within <= 0.0)
    return ss_among > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return (ss_among / 1.0) / (ss_within / (total - 2));
}

}  // namespace

PermanovaResult permanova_paired(const Mat& distances,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 int n_perm, RngStream& rng) {
  const int m = static_cast<int>(distances.rows());
  if (distances.cols() != m || m < 4)
    throw InvalidInput("permanova_paired: distance matrix must be square, >= 4 units");
  if (n_perm < 99) throw InvalidInput("permanova_paired: n_perm must be >= 99");
  const int n = static_cast<int>(pairs.size());
  if (2 * n != m)
    throw InvalidInput("permanova_paired: pairs must cover the distance matrix");
  std::vector<bool> used(m, false);
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a >= m || b < 0 || b >= m || used[a] || used[b] || a == b)
      throw InvalidInput("permanova_paired: invalid pair indices");
    used[a] = used[b] = true;
  }
  for (int i = 0; i < m; ++i) {
    if (distances(i, i) != 0.0)
      throw InvalidInput("permanova_paired: nonzero diagonal");
    for (int j = i + 1; j < m; ++j) {
      const double dij = distances(i, j);
      if (!std::isfinite(dij) || dij < 0.0 ||
          std::fabs(dij - distances(j, i)) > 1e-9 * std::fmax(1.0, std::fabs(dij)))
        throw InvalidInput("permanova_paired: distances must be symmetric, finite, >= 0");
    }
  }

  // Gower-centered matrix of -d^2/2
  Mat a = -0.5 * distances.cwiseProduct(distances);
  const Vec row_mean = a.rowwise().mean();
  const double grand = a.mean();
  Mat gower(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      gower(i, j) = a(i, j) - row_mean(i) - row_mean(j) + grand;

  std::vector<bool> sel(n, false);
  const double f_obs = pseudo_f(gower, pairs, sel);

  int count_ge = 0;
  for (int b = 0; b < n_perm; ++b) {
    for (int i = 0; i < n; ++i) sel[i] = (rng.next_u64() & 1ULL) != 0;
    if (pseudo_f(gower, pairs, sel) >= f_obs) ++count_ge;
  }
  PermanovaResult r;
  r.f_statistic = f_obs;
  r.n_perm = n_perm;
  r.p_value = static_cast<double>(1 + count_ge) / static_cast<double>(1 + n_perm);
  return r;
}

}  // namespace pairmn
