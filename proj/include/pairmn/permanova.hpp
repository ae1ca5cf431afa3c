#pragma once

#include <utility>
#include <vector>

#include "pairmn/linalg.hpp"
#include "pairmn/rng.hpp"

namespace pairmn {

struct PermanovaResult {
  double f_statistic = 0.0;
  double p_value = 1.0;
  int n_perm = 0;
};

// Distance-based pseudo-F test of a two-level condition factor on paired
// samples. `pairs[i]` holds the distance-matrix indices of subject i's two
// condition units. The null distribution comes from independently swapping
// the two condition labels within each pair; p = (1 + #{F* >= F}) /
// (1 + n_perm). Sums of squares use the Gower-centered squared-distance
// matrix.
PermanovaResult permanova_paired(const Mat& distances,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 int n_perm, RngStream& rng);

}  // namespace pairmn
