#pragma once

#include "pairmn/rng.hpp"
#include "pairmn/taxtree.hpp"

namespace pairmn {

// Resampling pool for the tree simulations: per-sample remainder-proportion
// profiles over all nodes plus per-sample read totals.
struct TreeReference {
  TaxTree tree;
  Mat compositions;               // n_samples x K0, rows sum to 1
  std::vector<long long> totals;  // n_samples

  int n_samples() const { return static_cast<int>(compositions.rows()); }
  void validate() const;
};

struct SyntheticRefParams {
  int n_samples = 200;
  double log_sigma = 1.1;        // per-node log-normal spread around the template
  long long total_base = 400;    // totals are base + Poisson(total_mean)
  double total_mean = 400.0;
  std::uint64_t seed = 4280;
};

// A synthetic stand-in for a real 16S reference cohort: a fixed ~850-node
// taxonomy (kingdom through genus, species under Streptococcus) with sample
// profiles drawn log-normally around a built-in abundance template. Fully
// deterministic in the seed.
TreeReference make_synthetic_reference(const SyntheticRefParams& params);

// Builds a reference pool from observed per-sample assigned counts on a tree
// (rows of `assigned` are samples). Samples with zero totals are rejected.
TreeReference reference_from_counts(const TaxTree& tree, const CountMat& assigned);

}  // namespace pairmn
