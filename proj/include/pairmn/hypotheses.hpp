#pragma once

#include <optional>
#include <vector>

#include "pairmn/estimate.hpp"

namespace pairmn {

struct TestResult {
  double statistic = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p_value = 1.0;
  int effective_n = 0;
  int effective_d = 0;
  int truncated_eigs = 0;
};

// Hotelling-type F test for equality of paired compositions. Zero-total
// rows and all-zero categories are dropped first; the covariance
// pseudoinverse is truncated at rank d-1.
TestResult paired_f_test(const PairedCounts& pc);

// Chi-square test for two independent groups under the
// Dirichlet-multinomial baseline. Categories with zero pooled proportion in
// both groups are dropped with matching df reduction.
TestResult unpaired_dm_test(const Mat& group1, const Mat& group2);

// Fisher combination 1 - chisq_cdf(-2 sum log p, 2K). A zero p-value makes
// the statistic singular; the result is 0 and *zero_pvalue is set when
// provided.
double fisher_combine(const std::vector<double>& pvals, bool* zero_pvalue = nullptr);

// Second-smallest-p combination: 1 - [1+(K-1)p(2)](1-p(2))^{K-1}. K taken
// from the input length unless given explicitly (K >= length >= 2).
double second_smallest_combine(const std::vector<double>& pvals,
                               std::optional<int> k_total = std::nullopt);

struct BhResult {
  std::vector<bool> rejected;
  std::vector<double> adjusted;
  int n_rejected = 0;
};

// Benjamini-Hochberg step-up at level q with monotone adjusted p-values.
BhResult bh_fdr(const std::vector<double>& pvals, double q);

}  // namespace pairmn
