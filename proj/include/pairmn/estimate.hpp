#pragma once

#include <string>
#include <vector>

#include "pairmn/linalg.hpp"

namespace pairmn {

// n paired count vectors: counts1(i,.) and counts2(i,.) are subject i's two
// conditions. Row totals may differ per subject and condition.
struct PairedCounts {
  Mat counts1, counts2;
  std::vector<std::string> subjects;  // optional labels, size n or empty

  int n() const { return static_cast<int>(counts1.rows()); }
  int d() const { return static_cast<int>(counts1.cols()); }
  void validate() const;
};

// Output of the covariance estimator with all building blocks kept for
// inspection: sigma_hat = sum_t {(S_t+(N_ct-1)G_t)/(N_ct N_.t)
// + (sum_i N_it^2 - N_.t)/(N_ct N_.t^2) (S_t-G_t)}
// - (sum_i N_i1 N_i2/(N_.1 N_.2)) (S12 + S12^T).
struct CovEstimate {
  SymMatrix sigma_hat;
  Mat s[2], g[2];
  Mat sigma12_hat;       // zero matrix for the unpaired variant
  double n_dot[2];       // sum of totals per condition
  double n_c[2];         // the N_ct scalars
  double sum_sq[2];      // sum_i N_it^2
  double sum_cross;      // sum_i N_i1 N_i2 (0 for unpaired)
  Vec pi_bar[2];         // pooled proportions per condition
  int n_used[2];         // subjects entering each condition
};

// Pooled proportions: column sums normalized by the grand total.
Vec pooled_pi(const Mat& counts);

// The paired covariance estimator. Requires n >= 2 and every row total > 0
// in both conditions (callers filter zero-total rows first).
CovEstimate lemma1_covariance(const PairedCounts& pc);

// Unpaired variant: per-group blocks, no cross term. Groups may differ in
// size; each needs n_t >= 2 and positive row totals.
CovEstimate unpaired_covariance(const Mat& group1, const Mat& group2);

// Method-of-moments overdispersion estimate for the Dirichlet-multinomial
// baseline, clamped to [0, 1 - 1e-9].
double dm_theta_moment(const Mat& counts);

}  // namespace pairmn
