#include "pairmn/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairmn/errors.hpp"
#include "pairmn/special.hpp"

namespace pairmn {

namespace {

constexpr double kPinvRelTol = 1e-12;

// Keep subjects with positive totals in both conditions and categories with
// any count in either condition.
PairedCounts filter_paired(const PairedCounts& pc) {
  const int n = pc.n();
  const int d = pc.d();
  std::vector<int> rows;
  for (int i = 0; i < n; ++i) {
    if (pc.counts1.row(i).sum() > 0.0 && pc.counts2.row(i).sum() > 0.0)
      rows.push_back(i);
  }
  std::vector<int> cols;
  for (int j = 0; j < d; ++j) {
    double tot = 0.0;
    for (int i : rows) tot += pc.counts1(i, j) + pc.counts2(i, j);
    if (tot > 0.0) cols.push_back(j);
  }
  PairedCounts out;
  out.counts1.resize(rows.size(), cols.size());
  out.counts2.resize(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.counts1(i, j) = pc.counts1(rows[i], cols[j]);
      out.counts2(i, j) = pc.counts2(rows[i], cols[j]);
    }
  if (!pc.subjects.empty()) {
    for (int i : rows) out.subjects.push_back(pc.subjects[i]);
  }
  return out;
}

}  // namespace

TestResult paired_f_test(const PairedCounts& pc) {
  pc.validate();
  const PairedCounts f = filter_paired(pc);
  const int n = f.n();
  const int d = f.d();
  if (d < 2) throw DegenerateInput("paired_f_test: fewer than 2 nonzero categories");
  if (n <= d) throw InsufficientSamples("paired_f_test: requires n > d");

  const CovEstimate cov = lemma1_covariance(f);
  const Vec delta = cov.pi_bar[0] - cov.pi_bar[1];
  PinvDiag diag;
  SymMatrix pinv(Mat::Zero(d, d));
  try {
    pinv = pinv_truncated(cov.sigma_hat, d - 1, kPinvRelTol, &diag);
  } catch (const ZeroRank&) {
    if (delta.cwiseAbs().maxCoeff() == 0.0) {
      // identical pooled compositions: the quadratic form is 0 no matter
      // which generalized inverse is used
      TestResult r;
      r.statistic = 0.0;
      r.df1 = d - 1;
      r.df2 = n - d + 1;
      r.p_value = 1.0;
      r.effective_n = n;
      r.effective_d = d;
      r.truncated_eigs = d;
      return r;
    }
    throw DegenerateInput("paired_f_test: covariance estimate has zero rank");
  }
  const double quad = delta.transpose() * pinv.mat() * delta;
  const double scale = static_cast<double>(n - d + 1) /
                       (static_cast<double>(n - 1) * static_cast<double>(d - 1));
  TestResult r;
  r.statistic = std::fmax(scale * quad, 0.0);
  r.df1 = d - 1;
  r.df2 = n - d + 1;
  r.p_value = 1.0 - f_cdf(r.statistic, r.df1, r.df2);
  r.effective_n = n;
  r.effective_d = d;
  r.truncated_eigs = diag.truncated_negative + diag.truncated_small;
  return r;
}

TestResult unpaired_dm_test(const Mat& group1, const Mat& group2) {
  if (group1.cols() != group2.cols())
    throw InvalidInput("unpaired_dm_test: groups must share categories");
  const int d = static_cast<int>(group1.cols());

  double c[2];
  Vec pi[2];
  const Mat* groups[2] = {&group1, &group2};
  for (int t = 0; t < 2; ++t) {
    const Mat& g = *groups[t];
    const double theta = dm_theta_moment(g);
    double n_dot = 0.0, sum_sq = 0.0;
    for (int i = 0; i < g.rows(); ++i) {
      const double tot = g.row(i).sum();
      n_dot += tot;
      sum_sq += tot * tot;
    }
    c[t] = (theta * (sum_sq - n_dot) + n_dot) / (n_dot * n_dot);
    pi[t] = pooled_pi(g);
  }

  double stat = 0.0;
  int kept = 0;
  for (int j = 0; j < d; ++j) {
    const double denom = c[0] * pi[0](j) + c[1] * pi[1](j);
    if (denom > 0.0) {
      const double diff = pi[0](j) - pi[1](j);
      stat += diff * diff / denom;
      ++kept;
    }
  }
  if (kept < 2) throw DegenerateInput("unpaired_dm_test: fewer than 2 informative categories");

  TestResult r;
  r.statistic = stat;
  r.df1 = kept - 1;
  r.df2 = 0;
  r.p_value = 1.0 - chisq_cdf(stat, r.df1);
  r.effective_n = static_cast<int>(group1.rows() + group2.rows());
  r.effective_d = kept;
  return r;
}

double fisher_combine(const std::vector<double>& pvals, bool* zero_pvalue) {
  if (zero_pvalue) *zero_pvalue = false;
  const int k = static_cast<int>(pvals.size());
  if (k < 1) throw InsufficientTests("fisher_combine: needs at least one p-value");
  double stat = 0.0;
  for (double p : pvals) {
    if (!(p >= 0.0) || p > 1.0 || !std::isfinite(p))
      throw InvalidInput("fisher_combine: p-values must lie in [0, 1]");
    if (p == 0.0) {
      if (zero_pvalue) *zero_pvalue = true;
      return 0.0;
    }
    stat += -2.0 * std::log(p);
  }
  return 1.0 - chisq_cdf(stat, 2 * k);
}

double second_smallest_combine(const std::vector<double>& pvals,
                               std::optional<int> k_total) {
  const int m = static_cast<int>(pvals.size());
  const int k = k_total.value_or(m);
  if (m < 2 || k < 2)
    throw InsufficientTests("second_smallest_combine: needs at least 2 p-values");
  if (k < m) throw InvalidInput("second_smallest_combine: K smaller than input length");
  for (double p : pvals)
    if (!(p >= 0.0) || p > 1.0 || !std::isfinite(p))
      throw InvalidInput("second_smallest_combine: p-values must lie in [0, 1]");
  std::vector<double> sorted = pvals;
  std::nth_element(sorted.begin(), sorted.begin() + 1, sorted.end());
  const double p2 = sorted[1];
  return 1.0 - (1.0 + (k - 1) * p2) * std::pow(1.0 - p2, k - 1);
}

BhResult bh_fdr(const std::vector<double>& pvals, double q) {
  if (!(q > 0.0) || q >= 1.0) throw InvalidInput("bh_fdr: q must be in (0, 1)");
  const int m = static_cast<int>(pvals.size());
  BhResult out;
  out.rejected.assign(m, false);
  out.adjusted.assign(m, 1.0);
  if (m == 0) return out;
  for (double p : pvals)
    if (!(p >= 0.0) || p > 1.0 || !std::isfinite(p))
      throw InvalidInput("bh_fdr: p-values must lie in [0, 1]");

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return pvals[a] < pvals[b]; });

  // adjusted p: running minimum of p * m / rank from the largest rank down
  double running = 1.0;
  for (int r = m - 1; r >= 0; --r) {
    const double adj = pvals[order[r]] * m / (r + 1);
    running = std::fmin(running, adj);
    out.adjusted[order[r]] = std::fmin(running, 1.0);
  }
  int cutoff = -1;
  for (int r = 0; r < m; ++r) {
    if (pvals[order[r]] <= q * (r + 1) / m) cutoff = r;
  }
  for (int r = 0; r <= cutoff; ++r) out.rejected[order[r]] = true;
  out.n_rejected = cutoff + 1;
  return out;
}

}  // namespace pairmn
