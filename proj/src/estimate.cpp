#include "pairmn/estimate.hpp"

#include <cmath>

#include "pairmn/errors.hpp"

namespace pairmn {

namespace {

struct GroupBlocks {
  Mat s, g;
  Mat pit;      // per-subject proportions, one row each
  Vec totals;   // N_it
  Vec pi_bar;
  double n_dot = 0.0;
  double n_c = 0.0;
  double sum_sq = 0.0;
  int n = 0;
};

// S_t, G_t, N_.t, N_ct for one condition. Summation runs over subjects in
// ascending index order so results are bit-stable under re-runs.
GroupBlocks group_blocks(const Mat& counts) {
  const int n = static_cast<int>(counts.rows());
  const int d = static_cast<int>(counts.cols());
  if (n < 2) throw InsufficientSamples("covariance estimator needs n >= 2");
  GroupBlocks b;
  b.n = n;
  b.totals.resize(n);
  b.pit.resize(n, d);
  for (int i = 0; i < n; ++i) {
    double tot = 0.0;
    for (int j = 0; j < d; ++j) {
      const double c = counts(i, j);
      if (c < 0.0 || !std::isfinite(c))
        throw InvalidInput("counts must be finite and >= 0");
      tot += c;
    }
    if (!(tot > 0.0))
      throw InvalidInput("covariance estimator requires every row total > 0");
    b.totals(i) = tot;
    b.pit.row(i) = counts.row(i) / tot;
    b.n_dot += tot;
    b.sum_sq += tot * tot;
  }
  if (b.n_dot <= static_cast<double>(n))
    throw DegenerateInput("all row totals are 1; G_t undefined");
  b.n_c = (b.n_dot * b.n_dot - b.sum_sq) / ((n - 1) * b.n_dot);
  b.pi_bar = counts.colwise().sum().transpose() / b.n_dot;

  b.s = Mat::Zero(d, d);
  b.g = Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Vec dev = b.pit.row(i).transpose() - b.pi_bar;
    const Vec pi = b.pit.row(i).transpose();
    b.s.noalias() += b.totals(i) * (dev * dev.transpose());
    b.g.noalias() += b.totals(i) * (Mat(pi.asDiagonal()) - pi * pi.transpose());
  }
  b.s /= (n - 1);
  b.g /= (b.n_dot - n);
  return b;
}

Mat group_term(const GroupBlocks& b) {
  return (b.s + (b.n_c - 1.0) * b.g) / (b.n_c * b.n_dot) +
         (b.sum_sq - b.n_dot) / (b.n_c * b.n_dot * b.n_dot) * (b.s - b.g);
}

}  // namespace

void PairedCounts::validate() const {
  if (counts1.rows() != counts2.rows() || counts1.cols() != counts2.cols())
    throw InvalidInput("PairedCounts: condition matrices must share shape");
  if (!subjects.empty() && static_cast<int>(subjects.size()) != n())
    throw InvalidInput("PairedCounts: subject label count mismatch");
  if ((counts1.array() < 0.0).any() || (counts2.array() < 0.0).any())
    throw InvalidInput("PairedCounts: counts must be >= 0");
}

Vec pooled_pi(const Mat& counts) {
  if (counts.rows() < 1 || counts.cols() < 1)
    throw InvalidInput("pooled_pi: empty counts");
  if ((counts.array() < 0.0).any())
    throw InvalidInput("pooled_pi: counts must be >= 0");
  const double total = counts.sum();
  if (!(total > 0.0)) throw DegenerateInput("pooled_pi: all counts zero");
  return counts.colwise().sum().transpose() / total;
}

CovEstimate lemma1_covariance(const PairedCounts& pc) {
  pc.validate();
  const int n = pc.n();
  const int d = pc.d();
  const GroupBlocks b1 = group_blocks(pc.counts1);
  const GroupBlocks b2 = group_blocks(pc.counts2);

  Mat s12 = Mat::Zero(d, d);
  double sum_cross = 0.0;
  const double nc_sum = b1.n_c + b2.n_c;
  for (int i = 0; i < n; ++i) {
    const Vec dev1 = b1.pit.row(i).transpose() - b1.pi_bar;
    const Vec dev2 = b2.pit.row(i).transpose() - b2.pi_bar;
    s12.noalias() += (b1.totals(i) + b2.totals(i)) / nc_sum * (dev1 * dev2.transpose());
    sum_cross += b1.totals(i) * b2.totals(i);
  }
  s12 /= (n - 1);

  Mat sigma = group_term(b1) + group_term(b2) -
              sum_cross / (b1.n_dot * b2.n_dot) * (s12 + s12.transpose());

  CovEstimate out{SymMatrix(sigma),
                  {b1.s, b2.s},
                  {b1.g, b2.g},
                  s12,
                  {b1.n_dot, b2.n_dot},
                  {b1.n_c, b2.n_c},
                  {b1.sum_sq, b2.sum_sq},
                  sum_cross,
                  {b1.pi_bar, b2.pi_bar},
                  {n, n}};
  return out;
}

CovEstimate unpaired_covariance(const Mat& group1, const Mat& group2) {
  if (group1.cols() != group2.cols())
    throw InvalidInput("unpaired_covariance: groups must share categories");
  const GroupBlocks b1 = group_blocks(group1);
  const GroupBlocks b2 = group_blocks(group2);
  const int d = static_cast<int>(group1.cols());
  Mat sigma = group_term(b1) + group_term(b2);
  CovEstimate out{SymMatrix(sigma),
                  {b1.s, b2.s},
                  {b1.g, b2.g},
                  Mat::Zero(d, d),
                  {b1.n_dot, b2.n_dot},
                  {b1.n_c, b2.n_c},
                  {b1.sum_sq, b2.sum_sq},
                  0.0,
                  {b1.pi_bar, b2.pi_bar},
                  {b1.n, b2.n}};
  return out;
}

double dm_theta_moment(const Mat& counts) {
  const GroupBlocks b = group_blocks(counts);
  const double tr_s = b.s.trace();
  const double tr_g = b.g.trace();
  const double denom = tr_s + (b.n_c - 1.0) * tr_g;
  if (!(denom > 0.0))
    throw DegenerateInput("dm_theta_moment: zero trace denominator");
  const double theta = (tr_s - tr_g) / denom;
  return std::fmin(std::fmax(theta, 0.0), 1.0 - 1e-9);
}

}  // namespace pairmn
