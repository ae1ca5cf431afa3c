#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pairmn/errors.hpp"
#include "pairmn/hypotheses.hpp"
#include "pairmn/model.hpp"
#include "pairmn/samplers.hpp"
#include "pairmn/special.hpp"

using namespace pairmn;

namespace {

Vec vec8(std::initializer_list<double> v) {
  Vec out(8);
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MixedDirichletParams paper_params(double rho, bool alternative) {
  const Vec pi1 = vec8({0.15, 0.05, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08});
  const Vec pi2 = alternative ? vec8({0.1, 0.1, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08}) : pi1;
  const Vec ell = vec8({0.12, 0.06, 0.08, 0.43, 0.02, 0.14, 0.1, 0.05});
  MixedDirichletParams p;
  p.ell = ell;
  p.alpha1 = (pi1 - rho * ell) / (1.0 - rho);
  p.alpha2 = (pi2 - rho * ell) / (1.0 - rho);
  p.rho = rho;
  p.theta_mode = ThetaMode::kConcentrationTotal;
  p.theta_a1 = 3.0;
  p.theta_a2 = 5.0;
  p.theta_ell = 1.0;
  return p;
}

PairedCounts sample_dataset(const MixedDirichletParams& p, int n, RngStream& rng) {
  const int d = p.dim();
  PairedCounts pc;
  pc.counts1.resize(n, d);
  pc.counts2.resize(n, d);
  for (int i = 0; i < n; ++i) {
    long long n1 = 0, n2 = 0;
    while (n1 == 0) n1 = sample_poisson(1000.0, rng);
    while (n2 == 0) n2 = sample_poisson(1000.0, rng);
    const PairedCountDraw draw = sample_pairmn_mixed_dirichlet(p, n1, n2, rng);
    for (int j = 0; j < d; ++j) {
      pc.counts1(i, j) = static_cast<double>(draw.x1[j]);
      pc.counts2(i, j) = static_cast<double>(draw.x2[j]);
    }
  }
  return pc;
}

}  // namespace

TEST_CASE("identical conditions give F=0, p=1") {
  RngStream rng(81);
  PairedCounts pc;
  pc.counts1.resize(12, 4);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 4; ++j)
      pc.counts1(i, j) = static_cast<double>(1 + rng.next_u64() % 30);
  pc.counts2 = pc.counts1;
  const TestResult r = paired_f_test(pc);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK(r.effective_n == 12);
  CHECK(r.effective_d == 4);
}

TEST_CASE("hand dataset reproduces the independent formula chain") {
  RngStream rng(82);
  const MixedDirichletParams p = paper_params(0.3, true);
  for (int trial = 0; trial < 25; ++trial) {
    // n=10, d=3 datasets with all-positive rows
    PairedCounts pc;
    pc.counts1.resize(10, 3);
    pc.counts2.resize(10, 3);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 3; ++j) {
        pc.counts1(i, j) = static_cast<double>(1 + rng.next_u64() % 50);
        pc.counts2(i, j) = static_cast<double>(1 + rng.next_u64() % 50);
      }
    const TestResult r = paired_f_test(pc);
    const double f_ref = oracle::direct_paired_f(pc.counts1, pc.counts2);
    CHECK(r.statistic == doctest::Approx(f_ref).epsilon(1e-8));
    CHECK(r.df1 == 2);
    CHECK(r.df2 == 8);
    CHECK(r.p_value ==
          doctest::Approx(1.0 - f_cdf(r.statistic, r.df1, r.df2)).epsilon(1e-12));
  }
}

TEST_CASE("zero-count categories are dropped with df reduction") {
  RngStream rng(83);
  PairedCounts pc;
  pc.counts1.resize(10, 5);
  pc.counts2.resize(10, 5);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) {
      pc.counts1(i, j) = j == 2 ? 0.0 : static_cast<double>(1 + rng.next_u64() % 40);
      pc.counts2(i, j) = j == 2 ? 0.0 : static_cast<double>(1 + rng.next_u64() % 40);
    }
  const TestResult r = paired_f_test(pc);
  CHECK(r.effective_d == 4);
  CHECK(r.df1 == 3);
  CHECK(r.df2 == 10 - 4 + 1);
}

TEST_CASE("zero-total rows are dropped before testing") {
  RngStream rng(84);
  PairedCounts pc;
  pc.counts1.resize(10, 3);
  pc.counts2.resize(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 3; ++j) {
      pc.counts1(i, j) = static_cast<double>(1 + rng.next_u64() % 40);
      pc.counts2(i, j) = static_cast<double>(1 + rng.next_u64() % 40);
    }
  pc.counts1.row(4).setZero();
  const TestResult r = paired_f_test(pc);
  CHECK(r.effective_n == 9);
}

TEST_CASE("insufficient samples and degenerate cases raise") {
  PairedCounts pc;
  pc.counts1 = Mat::Ones(3, 5);
  pc.counts2 = Mat::Ones(3, 5);
  CHECK_THROWS_AS(paired_f_test(pc), InsufficientSamples);

  PairedCounts zero;
  zero.counts1 = Mat::Zero(8, 3);
  zero.counts2 = Mat::Zero(8, 3);
  CHECK_THROWS_AS(paired_f_test(zero), DegenerateInput);
}

TEST_CASE("statistic is invariant to subject relabeling and category permutation") {
  RngStream rng(85);
  const MixedDirichletParams p = paper_params(0.3, true);
  PairedCounts pc = sample_dataset(p, 30, rng);
  const TestResult base = paired_f_test(pc);

  // subject relabeling
  PairedCounts shuffled = pc;
  std::vector<int> order(30);
  for (int i = 0; i < 30; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937(7));
  for (int i = 0; i < 30; ++i) {
    shuffled.counts1.row(i) = pc.counts1.row(order[i]);
    shuffled.counts2.row(i) = pc.counts2.row(order[i]);
  }
  const TestResult perm = paired_f_test(shuffled);
  CHECK(perm.statistic == doctest::Approx(base.statistic).epsilon(1e-10));

  // simultaneous category permutation
  PairedCounts cols = pc;
  std::vector<int> cp{3, 0, 6, 1, 7, 2, 5, 4};
  for (int j = 0; j < 8; ++j) {
    cols.counts1.col(j) = pc.counts1.col(cp[j]);
    cols.counts2.col(j) = pc.counts2.col(cp[j]);
  }
  const TestResult permc = paired_f_test(cols);
  CHECK(permc.statistic == doctest::Approx(base.statistic).epsilon(1e-10));

  // condition swap
  PairedCounts swapped;
  swapped.counts1 = pc.counts2;
  swapped.counts2 = pc.counts1;
  const TestResult sw = paired_f_test(swapped);
  CHECK(sw.statistic == doctest::Approx(base.statistic).epsilon(1e-10));
  CHECK(sw.p_value == doctest::Approx(base.p_value).epsilon(1e-10));
}

TEST_CASE("null size stays near nominal for correlated pairs (smoke scale)") {
  RngStream rng(86);
  const MixedDirichletParams p = paper_params(0.3, false);
  const int reps = 400;
  int rejected = 0;
  for (int r = 0; r < reps; ++r) {
    const PairedCounts pc = sample_dataset(p, 100, rng);
    if (paired_f_test(pc).p_value < 0.05) ++rejected;
  }
  const double rate = static_cast<double>(rejected) / reps;
  CHECK(rate > 0.02);
  CHECK(rate < 0.09);
}

TEST_CASE("p-values are uniform under a fixed-composition multinomial null") {
  RngStream rng(87);
  Vec prob(5);
  prob << 0.3, 0.25, 0.2, 0.15, 0.1;
  const int reps = 500;
  std::vector<double> pvals;
  for (int r = 0; r < reps; ++r) {
    PairedCounts pc;
    pc.counts1.resize(100, 5);
    pc.counts2.resize(100, 5);
    for (int i = 0; i < 100; ++i) {
      long long n1 = 0, n2 = 0;
      while (n1 == 0) n1 = sample_poisson(1000.0, rng);
      while (n2 == 0) n2 = sample_poisson(1000.0, rng);
      const auto x1 = sample_multinomial(n1, prob, rng);
      const auto x2 = sample_multinomial(n2, prob, rng);
      for (int j = 0; j < 5; ++j) {
        pc.counts1(i, j) = static_cast<double>(x1[j]);
        pc.counts2(i, j) = static_cast<double>(x2[j]);
      }
    }
    pvals.push_back(paired_f_test(pc).p_value);
  }
  const double d = oracle::ks_uniform_statistic(pvals);
  CHECK(ks_pvalue(d, reps) > 0.001);
}

TEST_CASE("unpaired test basics") {
  RngStream rng(88);
  Mat g(10, 4);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = static_cast<double>(1 + rng.next_u64() % 30);
  const TestResult r = unpaired_dm_test(g, g);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK(r.df1 == 3);
}

TEST_CASE("unpaired test holds size under DM data and goes conservative when paired") {
  RngStream rng(89);
  // DM null: theta = 0.1, n = 100 per group, N ~ 1000
  Vec alpha(8);
  alpha << 0.15, 0.05, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08;
  const int reps = 400;
  int rejected = 0;
  for (int r = 0; r < reps; ++r) {
    Mat g1(100, 8), g2(100, 8);
    for (int i = 0; i < 100; ++i) {
      for (int t = 0; t < 2; ++t) {
        long long total = 0;
        while (total == 0) total = sample_poisson(1000.0, rng);
        const Vec latent =
            sample_overdispersed_dirichlet(alpha, 0.1, ThetaMode::kVarianceShare, rng);
        const auto x = sample_multinomial(total, latent, rng);
        for (int j = 0; j < 8; ++j) (t == 0 ? g1 : g2)(i, j) = static_cast<double>(x[j]);
      }
    }
    if (unpaired_dm_test(g1, g2).p_value < 0.05) ++rejected;
  }
  const double dm_size = static_cast<double>(rejected) / reps;
  CHECK(dm_size > 0.02);
  CHECK(dm_size < 0.09);

  // strongly paired null data: the unpaired test under-rejects
  const MixedDirichletParams p = paper_params(0.6, false);
  int rej_unpaired = 0, rej_paired_alt = 0;
  const MixedDirichletParams p_alt = paper_params(0.6, true);
  for (int r = 0; r < 200; ++r) {
    const PairedCounts pc = sample_dataset(p, 100, rng);
    if (unpaired_dm_test(pc.counts1, pc.counts2).p_value < 0.05) ++rej_unpaired;
    const PairedCounts pa = sample_dataset(p_alt, 100, rng);
    if (paired_f_test(pa).p_value < 0.05) ++rej_paired_alt;
  }
  CHECK(rej_unpaired < rej_paired_alt);
  CHECK(static_cast<double>(rej_unpaired) / 200 < 0.05);
}

TEST_CASE("fisher combination") {
  CHECK(fisher_combine({0.37}) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(fisher_combine({1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  // frozen: 1 - chisq_cdf(-4 log 0.5, 4)
  CHECK(fisher_combine({0.5, 0.5}) == doctest::Approx(0.5965735902799727).epsilon(1e-11));
  bool flag = false;
  CHECK(fisher_combine({0.5, 0.0}, &flag) == 0.0);
  CHECK(flag);
  CHECK_THROWS_AS(fisher_combine({}), InsufficientTests);
  CHECK_THROWS_AS(fisher_combine({1.2}), InvalidInput);
}

TEST_CASE("second smallest combination matches the binomial tail") {
  CHECK(second_smallest_combine({0.0, 0.0, 0.5}) == doctest::Approx(0.0));
  CHECK(second_smallest_combine({1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(second_smallest_combine({0.05, 0.1, 0.9, 0.9, 0.9}) ==
        doctest::Approx(1.0 - 1.4 * std::pow(0.9, 4)).epsilon(1e-12));
  // equals P(at least 2 of K uniforms <= p2) on a grid
  for (int k : {2, 3, 5, 10, 40}) {
    for (double p2 : {1e-6, 1e-3, 0.02, 0.1, 0.3, 0.7, 0.95}) {
      std::vector<double> pvals(k, 1.0);
      pvals[0] = p2 * 0.5;
      pvals[1] = p2;
      CHECK(second_smallest_combine(pvals) ==
            doctest::Approx(oracle::binom_tail_ge2(k, p2)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(second_smallest_combine({0.5}), InsufficientTests);
}

TEST_CASE("combiners map independent uniforms to uniforms") {
  RngStream rng(90);
  const int reps = 10000;
  std::vector<double> fisher_out, second_out;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> pvals(7);
    for (auto& p : pvals) p = rng.uniform_pos();
    fisher_out.push_back(fisher_combine(pvals));
    second_out.push_back(second_smallest_combine(pvals));
  }
  CHECK(ks_pvalue(oracle::ks_uniform_statistic(fisher_out), reps) > 0.001);
  CHECK(ks_pvalue(oracle::ks_uniform_statistic(second_out), reps) > 0.001);
}

TEST_CASE("benjamini-hochberg step-up") {
  {
    const BhResult r = bh_fdr({1.0, 1.0, 1.0}, 0.05);
    CHECK(r.n_rejected == 0);
  }
  {
    const BhResult r = bh_fdr({0.001, 0.9, 0.9, 0.9}, 0.05);
    CHECK(r.n_rejected == 1);
    CHECK(r.rejected[0]);
    CHECK(!r.rejected[1]);
    CHECK(r.adjusted[0] == doctest::Approx(0.004).epsilon(1e-12));
  }
  {
    // step-up can rescue smaller ranks
    const BhResult r = bh_fdr({0.01, 0.02, 0.021, 0.9}, 0.05);
    CHECK(r.n_rejected == 3);
  }
  // adjusted p-values are monotone in the raw ordering
  RngStream rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pvals(20);
    for (auto& p : pvals) p = rng.uniform_pos();
    const BhResult r = bh_fdr(pvals, 0.1);
    std::vector<int> order(20);
    for (int i = 0; i < 20; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pvals[a] < pvals[b]; });
    for (int i = 1; i < 20; ++i)
      CHECK(r.adjusted[order[i - 1]] <= r.adjusted[order[i]] + 1e-15);
    // rejection set consistent with adjusted p <= q
    for (int i = 0; i < 20; ++i)
      CHECK(r.rejected[i] == (r.adjusted[i] <= 0.1 + 1e-12));
  }
}

TEST_CASE("empirical FDR under the full null stays near the level") {
  RngStream rng(92);
  const int reps = 2000;
  const int k = 50;
  double fdr_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> pvals(k);
    for (auto& p : pvals) p = rng.uniform_pos();
    const BhResult bh = bh_fdr(pvals, 0.05);
    fdr_sum += bh.n_rejected > 0 ? 1.0 : 0.0;  // all rejections are false
  }
  CHECK(fdr_sum / reps <= 0.07);
}
