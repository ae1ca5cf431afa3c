#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "pairmn/errors.hpp"
#include "pairmn/simbench.hpp"
#include "pairmn/special.hpp"

using namespace pairmn;

namespace {

Vec vec8(std::initializer_list<double> v) {
  Vec out(8);
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

FlatSimConfig small_flat_config() {
  FlatSimConfig cfg;
  cfg.generator = FlatGenerator::kMixedDirichlet;
  cfg.pi1 = vec8({0.15, 0.05, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08});
  cfg.pi2_alt = vec8({0.1, 0.1, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08});
  cfg.ell = vec8({0.12, 0.06, 0.08, 0.43, 0.02, 0.14, 0.1, 0.05});
  cfg.n_grid = {50};
  cfg.rho_grid = {0.3};
  cfg.replicates = 200;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("rate standard error matches the binomial formula") {
  CHECK(rate_se(0.5, 100) == doctest::Approx(std::sqrt(0.25 / 100)).epsilon(1e-15));
  CHECK(rate_se(0.0, 50) == 0.0);
  CHECK(rate_se(0.05, 2000) ==
        doctest::Approx(std::sqrt(0.05 * 0.95 / 2000)).epsilon(1e-15));
  CHECK_THROWS_AS(rate_se(0.5, 0), InvalidInput);
}

TEST_CASE("flat sim is deterministic in the seed and holds null size") {
  FlatSimConfig cfg = small_flat_config();
  cfg.run_alt = false;
  const SimTable a = run_flat_sim(cfg);
  const SimTable b = run_flat_sim(cfg);
  CHECK(a.to_csv() == b.to_csv());
  cfg.seed = 8;
  const SimTable c = run_flat_sim(cfg);
  CHECK(a.to_csv() != c.to_csv());

  // paired row at the null grid point
  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[0][4] == "paired_f");
  const double rate = std::stod(a.rows[0][5]);
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.11);
}

TEST_CASE("flat sim alternative has power above the null rate") {
  FlatSimConfig cfg = small_flat_config();
  cfg.rho_grid = {0.5};
  cfg.replicates = 150;
  const SimTable t = run_flat_sim(cfg);
  REQUIRE(t.rows.size() == 4);
  double null_rate = -1.0, alt_rate = -1.0;
  for (const auto& row : t.rows) {
    if (row[1] == "null" && row[4] == "paired_f") null_rate = std::stod(row[5]);
    if (row[1] == "alternative" && row[4] == "paired_f") alt_rate = std::stod(row[5]);
  }
  CHECK(null_rate >= 0.0);
  CHECK(alt_rate > null_rate + 0.3);
}

TEST_CASE("unreachable target compositions are rejected") {
  FlatSimConfig cfg = small_flat_config();
  cfg.rho_grid = {0.95};  // (pi - rho ell)/(1-rho) goes negative
  CHECK_THROWS_AS(run_flat_sim(cfg), InvalidInput);
}

TEST_CASE("synthetic reference is deterministic and well formed") {
  const SyntheticRefParams params;
  const TreeReference a = make_synthetic_reference(params);
  const TreeReference b = make_synthetic_reference(params);
  CHECK(a.tree.size() == b.tree.size());
  CHECK((a.compositions - b.compositions).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.totals == b.totals);
  a.validate();
  CHECK(a.tree.index_of("g__Streptococcus") >= 0);
  CHECK(a.tree.index_of("g__Moraxella") >= 0);
  // the tree is deep enough for dilution to matter
  CHECK(static_cast<int>(a.tree.internal_nodes().size()) > 200);

  SyntheticRefParams other = params;
  other.seed += 1;
  const TreeReference c = make_synthetic_reference(other);
  CHECK((a.compositions - c.compositions).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generated tree pairs satisfy the integer identity exactly") {
  const TreeReference ref = make_synthetic_reference({.n_samples = 50, .seed = 3});
  RngStream rng(131);
  const std::vector<int> targets{ref.tree.index_of("g__Streptococcus")};
  for (int trial = 0; trial < 200; ++trial) {
    const TreePairDraw draw = gen_tree_pair(ref, {}, targets, 0.02, false, rng);
    const CountVec q2 = aggregate_q(ref.tree, draw.w2);
    for (int k = 0; k < ref.tree.size(); ++k) {
      long long rem = q2(k);
      for (int c : ref.tree.node(k).children) rem -= q2(c);
      CHECK(rem == draw.w2(k));
    }
  }
}

TEST_CASE("null pattern gives both conditions the same distribution") {
  const TreeReference ref = make_synthetic_reference({.n_samples = 100, .seed = 5});
  RngStream rng(132);
  const int node = ref.tree.index_of("g__Bacteroides");
  const int reps = 2000;
  std::vector<double> share1, share2;
  for (int i = 0; i < reps; ++i) {
    const TreePairDraw draw = gen_tree_pair(ref, {}, {}, 0.0, false, rng);
    const double t1 = static_cast<double>(draw.w1.sum());
    const double t2 = static_cast<double>(draw.w2.sum());
    share1.push_back(static_cast<double>(draw.w1(node)) / t1);
    share2.push_back(static_cast<double>(draw.w2(node)) / t2);
  }
  std::sort(share1.begin(), share1.end());
  std::sort(share2.begin(), share2.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < share1.size() && j < share2.size()) {
    if (share1[i] <= share2[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / reps -
                              static_cast<double>(j) / reps));
  }
  const double en = std::sqrt(reps / 2.0);
  CHECK(kolmogorov_survival(d * (en + 0.12 + 0.11 / en)) > 0.001);
}

TEST_CASE("sparse perturbation only shifts the target coordinate") {
  const TreeReference ref = make_synthetic_reference({.n_samples = 100, .seed = 5});
  RngStream rng(133);
  const int target = ref.tree.index_of("g__Streptococcus");
  const int reps = 4000;
  const int k0 = ref.tree.size();
  Vec sum1 = Vec::Zero(k0), sum2 = Vec::Zero(k0);
  std::vector<double> diff_at_target;
  for (int i = 0; i < reps; ++i) {
    const TreePairDraw draw = gen_tree_pair(ref, {}, {target}, 0.02, false, rng);
    for (int k = 0; k < k0; ++k) {
      sum1(k) += static_cast<double>(draw.w1(k));
      sum2(k) += static_cast<double>(draw.w2(k));
    }
    diff_at_target.push_back(static_cast<double>(draw.w2(target) - draw.w1(target)));
  }
  // W1 and W2 share marginals except the perturbed coordinate
  const auto mv = oracle::mean_var(diff_at_target);
  CHECK(mv.mean > 5.0 * mv.se);  // clear positive shift at the target
  // off-target coordinates: mean counts agree within 5 sigma
  int checked = 0;
  for (int k = 0; k < k0 && checked < 40; ++k) {
    if (k == target || sum1(k) + sum2(k) < reps) continue;
    ++checked;
    const double m1 = sum1(k) / reps;
    const double m2 = sum2(k) / reps;
    const double se = std::sqrt((m1 + m2) / reps);  // Poisson-scale bound
    CHECK(std::fabs(m1 - m2) < 6.0 * se + 0.5);
  }
  CHECK(checked == 40);
}

TEST_CASE("differential truth follows the ancestor chain") {
  const TreeReference ref = make_synthetic_reference({.n_samples = 50, .seed = 3});
  const TaxTree& t = ref.tree;
  const std::vector<int> truth =
      differential_truth(t, {}, {t.index_of("g__Streptococcus")});
  std::set<std::string> ids;
  for (int k : truth) ids.insert(t.node(k).id);
  const std::set<std::string> expected{"g__Streptococcus",  "f__Streptococcaceae",
                                       "o__Lactobacillales", "c__Bacilli",
                                       "p__Firmicutes",      "k__Bacteria"};
  CHECK(ids == expected);
}

TEST_CASE("tree sim smoke run: deterministic, well-formed rates") {
  TreeSimConfig cfg;
  cfg.reference = make_synthetic_reference({.n_samples = 80, .seed = 9});
  cfg.pattern = TreePattern::kSparse;
  cfg.peps_grid = {0.0, 0.02};
  cfg.n_grid = {20};
  cfg.replicates = 5;
  cfg.n_perm = 99;
  cfg.run_permanova = false;
  cfg.run_dm = true;
  cfg.seed = 4;
  const SimTable a = run_tree_sim(cfg);
  const SimTable b = run_tree_sim(cfg);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.columns.size() == 7);
  bool saw_fisher = false, saw_fdr = false, saw_discovery = false;
  for (const auto& row : a.rows) {
    const double value = std::stod(row[4]);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    saw_fisher |= row[3] == "global:pairmn_fisher";
    saw_fdr |= row[3] == "fdr_empirical";
    saw_discovery |= row[3].rfind("discovery:", 0) == 0;
  }
  CHECK(saw_fisher);
  CHECK(saw_fdr);
  CHECK(saw_discovery);
}

TEST_CASE("tree sim config validation") {
  TreeSimConfig cfg;
  cfg.reference = make_synthetic_reference({.n_samples = 20, .seed = 2});
  cfg.peps_grid = {0.5};  // outside [0, 0.02]
  cfg.apply_default_targets();
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg.peps_grid = {0.01};
  cfg.targets_cond2 = {"g__DoesNotExist"};
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}
