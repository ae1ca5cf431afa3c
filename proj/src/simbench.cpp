#include "pairmn/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "pairmn/errors.hpp"
#include "pairmn/kr_distance.hpp"
#include "pairmn/permanova.hpp"
#include "pairmn/samplers.hpp"

namespace pairmn {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

Vec to_vec(const std::vector<long long>& x) {
  Vec v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v(i) = static_cast<double>(x[i]);
  return v;
}

}  // namespace

std::string SimTable::to_csv() const {
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

double rate_se(double rate, int replicates) {
  if (replicates < 1) throw InvalidInput("rate_se: replicates must be >= 1");
  return std::sqrt(rate * (1.0 - rate) / replicates);
}

void FlatSimConfig::validate() const {
  if (n_grid.empty() || rho_grid.empty())
    throw InvalidInput("FlatSimConfig: grids must be nonempty");
  if (replicates < 1) throw InvalidInput("FlatSimConfig: replicates must be >= 1");
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw InvalidInput("FlatSimConfig: alpha must be in (0, 1)");
  if (!(total_mean > 0.0)) throw InvalidInput("FlatSimConfig: total_mean must be > 0");
  if (generator == FlatGenerator::kMixedDirichlet) {
    if (pi1.size() < 2 || pi2_alt.size() != pi1.size() || ell.size() != pi1.size())
      throw InvalidInput("FlatSimConfig: pi1/pi2_alt/ell must share dimension >= 2");
  } else {
    if (mu1.size() < 2 || mu2_alt.size() != mu1.size() || sigma_sd.size() != mu1.size())
      throw InvalidInput("FlatSimConfig: mu1/mu2_alt/sigma must share dimension >= 2");
  }
  for (int n : n_grid)
    if (n < 2) throw InvalidInput("FlatSimConfig: n must be >= 2");
}

MixedDirichletParams flat_mixed_dirichlet_params(const FlatSimConfig& cfg,
                                                 double rho, bool alternative) {
  MixedDirichletParams p;
  p.rho = rho;
  p.theta_mode = cfg.theta_mode;
  p.theta_a1 = cfg.theta_a1;
  p.theta_a2 = cfg.theta_a2;
  p.theta_ell = cfg.theta_ell;
  p.ell = cfg.ell;
  const Vec& pi2 = alternative ? cfg.pi2_alt : cfg.pi1;
  if (rho >= 1.0) throw InvalidInput("rho must be < 1");
  p.alpha1 = (cfg.pi1 - rho * cfg.ell) / (1.0 - rho);
  p.alpha2 = (pi2 - rho * cfg.ell) / (1.0 - rho);
  for (int j = 0; j < p.alpha1.size(); ++j) {
    if (p.alpha1(j) < -1e-12 || p.alpha2(j) < -1e-12)
      throw InvalidInput("target composition unreachable: (pi - rho ell)/(1-rho) negative");
    p.alpha1(j) = std::fmax(p.alpha1(j), 0.0);
    p.alpha2(j) = std::fmax(p.alpha2(j), 0.0);
  }
  p.validate();
  return p;
}

LogNormalParams flat_lognormal_params(const FlatSimConfig& cfg, double rho,
                                      bool alternative) {
  LogNormalParams p;
  p.mu1 = cfg.mu1;
  p.mu2 = alternative ? cfg.mu2_alt : cfg.mu1;
  p.sigma_sd1 = cfg.sigma_sd;
  p.sigma_sd2 = cfg.sigma_sd;
  p.rho = rho;
  p.validate();
  return p;
}

SimTable run_flat_sim(const FlatSimConfig& cfg) {
  cfg.validate();
  SimTable table;
  table.columns = {"generator", "scenario", "n",  "rho",
                   "method",    "rate",     "se", "replicates"};
  const char* gen_name =
      cfg.generator == FlatGenerator::kMixedDirichlet ? "mixed_dirichlet" : "lognormal";
  RngStream master(cfg.seed);

  std::vector<bool> scenarios;
  if (cfg.run_null) scenarios.push_back(false);
  if (cfg.run_alt) scenarios.push_back(true);

  std::uint64_t grid_index = 0;
  for (bool alternative : scenarios) {
    for (int n : cfg.n_grid) {
      for (double rho : cfg.rho_grid) {
        int reject_paired = 0;
        int reject_unpaired = 0;
        RngStream point = master.substream(grid_index++);
        for (int rep = 0; rep < cfg.replicates; ++rep) {
          RngStream rng = point.substream(rep);
          Mat x1(n, 0), x2(n, 0);
          if (cfg.generator == FlatGenerator::kMixedDirichlet) {
            const MixedDirichletParams params =
                flat_mixed_dirichlet_params(cfg, rho, alternative);
            const int d = params.dim();
            x1.resize(n, d);
            x2.resize(n, d);
            for (int i = 0; i < n; ++i) {
              const long long n1 = sample_poisson(cfg.total_mean, rng);
              const long long n2 = sample_poisson(cfg.total_mean, rng);
              const PairedCountDraw draw =
                  sample_pairmn_mixed_dirichlet(params, n1, n2, rng);
              x1.row(i) = to_vec(draw.x1).transpose();
              x2.row(i) = to_vec(draw.x2).transpose();
            }
          } else {
            const LogNormalParams params = flat_lognormal_params(cfg, rho, alternative);
            const int d = params.dim();
            x1.resize(n, d);
            x2.resize(n, d);
            for (int i = 0; i < n; ++i) {
              const long long n1 = sample_poisson(cfg.total_mean, rng);
              const long long n2 = sample_poisson(cfg.total_mean, rng);
              const PairedCountDraw draw = sample_pairmn_lognormal(params, n1, n2, rng);
              x1.row(i) = to_vec(draw.x1).transpose();
              x2.row(i) = to_vec(draw.x2).transpose();
            }
          }
          PairedCounts pc;
          pc.counts1 = x1;
          pc.counts2 = x2;
          if (paired_f_test(pc).p_value < cfg.alpha) ++reject_paired;
          if (unpaired_dm_test(x1, x2).p_value < cfg.alpha) ++reject_unpaired;
        }
        const char* scen = alternative ? "alternative" : "null";
        const double rp = static_cast<double>(reject_paired) / cfg.replicates;
        const double ru = static_cast<double>(reject_unpaired) / cfg.replicates;
        table.rows.push_back({gen_name, scen, fmt(n), fmt(rho), "paired_f", fmt(rp),
                              fmt(rate_se(rp, cfg.replicates)), fmt(cfg.replicates)});
        table.rows.push_back({gen_name, scen, fmt(n), fmt(rho), "unpaired_dm", fmt(ru),
                              fmt(rate_se(ru, cfg.replicates)), fmt(cfg.replicates)});
      }
    }
  }
  return table;
}

TreePattern tree_pattern_from_string(const std::string& s) {
  if (s == "null") return TreePattern::kNull;
  if (s == "sparse") return TreePattern::kSparse;
  if (s == "dense") return TreePattern::kDense;
  throw InvalidInput("unknown tree pattern: " + s);
}

const char* to_string(TreePattern p) {
  switch (p) {
    case TreePattern::kNull:
      return "null";
    case TreePattern::kSparse:
      return "sparse";
    case TreePattern::kDense:
      return "dense";
  }
  return "unknown";
}

void TreeSimConfig::apply_default_targets() {
  if (pattern == TreePattern::kNull) {
    targets_cond1.clear();
    targets_cond2.clear();
    return;
  }
  if (pattern == TreePattern::kSparse) {
    if (targets_cond2.empty()) targets_cond2 = {"g__Streptococcus"};
    targets_cond1.clear();
    return;
  }
  if (targets_cond1.empty())
    targets_cond1 = {"g__Streptococcus", "g__Eubacterium", "g__Parabacteroides"};
  if (targets_cond2.empty())
    targets_cond2 = {"g__Porphyromonas", "g__Moraxella", "g__Ruminococcus"};
}

void TreeSimConfig::validate() const {
  reference.validate();
  if (peps_grid.empty() || n_grid.empty())
    throw InvalidInput("TreeSimConfig: grids must be nonempty");
  for (double pe : peps_grid)
    if (pe < 0.0 || pe > 0.02 + 1e-15)
      throw InvalidInput("TreeSimConfig: p_eps must lie in [0, 0.02]");
  for (int n : n_grid)
    if (n < 2) throw InvalidInput("TreeSimConfig: n must be >= 2");
  if (replicates < 1) throw InvalidInput("TreeSimConfig: replicates must be >= 1");
  if (!(fdr_level > 0.0) || fdr_level >= 1.0 || !(alpha > 0.0) || alpha >= 1.0)
    throw InvalidInput("TreeSimConfig: levels must be in (0, 1)");
  for (const auto& t : targets_cond1)
    if (reference.tree.index_of(t) < 0)
      throw InvalidInput("TreeSimConfig: unknown target node " + t);
  for (const auto& t : targets_cond2)
    if (reference.tree.index_of(t) < 0)
      throw InvalidInput("TreeSimConfig: unknown target node " + t);
}

TreePairDraw gen_tree_pair(const TreeReference& ref,
                           const std::vector<int>& targets1,
                           const std::vector<int>& targets2, double p_eps,
                           bool strict_paper_binomial, RngStream& rng) {
  const int nref = ref.n_samples();
  const int k0 = ref.tree.size();
  const auto pick = [&]() { return static_cast<int>(rng.next_u64() % nref); };
  const int i1 = pick();
  const int i2 = pick();
  const int i3 = pick();
  const long long n1 = ref.totals[pick()];
  const long long n2 = ref.totals[pick()];
  const Vec m1 = 0.5 * (ref.compositions.row(i1) + ref.compositions.row(i3));
  const Vec m2 = 0.5 * (ref.compositions.row(i2) + ref.compositions.row(i3));

  TreePairDraw out;
  out.w1 = CountVec::Zero(k0);
  out.w2 = CountVec::Zero(k0);
  const std::vector<long long> w1 = sample_multinomial(n1, m1, rng);
  const std::vector<long long> w2 = sample_multinomial(n2, m2, rng);
  for (int k = 0; k < k0; ++k) {
    out.w1(k) = w1[k];
    out.w2(k) = w2[k];
  }
  if (p_eps > 0.0) {
    for (int k : targets1)
      out.w1(k) += sample_binomial(strict_paper_binomial ? n2 : n1, p_eps, rng);
    for (int k : targets2) out.w2(k) += sample_binomial(n2, p_eps, rng);
  }
  return out;
}

TreeCounts gen_tree_dataset(const TreeReference& ref,
                            const std::vector<int>& targets1,
                            const std::vector<int>& targets2, double p_eps,
                            bool strict_paper_binomial, int n, RngStream& rng) {
  TreeCounts tc;
  tc.assigned1.resize(n, ref.tree.size());
  tc.assigned2.resize(n, ref.tree.size());
  tc.subjects.reserve(n);
  for (int i = 0; i < n; ++i) {
    const TreePairDraw draw =
        gen_tree_pair(ref, targets1, targets2, p_eps, strict_paper_binomial, rng);
    tc.assigned1.row(i) = draw.w1.transpose();
    tc.assigned2.row(i) = draw.w2.transpose();
    tc.subjects.push_back("subj" + std::to_string(i + 1));
  }
  return tc;
}

std::vector<int> differential_truth(const TaxTree& tree,
                                    const std::vector<int>& targets1,
                                    const std::vector<int>& targets2) {
  std::set<int> truth;
  std::vector<int> all = targets1;
  all.insert(all.end(), targets2.begin(), targets2.end());
  for (int t : all) {
    if (t < 0 || t >= tree.size()) throw InvalidInput("differential_truth: bad node");
    if (tree.is_internal(t)) truth.insert(t);
    for (int k = tree.node(t).parent; k >= 0; k = tree.node(k).parent)
      truth.insert(k);
  }
  return {truth.begin(), truth.end()};
}

SimTable run_tree_sim(const TreeSimConfig& cfg_in) {
  TreeSimConfig cfg = cfg_in;
  cfg.apply_default_targets();
  cfg.validate();
  const TaxTree& tree = cfg.reference.tree;

  std::vector<int> targets1, targets2;
  for (const auto& t : cfg.targets_cond1) targets1.push_back(tree.index_of(t));
  for (const auto& t : cfg.targets_cond2) targets2.push_back(tree.index_of(t));
  const std::vector<int> truth = differential_truth(tree, targets1, targets2);
  const std::set<int> truth_set(truth.begin(), truth.end());

  SimTable table;
  table.columns = {"pattern", "n",     "p_eps", "metric",
                   "value",   "se",    "replicates"};
  RngStream master(cfg.seed);

  std::uint64_t grid_index = 0;
  for (int n : cfg.n_grid) {
    for (double pe : cfg.peps_grid) {
      RngStream point = master.substream(grid_index++);
      int rej_fisher = 0, rej_second = 0, rej_dm = 0, rej_perm = 0;
      int dm_runs = 0, perm_runs = 0;
      double fdr_sum = 0.0;
      std::map<int, int> discoveries;
      for (int k : truth) discoveries[k] = 0;

      for (int rep = 0; rep < cfg.replicates; ++rep) {
        RngStream rep_stream = point.substream(rep);
        RngStream gen_rng = rep_stream.substream(0);
        const TreeCounts tc = gen_tree_dataset(cfg.reference, targets1, targets2,
                                               pe, cfg.strict_paper_binomial, n,
                                               gen_rng);
        const SubtreeReport report = subtree_tests(tree, tc, cfg.fdr_level);
        if (global_test(report, GlobalMethod::kFisher) < cfg.alpha) ++rej_fisher;
        if (report.n_tested >= 2 &&
            global_test(report, GlobalMethod::kSecondSmallest) < cfg.alpha)
          ++rej_second;

        int false_rej = 0, total_rej = 0;
        for (const auto& e : report.entries) {
          if (!e.rejected) continue;
          ++total_rej;
          if (!truth_set.count(e.node)) ++false_rej;
          auto it = discoveries.find(e.node);
          if (it != discoveries.end()) ++it->second;
        }
        fdr_sum += total_rej > 0 ? static_cast<double>(false_rej) / total_rej : 0.0;

        if (cfg.run_dm) {
          const CountMat q1 = aggregate_q(tree, tc.assigned1);
          const CountMat q2 = aggregate_q(tree, tc.assigned2);
          std::vector<double> dm_pvals;
          for (int k : tree.internal_nodes()) {
            const SubtreeSlice slice = slice_subtree(tree, q1, q2, k);
            if (!slice.testable) continue;
            try {
              dm_pvals.push_back(unpaired_dm_test(slice.x1, slice.x2).p_value);
            } catch (const Error&) {
            }
          }
          if (dm_pvals.size() >= 2) {
            ++dm_runs;
            if (second_smallest_combine(dm_pvals) < cfg.alpha) ++rej_dm;
          }
        }

        if (cfg.run_permanova) {
          const CountMat q1 = aggregate_q(tree, tc.assigned1);
          const CountMat q2 = aggregate_q(tree, tc.assigned2);
          std::vector<int> keep;
          for (int i = 0; i < n; ++i)
            if (q1(i, tree.root()) > 0 && q2(i, tree.root()) > 0) keep.push_back(i);
          if (keep.size() >= 2) {
            CountMat units(2 * keep.size(), tree.size());
            std::vector<std::pair<int, int>> pairs;
            for (std::size_t i = 0; i < keep.size(); ++i) {
              units.row(2 * i) = q1.row(keep[i]);
              units.row(2 * i + 1) = q2.row(keep[i]);
              pairs.emplace_back(2 * i, 2 * i + 1);
            }
            const Mat dist = kr_distance_matrix(tree, units);
            RngStream perm_rng = rep_stream.substream(1);
            ++perm_runs;
            if (permanova_paired(dist, pairs, cfg.n_perm, perm_rng).p_value < cfg.alpha)
              ++rej_perm;
          }
        }
      }

      const auto add_rate = [&](const std::string& metric, int count, int denom) {
        const double rate = denom > 0 ? static_cast<double>(count) / denom : 0.0;
        table.rows.push_back({to_string(cfg.pattern), fmt(n), fmt(pe), metric,
                              fmt(rate), fmt(denom > 0 ? rate_se(rate, denom) : 0.0),
                              fmt(denom)});
      };
      add_rate("global:pairmn_fisher", rej_fisher, cfg.replicates);
      add_rate("global:pairmn_second", rej_second, cfg.replicates);
      if (cfg.run_dm) add_rate("global:dm_second", rej_dm, dm_runs);
      if (cfg.run_permanova) add_rate("global:permanova", rej_perm, perm_runs);
      const double fdr = fdr_sum / cfg.replicates;
      table.rows.push_back({to_string(cfg.pattern), fmt(n), fmt(pe), "fdr_empirical",
                            fmt(fdr), fmt(rate_se(fdr, cfg.replicates)),
                            fmt(cfg.replicates)});
      for (int k : truth)
        add_rate("discovery:" + tree.node(k).id, discoveries[k], cfg.replicates);
    }
  }
  return table;
}

}  // namespace pairmn
