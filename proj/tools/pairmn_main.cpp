// Command-line front end: paired composition tests, the taxonomic-tree
// pipeline, K-R distances, paired PERMANOVA and the simulation bench.
//
// Exit codes: 0 success, 2 input/parse error, 3 statistical degeneracy.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pairmn/errors.hpp"
#include "pairmn/io.hpp"
#include "pairmn/kr_distance.hpp"
#include "pairmn/permanova.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pairmn::ParseError("cannot write file: " + path);
  out << text;
}

int run_test(const std::string& counts1_path, const std::string& counts2_path,
             const std::string& out_path) {
  const pairmn::LongCounts c1 = pairmn::read_counts_long(counts1_path);
  const pairmn::LongCounts c2 = pairmn::read_counts_long(counts2_path);
  const pairmn::PairedCounts pc = pairmn::bind_flat_counts(c1, c2);
  const pairmn::TestResult r = pairmn::paired_f_test(pc);
  write_or_print(pairmn::test_result_to_json(r), out_path);
  return kExitOk;
}

int run_tree(const std::string& tree_path, const std::string& counts_path,
             double fdr, const std::string& global_method,
             const std::string& out_path) {
  pairmn::GlobalMethod method;
  if (global_method == "fisher") {
    method = pairmn::GlobalMethod::kFisher;
  } else if (global_method == "second") {
    method = pairmn::GlobalMethod::kSecondSmallest;
  } else {
    throw pairmn::InvalidInput("--global must be 'fisher' or 'second'");
  }
  const pairmn::TaxTree tree = pairmn::read_node_table(tree_path);
  const pairmn::LongCounts lc = pairmn::read_counts_long(counts_path);
  std::vector<std::string> warnings;
  const pairmn::TreeCounts tc = pairmn::bind_tree_counts(tree, lc, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  const pairmn::SubtreeReport report = pairmn::subtree_tests(tree, tc, fdr);
  write_or_print(pairmn::report_to_json(tree, report, method), out_path);
  return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed_override, bool has_seed) {
  pairmn::SimConfig cfg = pairmn::read_sim_config(config_path);
  pairmn::SimTable table;
  if (cfg.is_tree) {
    if (has_seed) cfg.tree.seed = seed_override;
    table = pairmn::run_tree_sim(cfg.tree);
  } else {
    if (has_seed) cfg.flat.seed = seed_override;
    table = pairmn::run_flat_sim(cfg.flat);
  }
  write_or_print(table.to_csv(), out_path);
  return kExitOk;
}

int run_distance(const std::string& tree_path, const std::string& counts_path,
                 const std::string& out_path) {
  const pairmn::TaxTree tree = pairmn::read_node_table(tree_path);
  const pairmn::LongCounts lc = pairmn::read_counts_long(counts_path);
  // every (sample, condition) with data becomes a unit, sample-major order
  std::vector<std::string> labels;
  std::vector<std::pair<int, int>> units;  // (sample index, condition)
  for (std::size_t i = 0; i < lc.samples.size(); ++i) {
    if (lc.seen_in_condition1[i]) {
      labels.push_back(lc.samples[i] + ":1");
      units.emplace_back(static_cast<int>(i), 1);
    }
    if (lc.seen_in_condition2[i]) {
      labels.push_back(lc.samples[i] + ":2");
      units.emplace_back(static_cast<int>(i), 2);
    }
  }
  if (units.size() < 2) throw pairmn::InvalidInput("distance: need at least 2 units");
  std::vector<int> node_map(lc.nodes.size());
  for (std::size_t k = 0; k < lc.nodes.size(); ++k) {
    const int idx = tree.index_of(lc.nodes[k]);
    if (idx < 0) throw pairmn::InvalidInput("unknown node_id in counts: " + lc.nodes[k]);
    node_map[k] = idx;
  }
  pairmn::CountMat assigned = pairmn::CountMat::Zero(units.size(), tree.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& [i, cond] = units[u];
    const pairmn::CountMat& m = cond == 1 ? lc.counts1 : lc.counts2;
    for (std::size_t k = 0; k < lc.nodes.size(); ++k)
      assigned(u, node_map[k]) += m(i, k);
  }
  const pairmn::CountMat q = pairmn::aggregate_q(tree, assigned);
  const pairmn::Mat d = pairmn::kr_distance_matrix(tree, q);
  pairmn::write_distance_csv(d, labels, out_path);
  return kExitOk;
}

int run_permanova(const std::string& dist_path, const std::string& pairs_path,
                  int n_perm, std::uint64_t seed) {
  const auto [d, labels] = pairmn::read_distance_csv(dist_path);
  const auto pairs = pairmn::read_pairs_table(pairs_path, labels);
  pairmn::RngStream rng(seed);
  const pairmn::PermanovaResult r = pairmn::permanova_paired(d, pairs, n_perm, rng);
  std::cout << "{\n  \"f_statistic\": " << r.f_statistic
            << ",\n  \"n_perm\": " << r.n_perm << ",\n  \"p_value\": " << r.p_value
            << "\n}\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paired-multinomial composition tests on taxonomic trees"};
  app.require_subcommand(1);

  std::string counts1_path, counts2_path, tree_path, counts_path, config_path;
  std::string dist_path, pairs_path, out_path;
  double fdr = 0.05;
  std::string global_method = "fisher";
  int n_perm = 999;
  std::uint64_t seed = 1;

  auto* cmd_test = app.add_subcommand("test", "Paired F test on two flat count files");
  cmd_test->add_option("--counts1", counts1_path, "TSV counts, condition 1")->required();
  cmd_test->add_option("--counts2", counts2_path, "TSV counts, condition 2")->required();
  cmd_test->add_option("--out", out_path, "Output JSON path (default: stdout)");

  auto* cmd_tree = app.add_subcommand("tree", "Per-subtree tests, FDR and global p");
  cmd_tree->add_option("--tree", tree_path, "Node table TSV")->required();
  cmd_tree->add_option("--counts", counts_path, "Long-format counts TSV")->required();
  cmd_tree->add_option("--fdr", fdr, "BH FDR level (default 0.05)");
  cmd_tree->add_option("--global", global_method, "fisher | second (default fisher)");
  cmd_tree->add_option("--out", out_path, "Output JSON path (default: stdout)");

  auto* cmd_sim = app.add_subcommand("simulate", "Run a simulation bench config");
  cmd_sim->add_option("--config", config_path, "JSON config")->required();
  cmd_sim->add_option("--out", out_path, "Output CSV path (default: stdout)");
  bool has_seed = false;
  cmd_sim->add_option("--seed", seed, "Override the config seed")
      ->each([&](const std::string&) { has_seed = true; });

  auto* cmd_dist = app.add_subcommand("distance", "Pairwise K-R distance matrix");
  cmd_dist->add_option("--tree", tree_path, "Node table TSV")->required();
  cmd_dist->add_option("--counts", counts_path, "Long-format counts TSV")->required();
  cmd_dist->add_option("--out", out_path, "Output CSV path")->required();

  auto* cmd_perm = app.add_subcommand("permanova", "Paired-strata PERMANOVA");
  cmd_perm->add_option("--distances", dist_path, "Distance matrix CSV")->required();
  cmd_perm->add_option("--pairs", pairs_path, "Pairs table TSV")->required();
  cmd_perm->add_option("--nperm", n_perm, "Permutations (default 999)");
  cmd_perm->add_option("--seed", seed, "RNG seed (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_test->parsed()) return run_test(counts1_path, counts2_path, out_path);
    if (cmd_tree->parsed())
      return run_tree(tree_path, counts_path, fdr, global_method, out_path);
    if (cmd_sim->parsed()) return run_simulate(config_path, out_path, seed, has_seed);
    if (cmd_dist->parsed()) return run_distance(tree_path, counts_path, out_path);
    if (cmd_perm->parsed()) return run_permanova(dist_path, pairs_path, n_perm, seed);
  } catch (const pairmn::InsufficientSamples& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const pairmn::DegenerateInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const pairmn::ZeroRank& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const pairmn::EmptyReport& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const pairmn::InsufficientTests& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const pairmn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
