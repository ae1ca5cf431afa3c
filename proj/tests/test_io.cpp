#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pairmn/errors.hpp"
#include "pairmn/io.hpp"

using namespace pairmn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pairmn_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TaxTree small_tree() {
  return TaxTree::from_rows({
      {"root", "", "kingdom", "Bacteria"},
      {"p1", "root", "phylum", "Firmicutes"},
      {"g1", "p1", "genus", "Streptococcus"},
      {"g2", "p1", "genus", "Lactococcus"},
      {"p2", "root", "phylum", "Bacteroidetes"},
  });
}

}  // namespace

TEST_CASE("node table round trip is lossless") {
  TempDir tmp;
  const TaxTree t = small_tree();
  write_node_table(t, tmp.file("tree.tsv"));
  const TaxTree back = read_node_table(tmp.file("tree.tsv"));
  REQUIRE(back.size() == t.size());
  for (int k = 0; k < t.size(); ++k) {
    CHECK(back.node(k).id == t.node(k).id);
    CHECK(back.node(k).parent == t.node(k).parent);
    CHECK(back.node(k).rank == t.node(k).rank);
    CHECK(back.node(k).name == t.node(k).name);
  }
  // serialize -> parse -> serialize is byte-identical
  write_node_table(back, tmp.file("tree2.tsv"));
  CHECK(read_file(tmp.file("tree.tsv")) == read_file(tmp.file("tree2.tsv")));
}

TEST_CASE("node table parse errors carry line numbers") {
  TempDir tmp;
  write_file(tmp.file("bad.tsv"), "node_id\tparent_id\trank\tname\nx\ty\n");
  try {
    read_node_table(tmp.file("bad.tsv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  write_file(tmp.file("badhdr.tsv"), "a\tb\tc\td\n");
  CHECK_THROWS_AS(read_node_table(tmp.file("badhdr.tsv")), ParseError);
}

TEST_CASE("counts round trip and duplicate detection") {
  TempDir tmp;
  write_file(tmp.file("counts.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\tg1\t5\n"
             "s1\t2\tg1\t7\n"
             "s1\t1\tg2\t2\n"
             "s2\t1\tg1\t1\n"
             "s2\t2\tg2\t9\n");
  const LongCounts lc = read_counts_long(tmp.file("counts.tsv"));
  CHECK(lc.samples == std::vector<std::string>{"s1", "s2"});
  CHECK(lc.nodes == std::vector<std::string>{"g1", "g2"});
  CHECK(lc.counts1(0, 0) == 5);
  CHECK(lc.counts2(0, 0) == 7);
  CHECK(lc.counts1(1, 0) == 1);
  CHECK(lc.counts2(1, 1) == 9);
  write_counts_long(lc, tmp.file("counts2.tsv"));
  const LongCounts back = read_counts_long(tmp.file("counts2.tsv"));
  CHECK(back.samples == lc.samples);
  CHECK((back.counts1 - lc.counts1).cwiseAbs().maxCoeff() == 0);
  CHECK((back.counts2 - lc.counts2).cwiseAbs().maxCoeff() == 0);

  write_file(tmp.file("dup.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\tg1\t5\n"
             "s1\t1\tg1\t6\n");
  CHECK_THROWS_AS(read_counts_long(tmp.file("dup.tsv")), ParseError);
  write_file(tmp.file("neg.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\tg1\t-3\n");
  CHECK_THROWS_AS(read_counts_long(tmp.file("neg.tsv")), ParseError);
  write_file(tmp.file("cond.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t3\tg1\t3\n");
  CHECK_THROWS_AS(read_counts_long(tmp.file("cond.tsv")), ParseError);
}

TEST_CASE("tree binding drops incomplete subjects and rejects unknown nodes") {
  TempDir tmp;
  write_file(tmp.file("counts.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\tg1\t5\n"
             "s1\t2\tg1\t7\n"
             "s2\t1\tg1\t4\n");  // s2 has no condition 2
  const LongCounts lc = read_counts_long(tmp.file("counts.tsv"));
  std::vector<std::string> warnings;
  const TreeCounts tc = bind_tree_counts(small_tree(), lc, &warnings);
  CHECK(tc.n() == 1);
  CHECK(tc.subjects == std::vector<std::string>{"s1"});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("s2") != std::string::npos);

  write_file(tmp.file("unknown.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\tmystery\t5\n"
             "s1\t2\tg1\t7\n");
  const LongCounts bad = read_counts_long(tmp.file("unknown.tsv"));
  CHECK_THROWS_AS(bind_tree_counts(small_tree(), bad, nullptr), InvalidInput);
}

TEST_CASE("flat binding requires matching subjects") {
  TempDir tmp;
  write_file(tmp.file("c1.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t1\ta\t5\n"
             "s2\t1\ta\t3\n");
  write_file(tmp.file("c2.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s1\t2\ta\t4\n"
             "s3\t2\ta\t2\n");
  const LongCounts c1 = read_counts_long(tmp.file("c1.tsv"));
  const LongCounts c2 = read_counts_long(tmp.file("c2.tsv"));
  CHECK_THROWS_AS(bind_flat_counts(c1, c2), InvalidInput);

  write_file(tmp.file("c3.tsv"),
             "sample_id\tcondition\tnode_id\tcount\n"
             "s2\t2\tb\t4\n"
             "s1\t2\ta\t2\n");
  const LongCounts c3 = read_counts_long(tmp.file("c3.tsv"));
  const PairedCounts pc = bind_flat_counts(c1, c3);
  CHECK(pc.n() == 2);
  CHECK(pc.d() == 2);  // categories a, b sorted
  CHECK(pc.subjects == std::vector<std::string>{"s1", "s2"});
  CHECK(pc.counts1(0, 0) == 5.0);  // s1, category a
  CHECK(pc.counts2(1, 1) == 4.0);  // s2, category b
}

TEST_CASE("report json is stable and well formed") {
  RngStream rng(141);
  const TaxTree t = small_tree();
  TreeCounts tc;
  tc.assigned1.resize(8, 5);
  tc.assigned2.resize(8, 5);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j) {
      tc.assigned1(i, j) = static_cast<long long>(1 + rng.next_u64() % 20);
      tc.assigned2(i, j) = static_cast<long long>(1 + rng.next_u64() % 20);
    }
  const SubtreeReport report = subtree_tests(t, tc, 0.05);
  const std::string a = report_to_json(t, report, GlobalMethod::kFisher);
  const std::string b = report_to_json(t, report, GlobalMethod::kFisher);
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  CHECK(j.at("subtrees").size() == 2);  // root and p1 are internal
  CHECK(j.at("global").contains("fisher_p"));
  CHECK(j.at("global").contains("second_smallest_p"));
  CHECK(j.at("global").at("K_tested").get<int>() == report.n_tested);
  for (const auto& rec : j.at("subtrees")) {
    CHECK(rec.contains("node_id"));
    CHECK(rec.contains("p_adjusted"));
    CHECK(rec.at("skip_reason").is_string());
  }
}

TEST_CASE("distance csv round trip") {
  TempDir tmp;
  Mat d(3, 3);
  d << 0, 1.5, 2.25, 1.5, 0, 0.75, 2.25, 0.75, 0;
  const std::vector<std::string> labels{"s1:1", "s1:2", "s2:1"};
  write_distance_csv(d, labels, tmp.file("d.csv"));
  const auto [back, lab] = read_distance_csv(tmp.file("d.csv"));
  CHECK(lab == labels);
  CHECK((back - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairs table parsing") {
  TempDir tmp;
  write_file(tmp.file("pairs.tsv"),
             "unit_id\tsubject_id\tcondition\n"
             "s1:1\ts1\t1\n"
             "s1:2\ts1\t2\n"
             "s2:1\ts2\t1\n"
             "s2:2\ts2\t2\n");
  const std::vector<std::string> labels{"s1:1", "s1:2", "s2:1", "s2:2"};
  const auto pairs = read_pairs_table(tmp.file("pairs.tsv"), labels);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::make_pair(0, 1));
  CHECK(pairs[1] == std::make_pair(2, 3));

  write_file(tmp.file("incomplete.tsv"),
             "unit_id\tsubject_id\tcondition\n"
             "s1:1\ts1\t1\n");
  CHECK_THROWS_AS(read_pairs_table(tmp.file("incomplete.tsv"), labels), InvalidInput);
}

TEST_CASE("sim config parsing") {
  TempDir tmp;
  write_file(tmp.file("flat.json"), R"({
    "kind": "flat",
    "generator": "mixed_dirichlet",
    "pi1": [0.15, 0.05, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08],
    "pi2_alt": [0.1, 0.1, 0.22, 0.3, 0.03, 0.1, 0.07, 0.08],
    "ell": [0.12, 0.06, 0.08, 0.43, 0.02, 0.14, 0.1, 0.05],
    "theta_a1": 3.0, "theta_a2": 5.0, "theta_ell": 1.0,
    "theta_as_concentration": true,
    "n": [20], "rho": [0.0, 0.3], "replicates": 10, "seed": 3
  })");
  const SimConfig cfg = read_sim_config(tmp.file("flat.json"));
  CHECK(!cfg.is_tree);
  CHECK(cfg.flat.n_grid == std::vector<int>{20});
  CHECK(cfg.flat.rho_grid == std::vector<double>{0.0, 0.3});
  CHECK(cfg.flat.replicates == 10);
  CHECK(cfg.flat.theta_mode == ThetaMode::kConcentrationTotal);

  write_file(tmp.file("tree.json"), R"({
    "kind": "tree",
    "reference": "synthetic",
    "reference_samples": 30,
    "pattern": "sparse",
    "p_eps": [0.0, 0.02],
    "n": [10],
    "replicates": 2,
    "run_permanova": false,
    "seed": 5
  })");
  const SimConfig tcfg = read_sim_config(tmp.file("tree.json"));
  CHECK(tcfg.is_tree);
  CHECK(tcfg.tree.pattern == TreePattern::kSparse);
  CHECK(tcfg.tree.targets_cond2 == std::vector<std::string>{"g__Streptococcus"});
  CHECK(tcfg.tree.reference.n_samples() == 30);

  write_file(tmp.file("bad.json"), "{\"kind\": \"nope\"}");
  CHECK_THROWS_AS(read_sim_config(tmp.file("bad.json")), ParseError);
  write_file(tmp.file("notjson.json"), "{{{");
  CHECK_THROWS_AS(read_sim_config(tmp.file("notjson.json")), ParseError);
}
