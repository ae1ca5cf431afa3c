#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pairmn/simbench.hpp"
#include "pairmn/tree_pipeline.hpp"

namespace pairmn {

// --- node table: TSV with header `node_id  parent_id  rank  name`;
//     the root row leaves parent_id empty.
TaxTree read_node_table(const std::string& path);
void write_node_table(const TaxTree& tree, const std::string& path);

// --- counts: TSV long format with header
//     `sample_id  condition  node_id  count`; counts are reads assigned
//     directly to the node. Missing triples default to zero.
struct LongCounts {
  std::vector<std::string> samples;               // unique, input order
  std::vector<std::string> nodes;                 // unique, input order
  // (sample, condition, node) -> count; dense per condition
  CountMat counts1, counts2;                      // samples x nodes
  std::vector<bool> seen_in_condition1, seen_in_condition2;  // per sample
};
LongCounts read_counts_long(const std::string& path);
void write_counts_long(const LongCounts& counts, const std::string& path);

// Binds a long table to a tree: columns reordered to tree node order,
// unknown node ids rejected, subjects restricted to complete pairs
// (dropped subjects reported through *warnings when provided).
TreeCounts bind_tree_counts(const TaxTree& tree, const LongCounts& counts,
                            std::vector<std::string>* warnings = nullptr);

// Flat paired counts from two single-condition files; categories are the
// union of node ids sorted lexicographically, subjects must match.
PairedCounts bind_flat_counts(const LongCounts& cond1, const LongCounts& cond2);

// --- report: JSON with one record per internal node plus a global block.
std::string report_to_json(const TaxTree& tree, const SubtreeReport& report,
                           GlobalMethod method);
std::string test_result_to_json(const TestResult& r);

// --- distance matrix CSV: header `unit,<labels...>`, one labeled row per unit.
void write_distance_csv(const Mat& d, const std::vector<std::string>& labels,
                        const std::string& path);
std::pair<Mat, std::vector<std::string>> read_distance_csv(const std::string& path);

// --- pairs table: TSV `unit_id  subject_id  condition`, condition in {1,2}.
std::vector<std::pair<int, int>> read_pairs_table(
    const std::string& path, const std::vector<std::string>& unit_labels);

// --- simulation configs (JSON, documented in the README).
struct SimConfig {
  bool is_tree = false;
  FlatSimConfig flat;
  TreeSimConfig tree;
};
SimConfig read_sim_config(const std::string& path);

}  // namespace pairmn
