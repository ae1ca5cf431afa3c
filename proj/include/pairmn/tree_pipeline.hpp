#pragma once

#include "pairmn/hypotheses.hpp"
#include "pairmn/taxtree.hpp"

namespace pairmn {

enum class SubtreeStatus { kTested, kSkippedSmallN, kSkippedDegenerate };

const char* to_string(SubtreeStatus s);

struct SubtreeEntry {
  int node = -1;
  SubtreeStatus status = SubtreeStatus::kSkippedDegenerate;
  TestResult result;        // meaningful only when tested
  double p_adjusted = 1.0;  // BH-adjusted over tested nodes
  bool rejected = false;
};

struct SubtreeReport {
  std::vector<SubtreeEntry> entries;  // one per internal node, preorder
  int n_tested = 0;
  double fdr_level = 0.05;

  std::vector<double> tested_pvalues() const;
};

// Runs the paired F test on every testable internal node and applies BH
// across the tested ones. Throws EmptyReport when nothing is testable.
SubtreeReport subtree_tests(const TaxTree& tree, const TreeCounts& tc,
                            double fdr_level = 0.05);

enum class GlobalMethod { kFisher, kSecondSmallest };

// Combined p-value over the tested subtrees of a report.
double global_test(const SubtreeReport& report, GlobalMethod method);

}  // namespace pairmn
