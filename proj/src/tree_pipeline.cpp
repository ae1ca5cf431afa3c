#include "pairmn/tree_pipeline.hpp"

#include "pairmn/errors.hpp"

namespace pairmn {

const char* to_string(SubtreeStatus s) {
  switch (s) {
    case SubtreeStatus::kTested:
      return "tested";
    case SubtreeStatus::kSkippedSmallN:
      return "skipped: n<=d";
    case SubtreeStatus::kSkippedDegenerate:
      return "skipped: degenerate";
  }
  return "unknown";
}

std::vector<double> SubtreeReport::tested_pvalues() const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (e.status == SubtreeStatus::kTested) out.push_back(e.result.p_value);
  return out;
}

SubtreeReport subtree_tests(const TaxTree& tree, const TreeCounts& tc,
                            double fdr_level) {
  tc.validate(tree);
  const CountMat q1 = aggregate_q(tree, tc.assigned1);
  const CountMat q2 = aggregate_q(tree, tc.assigned2);

  SubtreeReport report;
  report.fdr_level = fdr_level;
  for (int k : tree.preorder()) {
    if (!tree.is_internal(k)) continue;
    SubtreeEntry e;
    e.node = k;
    const SubtreeSlice slice = slice_subtree(tree, q1, q2, k);
    if (!slice.testable) {
      e.status = slice.skip_reason == "skipped: n<=d"
                     ? SubtreeStatus::kSkippedSmallN
                     : SubtreeStatus::kSkippedDegenerate;
      report.entries.push_back(e);
      continue;
    }
    try {
      PairedCounts pc;
      pc.counts1 = slice.x1;
      pc.counts2 = slice.x2;
      e.result = paired_f_test(pc);
      e.status = SubtreeStatus::kTested;
      ++report.n_tested;
    } catch (const InsufficientSamples&) {
      e.status = SubtreeStatus::kSkippedSmallN;
    } catch (const DegenerateInput&) {
      e.status = SubtreeStatus::kSkippedDegenerate;
    }
    report.entries.push_back(e);
  }
  if (report.n_tested == 0)
    throw EmptyReport("subtree_tests: no testable internal node");

  const std::vector<double> pvals = report.tested_pvalues();
  const BhResult bh = bh_fdr(pvals, fdr_level);
  int j = 0;
  for (auto& e : report.entries) {
    if (e.status != SubtreeStatus::kTested) continue;
    e.p_adjusted = bh.adjusted[j];
    e.rejected = bh.rejected[j];
    ++j;
  }
  return report;
}

double global_test(const SubtreeReport& report, GlobalMethod method) {
  const std::vector<double> pvals = report.tested_pvalues();
  switch (method) {
    case GlobalMethod::kFisher:
      return fisher_combine(pvals);
    case GlobalMethod::kSecondSmallest:
      return second_smallest_combine(pvals);
  }
  throw InvalidInput("global_test: unknown method");
}

}  // namespace pairmn
