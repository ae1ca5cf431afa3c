#pragma once

#include <string>
#include <vector>

#include "pairmn/estimate.hpp"

namespace pairmn {

using CountMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using CountVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

struct TaxNode {
  std::string id;
  std::string rank;
  std::string name;
  int parent = -1;              // -1 for the root
  std::vector<int> children;    // stable input order
};

// Rooted taxonomy. Node order follows the input table; children keep input
// order so slice columns have reproducible meaning.
class TaxTree {
 public:
  struct Row {
    std::string id, parent_id, rank, name;
  };

  // Validates: unique ids, exactly one root, every node reachable, no cycles.
  static TaxTree from_rows(const std::vector<Row>& rows);

  int size() const { return static_cast<int>(nodes_.size()); }
  const TaxNode& node(int k) const { return nodes_[k]; }
  int root() const { return root_; }
  bool is_internal(int k) const { return !nodes_[k].children.empty(); }
  const std::vector<int>& internal_nodes() const { return internal_; }
  // Children-before-parents order (reverse of a preorder walk).
  const std::vector<int>& bottom_up() const { return bottom_up_; }
  const std::vector<int>& preorder() const { return preorder_; }
  int index_of(const std::string& id) const;  // -1 when unknown

 private:
  std::vector<TaxNode> nodes_;
  int root_ = -1;
  std::vector<int> internal_;
  std::vector<int> bottom_up_;
  std::vector<int> preorder_;
};

// Paired per-node assigned counts for n subjects: reads mapped directly to
// each node, not cumulative.
struct TreeCounts {
  std::vector<std::string> subjects;
  CountMat assigned1, assigned2;  // n x K0

  int n() const { return static_cast<int>(assigned1.rows()); }
  void validate(const TaxTree& tree) const;
};

// Cumulative counts: Q(v) = assigned(v) + sum of Q over children, exactly in
// integer arithmetic.
CountMat aggregate_q(const TaxTree& tree, const CountMat& assigned);
CountVec aggregate_q(const TaxTree& tree, const CountVec& assigned);

// One internal node's paired testing unit.
struct SubtreeSlice {
  int node = -1;
  Mat x1, x2;                      // kept samples x kept categories
  std::vector<int> column_nodes;   // node index per kept column; -1 = remainder
  std::vector<int> kept_samples;   // indices into the original subject list
  std::vector<bool> kept_categories;  // per original column (children + remainder)
  bool testable = false;
  std::string skip_reason;         // empty when testable
};

// Columns are (children in tree order, remainder). Samples with a zero
// subtree total in either condition are masked; all-zero categories are
// masked. Throws InvalidNode on a leaf.
SubtreeSlice slice_subtree(const TaxTree& tree, const CountMat& q1,
                           const CountMat& q2, int node);

}  // namespace pairmn
