#include "pairmn/taxtree.hpp"

#include <unordered_map>

#include "pairmn/errors.hpp"

namespace pairmn {

TaxTree TaxTree::from_rows(const std::vector<Row>& rows) {
  if (rows.empty()) throw InvalidTree("node table is empty");
  TaxTree t;
  std::unordered_map<std::string, int> index;
  t.nodes_.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.id.empty()) throw InvalidTree("node with empty id");
    if (!index.emplace(r.id, static_cast<int>(t.nodes_.size())).second)
      throw InvalidTree("duplicate node id: " + r.id);
    t.nodes_.push_back(TaxNode{r.id, r.rank, r.name, -1, {}});
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.parent_id.empty()) {
      if (t.root_ >= 0)
        throw InvalidTree("multiple roots: " + t.nodes_[t.root_].id + ", " + r.id);
      t.root_ = static_cast<int>(k);
      continue;
    }
    const auto it = index.find(r.parent_id);
    if (it == index.end())
      throw InvalidTree("unknown parent id: " + r.parent_id + " (node " + r.id + ")");
    if (it->second == static_cast<int>(k))
      throw InvalidTree("node is its own parent: " + r.id);
    t.nodes_[k].parent = it->second;
    t.nodes_[it->second].children.push_back(static_cast<int>(k));
  }
  if (t.root_ < 0) throw InvalidTree("no root node (empty parent_id) found");

  // reachability doubles as the cycle check
  t.preorder_.reserve(t.nodes_.size());
  std::vector<int> stack{t.root_};
  std::vector<bool> seen(t.nodes_.size(), false);
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    if (seen[k]) throw InvalidTree("cycle through node " + t.nodes_[k].id);
    seen[k] = true;
    t.preorder_.push_back(k);
    const auto& ch = t.nodes_[k].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (std::size_t k = 0; k < t.nodes_.size(); ++k) {
    if (!seen[k])
      throw InvalidTree("node not reachable from root: " + t.nodes_[k].id);
  }
  t.bottom_up_.assign(t.preorder_.rbegin(), t.preorder_.rend());
  for (int k = 0; k < t.size(); ++k)
    if (t.is_internal(k)) t.internal_.push_back(k);
  return t;
}

int TaxTree::index_of(const std::string& id) const {
  for (int k = 0; k < size(); ++k)
    if (nodes_[k].id == id) return k;
  return -1;
}

void TreeCounts::validate(const TaxTree& tree) const {
  if (assigned1.rows() != assigned2.rows())
    throw InvalidInput("TreeCounts: condition matrices must share subjects");
  if (assigned1.cols() != tree.size() || assigned2.cols() != tree.size())
    throw InvalidInput("TreeCounts: column count must equal node count");
  if (!subjects.empty() && static_cast<int>(subjects.size()) != n())
    throw InvalidInput("TreeCounts: subject label count mismatch");
  if ((assigned1.array() < 0).any() || (assigned2.array() < 0).any())
    throw InvalidInput("TreeCounts: counts must be >= 0");
}

CountMat aggregate_q(const TaxTree& tree, const CountMat& assigned) {
  if (assigned.cols() != tree.size())
    throw InvalidInput("aggregate_q: column count must equal node count");
  if ((assigned.array() < 0).any())
    throw InvalidInput("aggregate_q: counts must be >= 0");
  CountMat q = assigned;
  for (int k : tree.bottom_up()) {
    const int parent = tree.node(k).parent;
    if (parent >= 0) q.col(parent) += q.col(k);
  }
  return q;
}

CountVec aggregate_q(const TaxTree& tree, const CountVec& assigned) {
  CountMat m(1, assigned.size());
  m.row(0) = assigned.transpose();
  return aggregate_q(tree, m).row(0).transpose();
}

SubtreeSlice slice_subtree(const TaxTree& tree, const CountMat& q1,
                           const CountMat& q2, int node) {
  if (node < 0 || node >= tree.size()) throw InvalidNode("node index out of range");
  if (!tree.is_internal(node))
    throw InvalidNode("slice_subtree: " + tree.node(node).id + " is a leaf");
  const int n = static_cast<int>(q1.rows());
  const auto& children = tree.node(node).children;
  const int d0 = static_cast<int>(children.size()) + 1;

  // raw slice: children columns then the remainder
  CountMat raw1(n, d0), raw2(n, d0);
  for (int j = 0; j < d0 - 1; ++j) {
    raw1.col(j) = q1.col(children[j]);
    raw2.col(j) = q2.col(children[j]);
  }
  raw1.col(d0 - 1) = q1.col(node);
  raw2.col(d0 - 1) = q2.col(node);
  for (int j = 0; j < d0 - 1; ++j) {
    raw1.col(d0 - 1) -= raw1.col(j);
    raw2.col(d0 - 1) -= raw2.col(j);
  }

  SubtreeSlice s;
  s.node = node;
  for (int i = 0; i < n; ++i) {
    if (q1(i, node) > 0 && q2(i, node) > 0) s.kept_samples.push_back(i);
  }
  s.kept_categories.assign(d0, false);
  std::vector<int> cols;
  for (int j = 0; j < d0; ++j) {
    long long tot = 0;
    for (int i : s.kept_samples) tot += raw1(i, j) + raw2(i, j);
    if (tot > 0) {
      s.kept_categories[j] = true;
      cols.push_back(j);
    }
  }
  const int nk = static_cast<int>(s.kept_samples.size());
  const int dk = static_cast<int>(cols.size());
  s.x1.resize(nk, dk);
  s.x2.resize(nk, dk);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < dk; ++j) {
      s.x1(i, j) = static_cast<double>(raw1(s.kept_samples[i], cols[j]));
      s.x2(i, j) = static_cast<double>(raw2(s.kept_samples[i], cols[j]));
    }
  for (int j : cols)
    s.column_nodes.push_back(j < d0 - 1 ? children[j] : -1);

  if (nk == 0) {
    s.skip_reason = "skipped: degenerate";
  } else if (dk < 2) {
    s.skip_reason = "skipped: degenerate";
  } else if (nk <= dk) {
    s.skip_reason = "skipped: n<=d";
  } else {
    s.testable = true;
  }
  return s;
}

}  // namespace pairmn
