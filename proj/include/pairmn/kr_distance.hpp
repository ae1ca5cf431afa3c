#pragma once

#include "pairmn/taxtree.hpp"

namespace pairmn {

// Remainder-proportion profile: for each node, the share of reads assigned
// to it but to none of its children, relative to the root total. Leaves have
// no children, so their share is Q(v)/Q(root). Entries sum to 1.
Vec remainder_profile(const TaxTree& tree, const CountVec& q);

// L1 Kantorovich-Rubinstein distance between two cumulative-count vectors on
// the same tree: the sum over nodes of absolute remainder-share differences.
double kr_distance(const TaxTree& tree, const CountVec& qa, const CountVec& qb);

// All pairwise distances between the rows of a stack of Q vectors.
Mat kr_distance_matrix(const TaxTree& tree, const CountMat& q_rows);

}  // namespace pairmn
