#include "pairmn/synthetic_ref.hpp"

#include <cmath>
#include <unordered_map>

#include "pairmn/errors.hpp"
#include "pairmn/kr_distance.hpp"
#include "pairmn/samplers.hpp"

namespace pairmn {

namespace {

struct TreeBuilder {
  std::vector<TaxTree::Row> rows;
  std::unordered_map<std::string, bool> seen;

  void add(const std::string& id, const std::string& parent) {
    const std::string rank = id.substr(0, 1);
    static const std::unordered_map<std::string, std::string> rank_names = {
        {"k", "kingdom"}, {"p", "phylum"}, {"c", "class"},  {"o", "order"},
        {"f", "family"},  {"g", "genus"},  {"s", "species"}};
    const auto it = rank_names.find(rank);
    rows.push_back({id, parent, it != rank_names.end() ? it->second : "clade",
                    id.substr(id.find("__") + 2)});
  }
};

// Fixed taxonomy: a fully named Streptococcus lineage plus named gut/airway
// genera, padded with generated clades so the internal-node count is in the
// range of a real 16S taxonomy.
std::vector<TaxTree::Row> synthetic_tree_rows() {
  TreeBuilder b;
  b.add("k__Bacteria", "");
  b.add("p__Firmicutes", "k__Bacteria");
  b.add("c__Bacilli", "p__Firmicutes");
  b.add("c__Clostridia", "p__Firmicutes");
  b.add("o__Lactobacillales", "c__Bacilli");
  b.add("o__Bacillales", "c__Bacilli");
  b.add("f__Streptococcaceae", "o__Lactobacillales");
  b.add("f__Lactobacillaceae", "o__Lactobacillales");
  b.add("f__Enterococcaceae", "o__Lactobacillales");
  b.add("f__Aerococcaceae", "o__Lactobacillales");
  b.add("f__Carnobacteriaceae", "o__Lactobacillales");
  b.add("f__Leuconostocaceae", "o__Lactobacillales");
  b.add("g__Streptococcus", "f__Streptococcaceae");
  b.add("s__Streptococcus_mitis", "g__Streptococcus");
  b.add("s__Streptococcus_salivarius", "g__Streptococcus");
  b.add("g__Lactococcus", "f__Streptococcaceae");
  b.add("g__Lactobacillus", "f__Lactobacillaceae");
  b.add("g__Pediococcus", "f__Lactobacillaceae");
  b.add("g__Enterococcus", "f__Enterococcaceae");
  b.add("g__Vagococcus", "f__Enterococcaceae");
  b.add("g__Aerococcus", "f__Aerococcaceae");
  b.add("g__Abiotrophia", "f__Aerococcaceae");
  b.add("g__Carnobacterium", "f__Carnobacteriaceae");
  b.add("g__Granulicatella", "f__Carnobacteriaceae");
  b.add("g__Leuconostoc", "f__Leuconostocaceae");
  b.add("g__Weissella", "f__Leuconostocaceae");
  b.add("f__Staphylococcaceae", "o__Bacillales");
  b.add("g__Staphylococcus", "f__Staphylococcaceae");
  b.add("g__Salinicoccus", "f__Staphylococcaceae");
  b.add("o__Clostridiales", "c__Clostridia");
  b.add("f__Eubacteriaceae", "o__Clostridiales");
  b.add("g__Eubacterium", "f__Eubacteriaceae");
  b.add("g__Anaerofustis", "f__Eubacteriaceae");
  b.add("f__Ruminococcaceae", "o__Clostridiales");
  b.add("g__Ruminococcus", "f__Ruminococcaceae");
  b.add("g__Faecalibacterium", "f__Ruminococcaceae");
  b.add("f__Lachnospiraceae", "o__Clostridiales");
  b.add("g__Blautia", "f__Lachnospiraceae");
  b.add("g__Roseburia", "f__Lachnospiraceae");
  b.add("p__Bacteroidetes", "k__Bacteria");
  b.add("c__Bacteroidia", "p__Bacteroidetes");
  b.add("o__Bacteroidales", "c__Bacteroidia");
  b.add("f__Bacteroidaceae", "o__Bacteroidales");
  b.add("g__Bacteroides", "f__Bacteroidaceae");
  b.add("f__Porphyromonadaceae", "o__Bacteroidales");
  b.add("g__Porphyromonas", "f__Porphyromonadaceae");
  b.add("g__Parabacteroides", "f__Porphyromonadaceae");
  b.add("f__Prevotellaceae", "o__Bacteroidales");
  b.add("g__Prevotella", "f__Prevotellaceae");
  b.add("f__Rikenellaceae", "o__Bacteroidales");
  b.add("g__Alistipes", "f__Rikenellaceae");
  b.add("p__Proteobacteria", "k__Bacteria");
  b.add("c__Gammaproteobacteria", "p__Proteobacteria");
  b.add("o__Pseudomonadales", "c__Gammaproteobacteria");
  b.add("f__Moraxellaceae", "o__Pseudomonadales");
  b.add("g__Moraxella", "f__Moraxellaceae");
  b.add("g__Acinetobacter", "f__Moraxellaceae");
  b.add("o__Enterobacteriales", "c__Gammaproteobacteria");
  b.add("f__Enterobacteriaceae", "o__Enterobacteriales");
  b.add("g__Escherichia", "f__Enterobacteriaceae");
  b.add("g__Klebsiella", "f__Enterobacteriaceae");

  const char* auto_phyla[] = {"p__Actinobacteria", "p__Verrucomicrobia",
                              "p__Fusobacteria", "p__Spirochaetes"};
  for (int pi = 0; pi < 4; ++pi) {
    const std::string p = auto_phyla[pi];
    b.add(p, "k__Bacteria");
    for (int c = 0; c < 3; ++c) {
      const std::string cn = "c__Clade" + std::to_string(pi) + "_" + std::to_string(c);
      b.add(cn, p);
      for (int o = 0; o < 4; ++o) {
        const std::string on = "o__Clade" + std::to_string(pi) + "_" +
                               std::to_string(c) + std::to_string(o);
        b.add(on, cn);
        for (int f = 0; f < 4; ++f) {
          const std::string fn = "f__Clade" + std::to_string(pi) + "_" +
                                 std::to_string(c) + std::to_string(o) + std::to_string(f);
          b.add(fn, on);
          for (int g = 0; g < 2; ++g)
            b.add("g__Clade" + std::to_string(pi) + "_" + std::to_string(c) +
                      std::to_string(o) + std::to_string(f) + std::to_string(g),
                  fn);
        }
      }
    }
  }
  const char* fill_classes[] = {"c__Clostridia", "c__Bacteroidia",
                                "c__Gammaproteobacteria"};
  const char* fill_tags[] = {"x1", "x2", "x3"};
  for (int t = 0; t < 3; ++t) {
    for (int o = 0; o < 4; ++o) {
      const std::string on = std::string("o__Fill") + fill_tags[t] + "_" + std::to_string(o);
      b.add(on, fill_classes[t]);
      for (int f = 0; f < 4; ++f) {
        const std::string fn = std::string("f__Fill") + fill_tags[t] + "_" +
                               std::to_string(o) + std::to_string(f);
        b.add(fn, on);
        for (int g = 0; g < 2; ++g)
          b.add(std::string("g__Fill") + fill_tags[t] + "_" + std::to_string(o) +
                    std::to_string(f) + std::to_string(g),
                fn);
      }
    }
  }
  return b.rows;
}

// Template remainder shares. Named taxa carry pinned masses; every internal
// node keeps a small directly-assigned remainder; the rest spreads over the
// generated genera with mild deterministic jitter.
Vec template_profile(const TaxTree& tree, RngStream& rng) {
  const std::unordered_map<std::string, double> pinned = {
      {"s__Streptococcus_mitis", 0.022}, {"s__Streptococcus_salivarius", 0.020},
      {"g__Streptococcus", 0.020},       {"g__Lactococcus", 0.035},
      {"g__Lactobacillus", 0.010},       {"g__Pediococcus", 0.008},
      {"g__Enterococcus", 0.012},        {"g__Vagococcus", 0.006},
      {"g__Aerococcus", 0.010},          {"g__Abiotrophia", 0.006},
      {"g__Carnobacterium", 0.008},      {"g__Granulicatella", 0.006},
      {"g__Leuconostoc", 0.008},         {"g__Weissella", 0.005},
      {"g__Staphylococcus", 0.012},      {"g__Salinicoccus", 0.006},
      {"g__Eubacterium", 0.010},         {"g__Anaerofustis", 0.006},
      {"g__Ruminococcus", 0.010},        {"g__Faecalibacterium", 0.020},
      {"g__Blautia", 0.014},             {"g__Roseburia", 0.010},
      {"g__Bacteroides", 0.030},         {"g__Porphyromonas", 0.012},
      {"g__Parabacteroides", 0.010},     {"g__Prevotella", 0.018},
      {"g__Alistipes", 0.012},           {"g__Moraxella", 0.010},
      {"g__Acinetobacter", 0.010},       {"g__Escherichia", 0.010},
      {"g__Klebsiella", 0.010}};
  constexpr double kInternalRemainder = 0.001;

  const int k0 = tree.size();
  Vec beta = Vec::Zero(k0);
  double pinned_total = 0.0;
  for (int k = 0; k < k0; ++k) {
    const auto it = pinned.find(tree.node(k).id);
    if (it != pinned.end()) {
      beta(k) = it->second;
      pinned_total += it->second;
    }
  }
  std::vector<int> free_leaves;
  int free_internal = 0;
  for (int k = 0; k < k0; ++k) {
    if (beta(k) > 0.0) continue;
    if (tree.is_internal(k)) {
      beta(k) = kInternalRemainder;
      ++free_internal;
    } else {
      free_leaves.push_back(k);
    }
  }
  const double leaf_total = 1.0 - pinned_total - kInternalRemainder * free_internal;
  if (leaf_total <= 0.0)
    throw InvalidInput("synthetic reference: pinned masses exceed the budget");
  double wsum = 0.0;
  Vec w(free_leaves.size());
  for (std::size_t i = 0; i < free_leaves.size(); ++i) {
    w(i) = 0.7 + 0.8 * rng.uniform();
    wsum += w(i);
  }
  for (std::size_t i = 0; i < free_leaves.size(); ++i)
    beta(free_leaves[i]) = w(i) / wsum * leaf_total;
  return beta / beta.sum();
}

}  // namespace

void TreeReference::validate() const {
  if (compositions.rows() < 1 || compositions.cols() != tree.size())
    throw InvalidInput("TreeReference: composition shape mismatch");
  if (static_cast<int>(totals.size()) != n_samples())
    throw InvalidInput("TreeReference: totals size mismatch");
  for (long long t : totals)
    if (t <= 0) throw InvalidInput("TreeReference: totals must be > 0");
  for (int i = 0; i < compositions.rows(); ++i) {
    if ((compositions.row(i).array() < 0.0).any() ||
        std::fabs(compositions.row(i).sum() - 1.0) > 1e-9)
      throw InvalidInput("TreeReference: rows must be compositions");
  }
}

TreeReference make_synthetic_reference(const SyntheticRefParams& params) {
  if (params.n_samples < 2)
    throw InvalidInput("make_synthetic_reference: need at least 2 samples");
  if (!(params.log_sigma >= 0.0) || params.total_base < 1 || params.total_mean < 0.0)
    throw InvalidInput("make_synthetic_reference: invalid parameters");
  TreeReference ref;
  ref.tree = TaxTree::from_rows(synthetic_tree_rows());
  const int k0 = ref.tree.size();

  RngStream rng(params.seed, 0x5ef5);
  const Vec beta = template_profile(ref.tree, rng);
  const Vec log_beta = beta.array().log();

  ref.compositions.resize(params.n_samples, k0);
  ref.totals.resize(params.n_samples);
  for (int i = 0; i < params.n_samples; ++i) {
    Vec z(k0);
    for (int k = 0; k < k0; ++k)
      z(k) = log_beta(k) + params.log_sigma * rng.normal();
    const Vec e = (z.array() - z.maxCoeff()).exp();
    ref.compositions.row(i) = (e / e.sum()).transpose();
    ref.totals[i] = params.total_base + sample_poisson(params.total_mean, rng);
  }
  ref.validate();
  return ref;
}

TreeReference reference_from_counts(const TaxTree& tree, const CountMat& assigned) {
  if (assigned.rows() < 2)
    throw InvalidInput("reference_from_counts: need at least 2 samples");
  TreeReference ref;
  ref.tree = tree;
  const CountMat q = aggregate_q(tree, assigned);
  ref.compositions.resize(assigned.rows(), tree.size());
  ref.totals.resize(assigned.rows());
  for (int i = 0; i < assigned.rows(); ++i) {
    const CountVec qi = q.row(i).transpose();
    ref.compositions.row(i) = remainder_profile(tree, qi).transpose();
    ref.totals[i] = qi(tree.root());
  }
  ref.validate();
  return ref;
}

}  // namespace pairmn
