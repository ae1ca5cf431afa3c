#include "pairmn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "pairmn/errors.hpp"

namespace pairmn {

namespace {

using nlohmann::json;

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

long long parse_count(const std::string& s, const std::string& path, int line_no) {
  if (s.empty()) throw ParseError(path + ":" + std::to_string(line_no) + ": empty count");
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": bad count '" + s + "'");
  }
  if (pos != s.size() || v < 0)
    throw ParseError(path + ":" + std::to_string(line_no) +
                     ": counts must be nonnegative integers, got '" + s + "'");
  return v;
}

std::string json_double(double v) {
  // shortest representation that round-trips, for byte-stable reports
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    for (int prec = 1; prec <= 16; ++prec) {
      char probe[64];
      std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
      if (std::strtod(probe, nullptr) == v) return probe;
    }
  }
  return buf;
}

Vec json_vec(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ParseError("sim config: missing field '" + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ParseError("sim config: '" + key + "' must be an array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

}  // namespace

TaxTree read_node_table(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  int line_no = 0;
  std::vector<TaxTree::Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (line_no == 1) {
      if (fields.size() != 4 || fields[0] != "node_id" || fields[1] != "parent_id" ||
          fields[2] != "rank" || fields[3] != "name")
        throw ParseError(path + ":1: expected header 'node_id\\tparent_id\\trank\\tname'");
      continue;
    }
    if (fields.size() != 4)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    rows.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  if (rows.empty()) throw ParseError(path + ": no node rows");
  try {
    return TaxTree::from_rows(rows);
  } catch (const InvalidTree& e) {
    throw InvalidTree(path + ": " + e.what());
  }
}

void write_node_table(const TaxTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "node_id\tparent_id\trank\tname\n";
  for (int k = 0; k < tree.size(); ++k) {
    const TaxNode& node = tree.node(k);
    out << node.id << '\t' << (node.parent >= 0 ? tree.node(node.parent).id : "")
        << '\t' << node.rank << '\t' << node.name << '\n';
  }
}

LongCounts read_counts_long(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  int line_no = 0;
  LongCounts out;
  std::unordered_map<std::string, int> sample_index, node_index;
  struct Entry {
    int sample, condition, node;
    long long count;
  };
  std::vector<Entry> entries;
  std::map<std::pair<std::pair<int, int>, int>, int> dedupe;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (line_no == 1) {
      if (fields.size() != 4 || fields[0] != "sample_id" || fields[1] != "condition" ||
          fields[2] != "node_id" || fields[3] != "count")
        throw ParseError(path +
                         ":1: expected header 'sample_id\\tcondition\\tnode_id\\tcount'");
      continue;
    }
    if (fields.size() != 4)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    int condition = 0;
    if (fields[1] == "1")
      condition = 1;
    else if (fields[1] == "2")
      condition = 2;
    else
      throw ParseError(path + ":" + std::to_string(line_no) + ": condition must be 1 or 2");
    const long long count = parse_count(fields[3], path, line_no);
    auto [sit, s_new] = sample_index.emplace(fields[0], static_cast<int>(out.samples.size()));
    if (s_new) out.samples.push_back(fields[0]);
    auto [nit, n_new] = node_index.emplace(fields[2], static_cast<int>(out.nodes.size()));
    if (n_new) out.nodes.push_back(fields[2]);
    const auto key = std::make_pair(std::make_pair(sit->second, condition), nit->second);
    if (!dedupe.emplace(key, line_no).second)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": duplicate (sample, condition, node) triple");
    entries.push_back({sit->second, condition, nit->second, count});
  }
  if (entries.empty()) throw ParseError(path + ": no count rows");
  const int ns = static_cast<int>(out.samples.size());
  const int nn = static_cast<int>(out.nodes.size());
  out.counts1 = CountMat::Zero(ns, nn);
  out.counts2 = CountMat::Zero(ns, nn);
  out.seen_in_condition1.assign(ns, false);
  out.seen_in_condition2.assign(ns, false);
  for (const auto& e : entries) {
    if (e.condition == 1) {
      out.counts1(e.sample, e.node) = e.count;
      out.seen_in_condition1[e.sample] = true;
    } else {
      out.counts2(e.sample, e.node) = e.count;
      out.seen_in_condition2[e.sample] = true;
    }
  }
  return out;
}

void write_counts_long(const LongCounts& counts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "sample_id\tcondition\tnode_id\tcount\n";
  for (std::size_t i = 0; i < counts.samples.size(); ++i) {
    for (int cond = 1; cond <= 2; ++cond) {
      const CountMat& m = cond == 1 ? counts.counts1 : counts.counts2;
      const auto& seen =
          cond == 1 ? counts.seen_in_condition1 : counts.seen_in_condition2;
      if (!seen[i]) continue;
      for (std::size_t j = 0; j < counts.nodes.size(); ++j) {
        if (m(i, j) == 0) continue;
        out << counts.samples[i] << '\t' << cond << '\t' << counts.nodes[j] << '\t'
            << m(i, j) << '\n';
      }
    }
  }
}

TreeCounts bind_tree_counts(const TaxTree& tree, const LongCounts& counts,
                            std::vector<std::string>* warnings) {
  std::vector<int> node_map(counts.nodes.size());
  for (std::size_t j = 0; j < counts.nodes.size(); ++j) {
    const int k = tree.index_of(counts.nodes[j]);
    if (k < 0) throw InvalidInput("unknown node_id in counts: " + counts.nodes[j]);
    node_map[j] = k;
  }
  std::vector<int> keep;
  for (std::size_t i = 0; i < counts.samples.size(); ++i) {
    if (counts.seen_in_condition1[i] && counts.seen_in_condition2[i]) {
      keep.push_back(static_cast<int>(i));
    } else if (warnings) {
      warnings->push_back("dropping subject '" + counts.samples[i] +
                          "': present in only one condition");
    }
  }
  TreeCounts tc;
  tc.assigned1 = CountMat::Zero(keep.size(), tree.size());
  tc.assigned2 = CountMat::Zero(keep.size(), tree.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    tc.subjects.push_back(counts.samples[keep[i]]);
    for (std::size_t j = 0; j < counts.nodes.size(); ++j) {
      tc.assigned1(i, node_map[j]) += counts.counts1(keep[i], j);
      tc.assigned2(i, node_map[j]) += counts.counts2(keep[i], j);
    }
  }
  return tc;
}

PairedCounts bind_flat_counts(const LongCounts& cond1, const LongCounts& cond2) {
  if (cond1.samples.size() != cond2.samples.size())
    throw InvalidInput("flat test: subject sets differ between files");
  std::vector<std::string> sorted1 = cond1.samples, sorted2 = cond2.samples;
  std::sort(sorted1.begin(), sorted1.end());
  std::sort(sorted2.begin(), sorted2.end());
  if (sorted1 != sorted2)
    throw InvalidInput("flat test: subject sets differ between files");

  std::vector<std::string> categories = cond1.nodes;
  categories.insert(categories.end(), cond2.nodes.begin(), cond2.nodes.end());
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()), categories.end());

  const auto build = [&](const LongCounts& lc) {
    std::unordered_map<std::string, int> node_col;
    for (std::size_t j = 0; j < categories.size(); ++j) node_col[categories[j]] = j;
    Mat m = Mat::Zero(sorted1.size(), categories.size());
    std::unordered_map<std::string, int> sample_row;
    for (std::size_t i = 0; i < sorted1.size(); ++i) sample_row[sorted1[i]] = i;
    for (std::size_t i = 0; i < lc.samples.size(); ++i) {
      const int row = sample_row.at(lc.samples[i]);
      for (std::size_t j = 0; j < lc.nodes.size(); ++j) {
        // files are single-condition; take whichever condition carries data
        m(row, node_col.at(lc.nodes[j])) +=
            static_cast<double>(lc.counts1(i, j) + lc.counts2(i, j));
      }
    }
    return m;
  };
  PairedCounts pc;
  pc.counts1 = build(cond1);
  pc.counts2 = build(cond2);
  pc.subjects = sorted1;
  return pc;
}

std::string test_result_to_json(const TestResult& r) {
  json j;
  j["statistic"] = json::parse(json_double(r.statistic));
  j["df1"] = r.df1;
  j["df2"] = r.df2;
  j["p_value"] = json::parse(json_double(r.p_value));
  j["effective_n"] = r.effective_n;
  j["effective_d"] = r.effective_d;
  j["truncated_eigs"] = r.truncated_eigs;
  return j.dump(2) + "\n";
}

std::string report_to_json(const TaxTree& tree, const SubtreeReport& report,
                           GlobalMethod method) {
  json subtrees = json::array();
  for (const auto& e : report.entries) {
    const TaxNode& node = tree.node(e.node);
    json rec;
    rec["node_id"] = node.id;
    rec["name"] = node.name;
    rec["rank"] = node.rank;
    rec["skip_reason"] = to_string(e.status);
    if (e.status == SubtreeStatus::kTested) {
      rec["F"] = json::parse(json_double(e.result.statistic));
      rec["df1"] = e.result.df1;
      rec["df2"] = e.result.df2;
      rec["p"] = json::parse(json_double(e.result.p_value));
      rec["p_adjusted"] = json::parse(json_double(e.p_adjusted));
      rec["rejected"] = e.rejected;
    } else {
      rec["F"] = nullptr;
      rec["df1"] = nullptr;
      rec["df2"] = nullptr;
      rec["p"] = nullptr;
      rec["p_adjusted"] = nullptr;
      rec["rejected"] = false;
    }
    subtrees.push_back(rec);
  }
  json global;
  global["K_tested"] = report.n_tested;
  global["fisher_p"] = json::parse(json_double(global_test(report, GlobalMethod::kFisher)));
  if (report.n_tested >= 2) {
    global["second_smallest_p"] =
        json::parse(json_double(global_test(report, GlobalMethod::kSecondSmallest)));
  } else {
    global["second_smallest_p"] = nullptr;
  }
  global["selected_method"] =
      method == GlobalMethod::kFisher ? "fisher" : "second_smallest";
  json j;
  j["subtrees"] = subtrees;
  j["global"] = global;
  j["fdr_level"] = json::parse(json_double(report.fdr_level));
  return j.dump(2) + "\n";
}

void write_distance_csv(const Mat& d, const std::vector<std::string>& labels,
                        const std::string& path) {
  if (d.rows() != d.cols() || static_cast<std::size_t>(d.rows()) != labels.size())
    throw InvalidInput("write_distance_csv: label/matrix size mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "unit";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (int i = 0; i < d.rows(); ++i) {
    out << labels[i];
    for (int j = 0; j < d.cols(); ++j) out << ',' << json_double(d(i, j));
    out << '\n';
  }
}

std::pair<Mat, std::vector<std::string>> read_distance_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::vector<std::string> labels;
  {
    std::stringstream ss(line);
    std::string field;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      if (first) {
        if (field != "unit") throw ParseError(path + ":1: header must start with 'unit'");
        first = false;
      } else {
        labels.push_back(field);
      }
    }
  }
  const int m = static_cast<int>(labels.size());
  if (m < 2) throw ParseError(path + ": need at least 2 units");
  Mat d(m, m);
  int line_no = 1;
  for (int i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw ParseError(path + ": expected " + std::to_string(m) + " data rows");
    ++line_no;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',') || field != labels[i])
      throw ParseError(path + ":" + std::to_string(line_no) + ": row label mismatch");
    for (int j = 0; j < m; ++j) {
      if (!std::getline(ss, field, ','))
        throw ParseError(path + ":" + std::to_string(line_no) + ": too few columns");
      try {
        d(i, j) = std::stod(field);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
  }
  return {d, labels};
}

std::vector<std::pair<int, int>> read_pairs_table(
    const std::string& path, const std::vector<std::string>& unit_labels) {
  std::ifstream in = open_or_throw(path);
  std::unordered_map<std::string, int> unit_index;
  for (std::size_t i = 0; i < unit_labels.size(); ++i)
    unit_index[unit_labels[i]] = static_cast<int>(i);
  std::string line;
  int line_no = 0;
  std::map<std::string, std::pair<int, int>> by_subject;
  std::vector<std::string> subject_order;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tsv(line);
    if (line_no == 1) {
      if (fields.size() != 3 || fields[0] != "unit_id" || fields[1] != "subject_id" ||
          fields[2] != "condition")
        throw ParseError(path + ":1: expected header 'unit_id\\tsubject_id\\tcondition'");
      continue;
    }
    if (fields.size() != 3)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 fields");
    const auto it = unit_index.find(fields[0]);
    if (it == unit_index.end())
      throw ParseError(path + ":" + std::to_string(line_no) + ": unknown unit '" +
                       fields[0] + "'");
    if (!by_subject.count(fields[1])) {
      by_subject[fields[1]] = {-1, -1};
      subject_order.push_back(fields[1]);
    }
    auto& slot = by_subject[fields[1]];
    if (fields[2] == "1") {
      if (slot.first >= 0)
        throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate condition 1");
      slot.first = it->second;
    } else if (fields[2] == "2") {
      if (slot.second >= 0)
        throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate condition 2");
      slot.second = it->second;
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) + ": condition must be 1 or 2");
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& s : subject_order) {
    const auto& slot = by_subject[s];
    if (slot.first < 0 || slot.second < 0)
      throw InvalidInput("pairs table: subject '" + s + "' lacks both conditions");
    pairs.push_back(slot);
  }
  return pairs;
}

SimConfig read_sim_config(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  SimConfig cfg;
  const std::string kind = j.value("kind", "");
  if (kind == "flat") {
    cfg.is_tree = false;
    FlatSimConfig& f = cfg.flat;
    const std::string gen = j.value("generator", "mixed_dirichlet");
    if (gen == "mixed_dirichlet")
      f.generator = FlatGenerator::kMixedDirichlet;
    else if (gen == "lognormal")
      f.generator = FlatGenerator::kLogNormal;
    else
      throw ParseError("sim config: unknown generator '" + gen + "'");
    if (f.generator == FlatGenerator::kMixedDirichlet) {
      f.pi1 = json_vec(j, "pi1");
      f.pi2_alt = j.contains("pi2_alt") ? json_vec(j, "pi2_alt") : f.pi1;
      f.ell = json_vec(j, "ell");
      f.theta_a1 = j.value("theta_a1", 3.0);
      f.theta_a2 = j.value("theta_a2", 5.0);
      f.theta_ell = j.value("theta_ell", 1.0);
      f.theta_mode = j.value("theta_as_concentration", true)
                         ? ThetaMode::kConcentrationTotal
                         : ThetaMode::kVarianceShare;
    } else {
      f.mu1 = json_vec(j, "mu1");
      f.mu2_alt = j.contains("mu2_alt") ? json_vec(j, "mu2_alt") : f.mu1;
      f.sigma_sd = json_vec(j, "sigma");
    }
    if (j.contains("n")) {
      f.n_grid.clear();
      for (const auto& v : j.at("n")) f.n_grid.push_back(v.get<int>());
    }
    if (j.contains("rho")) {
      f.rho_grid.clear();
      for (const auto& v : j.at("rho")) f.rho_grid.push_back(v.get<double>());
    }
    f.total_mean = j.value("total_mean", 1000.0);
    f.replicates = j.value("replicates", 2000);
    f.alpha = j.value("alpha", 0.05);
    f.run_null = j.value("run_null", true);
    f.run_alt = j.value("run_alt", true);
    f.seed = j.value("seed", 1ULL);
    f.validate();
  } else if (kind == "tree") {
    cfg.is_tree = true;
    TreeSimConfig& t = cfg.tree;
    if (j.value("reference", "synthetic") == "synthetic") {
      SyntheticRefParams rp;
      rp.seed = j.value("reference_seed", rp.seed);
      rp.n_samples = j.value("reference_samples", rp.n_samples);
      t.reference = make_synthetic_reference(rp);
    } else {
      const std::string tree_path = j.value("reference_tree", "");
      const std::string counts_path = j.value("reference_counts", "");
      if (tree_path.empty() || counts_path.empty())
        throw ParseError(
            "sim config: user reference needs reference_tree and reference_counts");
      const TaxTree tree = read_node_table(tree_path);
      const LongCounts lc = read_counts_long(counts_path);
      // reference samples may appear under either condition; merge them
      std::vector<int> node_map(lc.nodes.size());
      for (std::size_t k = 0; k < lc.nodes.size(); ++k) {
        const int idx = tree.index_of(lc.nodes[k]);
        if (idx < 0) throw InvalidInput("unknown node_id in reference: " + lc.nodes[k]);
        node_map[k] = idx;
      }
      CountMat assigned = CountMat::Zero(lc.samples.size(), tree.size());
      for (std::size_t i = 0; i < lc.samples.size(); ++i)
        for (std::size_t k = 0; k < lc.nodes.size(); ++k)
          assigned(i, node_map[k]) += lc.counts1(i, k) + lc.counts2(i, k);
      t.reference = reference_from_counts(tree, assigned);
    }
    t.pattern = tree_pattern_from_string(j.value("pattern", "sparse"));
    if (j.contains("targets_cond1"))
      t.targets_cond1 = j.at("targets_cond1").get<std::vector<std::string>>();
    if (j.contains("targets_cond2"))
      t.targets_cond2 = j.at("targets_cond2").get<std::vector<std::string>>();
    if (j.contains("p_eps")) {
      t.peps_grid.clear();
      for (const auto& v : j.at("p_eps")) t.peps_grid.push_back(v.get<double>());
    }
    if (j.contains("n")) {
      t.n_grid.clear();
      for (const auto& v : j.at("n")) t.n_grid.push_back(v.get<int>());
    }
    t.replicates = j.value("replicates", 100);
    t.fdr_level = j.value("fdr", 0.05);
    t.alpha = j.value("alpha", 0.05);
    t.n_perm = j.value("n_perm", 199);
    t.run_permanova = j.value("run_permanova", true);
    t.run_dm = j.value("run_dm", true);
    t.strict_paper_binomial = j.value("strict_paper_binomial", false);
    t.seed = j.value("seed", 1ULL);
    t.apply_default_targets();
    t.validate();
  } else {
    throw ParseError(path + ": config field 'kind' must be 'flat' or 'tree'");
  }
  return cfg;
}

}  // namespace pairmn
