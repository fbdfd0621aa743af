#include "hlwc/export.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace hlwc {

TreeExport build_tree_export(const ModelState& state, const Vocabulary& vocab,
                             const ExportOptions& options, const nlohmann::json& config) {
  const Tree& tree = state.tree;
  std::map<NodeId, std::vector<TreeExport::Word>> listed;
  for (WordId w : state.active) {
    const auto& ws = state.words[w];
    const double n_w = static_cast<double>(ws.token_docs.size());
    for (int l = 0; l < tree.depth(); ++l) {
      const std::uint64_t here = ws.level_counts[l];
      if (here < options.min_tokens || static_cast<double>(here) < options.min_share * n_w) continue;
      listed[ws.path[l]].push_back({w < vocab.size() ? vocab.term(w) : "w" + std::to_string(w), here});
    }
  }

  TreeExport out;
  std::deque<NodeId> queue{tree.root_id()};
  while (!queue.empty()) {
    const Node& n = tree.node(queue.front());
    queue.pop_front();
    TreeExport::NodeEntry e;
    e.id = n.id;
    e.level = n.level;
    e.parent = n.parent;
    e.n_words = n.n_words;
    e.doc_total = n.docs.total();
    e.words = std::move(listed[n.id]);
    std::sort(e.words.begin(), e.words.end(), [](const auto& a, const auto& b) {
      return a.tokens_here != b.tokens_here ? a.tokens_here > b.tokens_here : a.term < b.term;
    });
    e.top_docs = n.docs.nonzero();
    std::stable_sort(e.top_docs.begin(), e.top_docs.end(),
                     [](const DocCount& a, const DocCount& b) { return a.count > b.count; });
    if (e.top_docs.size() > options.top_docs) e.top_docs.resize(options.top_docs);
    out.nodes.push_back(std::move(e));
    queue.insert(queue.end(), n.children.begin(), n.children.end());
  }

  out.metadata = {
      {"config", config},
      {"iteration", state.iteration},
      {"joint_ll", joint_log_likelihood(state)},
      {"seed", state.seed},
  };
  return out;
}

nlohmann::json to_json(const TreeExport& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : n.words) words.push_back({{"term", w.term}, {"tokens_here", w.tokens_here}});
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : n.top_docs) docs.push_back({d.doc, d.count});
    nodes.push_back({
        {"id", n.id},
        {"level", n.level},
        {"parent", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)},
        {"n_words", n.n_words},
        {"doc_total", n.doc_total},
        {"words", std::move(words)},
        {"top_docs", std::move(docs)},
    });
  }
  return {{"schema", "hlwc-tree"}, {"schema_version", kTreeExportSchema}, {"metadata", tree.metadata},
          {"nodes", std::move(nodes)}};
}

std::string export_json(const ModelState& state, const Vocabulary& vocab, const ExportOptions& options,
                        const nlohmann::json& config) {
  return to_json(build_tree_export(state, vocab, options, config)).dump(2) + "\n";
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_dot(const TreeExport& tree, const ExportOptions& options) {
  std::ostringstream out;
  out << "digraph hlwc {\n  node [shape=box];\n";
  for (const auto& n : tree.nodes) {
    if (n.level < options.dot_first_level) continue;
    out << "  n" << n.id << " [label=\"";
    const std::size_t k = std::min(options.dot_top_words, n.words.size());
    for (std::size_t i = 0; i < k; ++i) out << (i ? "\\n" : "") << dot_escape(n.words[i].term);
    if (k == 0) out << "(" << n.n_words << " words)";
    out << "\"];\n";
  }
  for (const auto& n : tree.nodes) {
    if (!n.parent || n.level - 1 < options.dot_first_level) continue;
    out << "  n" << *n.parent << " -> n" << n.id << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_dot(const ModelState& state, const Vocabulary& vocab, const ExportOptions& options) {
  return export_dot(build_tree_export(state, vocab, options, nullptr), options);
}

}  // namespace hlwc
