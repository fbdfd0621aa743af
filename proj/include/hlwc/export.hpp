#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlwc/config.hpp"
#include "hlwc/corpus.hpp"
#include "hlwc/sampler.hpp"

namespace hlwc {

inline constexpr int kTreeExportSchema = 1;

struct TreeExport {
  struct Word {
    std::string term;
    std::uint64_t tokens_here = 0;
  };
  struct NodeEntry {
    NodeId id = 0;
    int level = 0;
    std::optional<NodeId> parent;
    std::uint64_t n_words = 0;
    std::uint64_t doc_total = 0;
    std::vector<Word> words;  // descending tokens_here, then term
    std::vector<DocCount> top_docs;
  };

  std::vector<NodeEntry> nodes;  // breadth-first from the root
  nlohmann::json metadata;
};

// metadata receives config, iteration and joint LL.
TreeExport build_tree_export(const ModelState& state, const Vocabulary& vocab,
                             const ExportOptions& options, const nlohmann::json& config);

nlohmann::json to_json(const TreeExport& tree);
std::string export_json(const ModelState& state, const Vocabulary& vocab, const ExportOptions& options,
                        const nlohmann::json& config);

// Graphviz digraph labelled with each node's top words.
std::string export_dot(const TreeExport& tree, const ExportOptions& options);
std::string export_dot(const ModelState& state, const Vocabulary& vocab, const ExportOptions& options);

}  // namespace hlwc
