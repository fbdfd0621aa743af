#include <set>

#include "doctest.h"
#include "hlwc/export.hpp"
#include "hlwc/synthetic.hpp"

using namespace hlwc;

namespace {

struct Fixture {
  ModelState state;
  Vocabulary vocab;
};

Fixture fitted(std::uint64_t seed) {
  auto h = Hyperparams::defaults(15, 3);
  auto data = generate_synthetic(15, 25, 20, h, seed);
  Fixture f{init_state(WordView(data.corpus), h, seed), data.vocab};
  run(f.state, 5);
  return f;
}

}  // namespace

TEST_CASE("tree export structure") {
  auto f = fitted(4);
  ExportOptions opts;
  auto tree = build_tree_export(f.state, f.vocab, opts, {{"k", 1}});
  REQUIRE(tree.nodes.size() == f.state.tree.size());
  CHECK(tree.nodes[0].id == f.state.tree.root_id());
  CHECK_FALSE(tree.nodes[0].parent);
  CHECK(tree.nodes[0].n_words == f.state.active.size());

  std::set<NodeId> seen;
  int prev_level = 0;
  std::uint64_t doc_total = 0;
  for (const auto& n : tree.nodes) {
    CHECK(n.level >= prev_level);  // breadth-first
    prev_level = n.level;
    if (n.parent) CHECK(seen.count(*n.parent) == 1);
    seen.insert(n.id);
    doc_total += n.doc_total;
    for (std::size_t i = 1; i < n.words.size(); ++i)
      CHECK(n.words[i - 1].tokens_here >= n.words[i].tokens_here);
    CHECK(n.top_docs.size() <= opts.top_docs);
    for (std::size_t i = 1; i < n.top_docs.size(); ++i) CHECK(n.top_docs[i - 1].count >= n.top_docs[i].count);
  }
  std::uint64_t tokens = 0;
  for (const auto& w : f.state.words) tokens += w.token_docs.size();
  CHECK(doc_total == tokens);
  CHECK(tree.metadata["config"]["k"] == 1);
  CHECK(tree.metadata["iteration"] == 5);

  auto j = to_json(tree);
  CHECK(j["schema"] == "hlwc-tree");
  CHECK(j["schema_version"] == kTreeExportSchema);
  CHECK(j["nodes"].size() == tree.nodes.size());
}

TEST_CASE("word listing thresholds") {
  auto f = fitted(6);
  ExportOptions all;
  all.min_share = 0.0;
  all.min_tokens = 1;
  auto tree = build_tree_export(f.state, f.vocab, all, nullptr);
  std::size_t listings = 0;
  for (const auto& n : tree.nodes) listings += n.words.size();
  std::size_t expected = 0;
  for (WordId w : f.state.active)
    for (auto c : f.state.words[w].level_counts) expected += c > 0;
  CHECK(listings == expected);

  ExportOptions strict;
  strict.min_share = 0.5;
  auto tight = build_tree_export(f.state, f.vocab, strict, nullptr);
  for (const auto& n : tight.nodes) {
    for (const auto& w : n.words) {
      // term maps back to the word id through the vocabulary
      WordId id = 0;
      while (f.vocab.term(id) != w.term) ++id;
      CHECK(2 * w.tokens_here >= f.state.words[id].token_docs.size());
    }
  }
}

TEST_CASE("dot output") {
  auto f = fitted(8);
  ExportOptions opts;
  const std::string dot = export_dot(f.state, f.vocab, opts);
  CHECK(dot.rfind("digraph hlwc {", 0) == 0);
  const std::string root = "n" + std::to_string(f.state.tree.root_id()) + " [";
  CHECK(dot.find(root) != std::string::npos);

  opts.dot_first_level = 1;
  const std::string hidden = export_dot(f.state, f.vocab, opts);
  CHECK(hidden.find(root) == std::string::npos);
  CHECK(hidden.find("n" + std::to_string(f.state.tree.root_id()) + " ->") == std::string::npos);
}
