#include "hlwc/sampler.hpp"

#include <chrono>
#include <map>
#include <numeric>
#include <utility>

#include "hlwc/errors.hpp"

namespace hlwc {

LevelDocCounts level_doc_counts(const WordState& word, int depth) {
  LevelDocCounts out(depth);
  for (std::size_t i = 0; i < word.token_docs.size(); ++i) {
    auto& bucket = out[word.levels[i]];
    const DocId d = word.token_docs[i];
    // Tokens are in doc order, so equal docs are adjacent within a level.
    if (!bucket.empty() && bucket.back().doc == d)
      ++bucket.back().count;
    else
      bucket.push_back({d, 1});
  }
  return out;
}

namespace {

void shuffle(std::vector<WordId>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

// Draws a path from the path conditional and attaches the word along it.
const CandidatePath& draw_and_attach(ModelState& state, WordState& ws, const LevelDocCounts& level_docs,
                                     Rng& rng, std::vector<ScoredCandidate>& scored) {
  scored = score_candidates(state.tree, level_docs, state.hyper);
  thread_local std::vector<double> log_w;
  log_w.resize(scored.size());
  for (std::size_t k = 0; k < scored.size(); ++k) log_w[k] = scored[k].log_score();
  const auto& chosen = scored[sample_log_discrete(log_w, rng)].path;
  ws.path = state.tree.attach(chosen, level_docs);
  return chosen;
}

std::uint64_t relevel_tokens(ModelState& state, WordState& ws, Rng& rng) {
  const int depth = state.hyper.depth;
  std::vector<const Node*> nodes(depth);
  for (int l = 0; l < depth; ++l) nodes[l] = &state.tree.node(ws.path[l]);
  std::vector<double> w(depth);
  std::uint64_t changed = 0;
  for (std::size_t i = 0; i < ws.token_docs.size(); ++i) {
    const int old_level = ws.levels[i];
    const DocId d = ws.token_docs[i];
    if (ws.level_counts[old_level] == 0)
      throw ConsistencyError("level count underflow at level " + std::to_string(old_level));
    state.tree.remove_token(ws.path[old_level], d);
    --ws.level_counts[old_level];

    level_weights(ws.level_counts, nodes, d, state.hyper, w);
    const int new_level = static_cast<int>(sample_discrete(w, rng));

    state.tree.add_token(ws.path[new_level], d);
    ++ws.level_counts[new_level];
    ws.levels[i] = new_level;
    if (new_level != old_level) ++changed;
  }
  return changed;
}

}  // namespace

ModelState init_state(const WordView& words, const Hyperparams& hyper, std::uint64_t seed) {
  hyper.validate();
  if (hyper.n_docs != words.n_docs())
    throw ValueError("hyperparameters declare " + std::to_string(hyper.n_docs) +
                     " documents but the corpus has " + std::to_string(words.n_docs()));

  ModelState state(hyper, words.n_docs());
  state.seed = seed;
  state.rng = Rng(seed);
  state.active = words.active_words();
  if (state.active.empty()) throw ValueError("corpus has no word with a nonzero count");

  const int depth = hyper.depth;
  state.words.resize(words.n_words());
  for (WordId w = 0; w < words.n_words(); ++w) {
    auto& ws = state.words[w];
    ws.level_counts.assign(depth, 0);
    for (const auto& dc : words.postings(w)) ws.token_docs.insert(ws.token_docs.end(), dc.count, dc.doc);
    ws.levels.assign(ws.token_docs.size(), 0);
  }

  std::vector<WordId> order = state.active;
  shuffle(order, state.rng);
  std::vector<ScoredCandidate> scored;
  for (WordId w : order) {
    auto& ws = state.words[w];
    for (auto& z : ws.levels) {
      z = static_cast<int>(state.rng.index(depth));
      ++ws.level_counts[z];
    }
    draw_and_attach(state, ws, level_doc_counts(ws, depth), state.rng, scored);
  }
  return state;
}

bool sample_word_path(ModelState& state, WordId word, Rng& rng) {
  auto& ws = state.words.at(word);
  if (!ws.active()) return false;
  const int depth = state.hyper.depth;
  const auto level_docs = level_doc_counts(ws, depth);
  const Path old = std::move(ws.path);
  state.tree.detach(old, level_docs);

  // Where the word started, expressed in the post-detach tree. Ids are never
  // reused, so a pruned node can be recognized by its absence.
  std::vector<std::optional<NodeId>> origin(depth - 1);
  for (int l = 1; l < depth && state.tree.contains(old[l]); ++l) origin[l - 1] = old[l];

  thread_local std::vector<ScoredCandidate> scored;
  const auto& chosen = draw_and_attach(state, ws, level_docs, rng, scored);
  return chosen.steps != origin;
}

bool sample_token_level(ModelState& state, WordId word, std::size_t token, Rng& rng) {
  auto& ws = state.words.at(word);
  if (token >= ws.token_docs.size()) throw ValueError("token index out of range");
  const int depth = state.hyper.depth;
  std::vector<const Node*> nodes(depth);
  for (int l = 0; l < depth; ++l) nodes[l] = &state.tree.node(ws.path[l]);

  const int old_level = ws.levels[token];
  const DocId d = ws.token_docs[token];
  if (ws.level_counts[old_level] == 0)
    throw ConsistencyError("level count underflow at level " + std::to_string(old_level));
  state.tree.remove_token(ws.path[old_level], d);
  --ws.level_counts[old_level];

  std::vector<double> w(depth);
  level_weights(ws.level_counts, nodes, d, state.hyper, w);
  const int new_level = static_cast<int>(sample_discrete(w, rng));

  state.tree.add_token(ws.path[new_level], d);
  ++ws.level_counts[new_level];
  ws.levels[token] = new_level;
  return new_level != old_level;
}

double joint_log_likelihood(const ModelState& state) {
  std::vector<std::vector<Count>> counts;
  counts.reserve(state.active.size());
  for (WordId w : state.active) counts.push_back(state.words[w].level_counts);
  return joint_log_likelihood(state.tree, counts, state.hyper);
}

SweepStats gibbs_sweep(ModelState& state, Rng& rng) {
  SweepStats stats;
  std::vector<WordId> order = state.active;
  shuffle(order, rng);
  for (WordId w : order) {
    if (sample_word_path(state, w, rng)) ++stats.words_moved;
    stats.tokens_relevelled += relevel_tokens(state, state.words[w], rng);
  }
  ++state.iteration;
  stats.joint_ll = joint_log_likelihood(state);
  return stats;
}

RunReport run(ModelState& state, std::uint64_t n_iterations, const ProgressHook& hook) {
  if (n_iterations == 0) throw ValueError("n_iterations must be at least 1");
  RunReport report;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t it = 0; it < n_iterations; ++it) {
    const SweepStats stats = gibbs_sweep(state);
    report.ll_trace.push_back(stats.joint_ll);
    report.moved_trace.push_back(stats.words_moved);
    if (!report.best_state || stats.joint_ll > report.best_ll) {
      report.best_ll = stats.joint_ll;
      report.best_iteration = state.iteration;
      report.best_state = state;
    }
    if (hook) {
      try {
        hook(state, stats);
      } catch (const std::exception& e) {
        report.hook_error = e.what();
        break;
      }
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void assert_state_consistency(const ModelState& state) {
  const Tree& tree = state.tree;
  assert_consistency(tree);
  const int depth = state.hyper.depth;

  std::map<NodeId, std::uint64_t> customers;
  std::map<NodeId, std::map<DocId, std::uint64_t>> docs;
  std::size_t n_active = 0;
  for (WordId w = 0; w < state.words.size(); ++w) {
    const auto& ws = state.words[w];
    const std::string who = "word " + std::to_string(w);
    if (!ws.active()) {
      if (!ws.path.empty()) throw ConsistencyError(who + " is inactive but has a path");
      continue;
    }
    ++n_active;
    if (ws.path.size() != static_cast<std::size_t>(depth))
      throw ConsistencyError(who + " path has the wrong length");
    if (ws.levels.size() != ws.token_docs.size()) throw ConsistencyError(who + " token/level size mismatch");
    for (int l = 0; l < depth; ++l) {
      if (!tree.contains(ws.path[l])) throw ConsistencyError(who + " path references a missing node");
      const Node& n = tree.node(ws.path[l]);
      if (n.level != l) throw ConsistencyError(who + " path node at the wrong level");
      if (l == 0 ? n.id != tree.root_id() : n.parent != ws.path[l - 1])
        throw ConsistencyError(who + " path is not a parent chain");
      ++customers[n.id];
    }
    std::vector<Count> recount(depth, 0);
    for (std::size_t i = 0; i < ws.levels.size(); ++i) {
      const int z = ws.levels[i];
      if (z < 0 || z >= depth) throw ConsistencyError(who + " token level out of range");
      ++recount[z];
      ++docs[ws.path[z]][ws.token_docs[i]];
    }
    if (recount != ws.level_counts) throw ConsistencyError(who + " level counts disagree with token levels");
  }
  if (tree.root().n_words != n_active)
    throw ConsistencyError("root has " + std::to_string(tree.root().n_words) + " customers but " +
                           std::to_string(n_active) + " words are active");

  for (const auto& [id, n] : tree.nodes()) {
    const auto c = customers.count(id) ? customers.at(id) : 0;
    if (c != n.n_words)
      throw ConsistencyError("node " + std::to_string(id) + " field n_words: stored " +
                             std::to_string(n.n_words) + ", recount " + std::to_string(c));
    const auto& expect = docs[id];
    std::uint64_t total = 0;
    for (auto [d, k] : expect) {
      if (n.docs.count(d) != k)
        throw ConsistencyError("node " + std::to_string(id) + " field doc_counts[" + std::to_string(d) +
                               "]: stored " + std::to_string(n.docs.count(d)) + ", recount " +
                               std::to_string(k));
      total += k;
    }
    if (total != n.docs.total())
      throw ConsistencyError("node " + std::to_string(id) + " field doc_total: stored " +
                             std::to_string(n.docs.total()) + ", recount " + std::to_string(total));
  }
}

}  // namespace hlwc
