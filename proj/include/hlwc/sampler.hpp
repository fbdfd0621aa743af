#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hlwc/corpus.hpp"
#include "hlwc/likelihood.hpp"
#include "hlwc/ncrp_tree.hpp"
#include "hlwc/rng.hpp"

namespace hlwc {

// Sampler state of one word. Tokens are the word's observations expanded from
// its postings (a count of 4 in doc 7 gives four tokens with doc 7), in doc order.
struct WordState {
  std::vector<DocId> token_docs;
  std::vector<int> levels;          // z per token
  std::vector<Count> level_counts;  // tokens per level
  Path path;                        // empty for inactive words

  bool active() const { return !token_docs.empty(); }
  friend bool operator==(const WordState&, const WordState&) = default;
};

// Groups a word's tokens by level into per-level sorted doc counts.
LevelDocCounts level_doc_counts(const WordState& word, int depth);

struct ModelState {
  Hyperparams hyper;
  Tree tree;
  std::vector<WordState> words;  // indexed by word id
  std::vector<WordId> active;    // ascending
  Rng rng;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;  // completed sweeps

  ModelState(Hyperparams h, std::size_t n_docs) : hyper(std::move(h)), tree(hyper.depth, n_docs) {}
  friend bool operator==(const ModelState&, const ModelState&) = default;
};

// Inserts active words one at a time in a random order: levels uniform, then
// a path drawn from the path conditional given the words already inserted.
// Throws ValueError when there are no active words or hyper is invalid.
ModelState init_state(const WordView& words, const Hyperparams& hyper, std::uint64_t seed);

// Resamples a word's path. Returns whether it landed somewhere other than
// where it started. Inactive words are skipped.
bool sample_word_path(ModelState& state, WordId word, Rng& rng);
inline bool sample_word_path(ModelState& state, WordId word) {
  return sample_word_path(state, word, state.rng);
}

// Resamples one token's level. Returns whether the level changed.
bool sample_token_level(ModelState& state, WordId word, std::size_t token, Rng& rng);
inline bool sample_token_level(ModelState& state, WordId word, std::size_t token) {
  return sample_token_level(state, word, token, state.rng);
}

struct SweepStats {
  std::uint64_t words_moved = 0;
  std::uint64_t tokens_relevelled = 0;
  double joint_ll = 0.0;
};

double joint_log_likelihood(const ModelState& state);

// One pass: active words in a fresh random order; for each, its path then
// every token's level in index order.
SweepStats gibbs_sweep(ModelState& state, Rng& rng);
inline SweepStats gibbs_sweep(ModelState& state) { return gibbs_sweep(state, state.rng); }

using ProgressHook = std::function<void(const ModelState&, const SweepStats&)>;

struct RunReport {
  std::vector<double> ll_trace;
  std::vector<std::uint64_t> moved_trace;
  double best_ll = 0.0;
  std::uint64_t best_iteration = 0;
  std::optional<ModelState> best_state;
  double wall_seconds = 0.0;
  // Set when the hook threw; the run stops after the sweep that triggered it.
  std::string hook_error;
};

// Runs n_iterations sweeps using state.rng, recording the joint LL trace and
// a copy of the highest-LL state. The hook runs after each completed sweep.
RunReport run(ModelState& state, std::uint64_t n_iterations, const ProgressHook& hook = {});

// Full recount of tree counts from word paths and token levels. Throws
// ConsistencyError on any mismatch.
void assert_state_consistency(const ModelState& state);

}  // namespace hlwc
