#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hlwc/corpus.hpp"
#include "hlwc/likelihood.hpp"
#include "hlwc/ncrp_tree.hpp"
#include "hlwc/rng.hpp"

namespace hlwc {

// Planted configuration behind a synthetic corpus.
struct SyntheticTruth {
  int depth = 0;
  std::vector<Path> paths;                      // per word, root to leaf
  std::vector<std::vector<double>> theta;       // per word, level proportions
  std::vector<std::vector<DocId>> token_docs;   // per word, in generation order
  std::vector<std::vector<int>> token_levels;   // per word, aligned with token_docs
};

struct SyntheticData {
  Corpus corpus;
  Vocabulary vocab;
  SyntheticTruth truth;
};

// Forward sampling of the generative model: paths from the nCRP, a level
// mixture per word from Dirichlet(alpha), a document distribution per node
// from Dirichlet(eta), then each token's level and document.
SyntheticData generate_synthetic(std::size_t n_docs, std::size_t vocab_size,
                                 std::size_t tokens_per_word, const Hyperparams& hyper,
                                 std::uint64_t seed);

// Same model with the tree fixed in advance: a balanced tree with
// fan_out[l] children under every node at level l, words dealt to leaves
// round-robin. Level mixtures, node distributions and tokens are drawn as
// in generate_synthetic.
SyntheticData generate_planted(std::size_t n_docs, std::span<const std::size_t> fan_out,
                               std::size_t vocab_size, std::size_t tokens_per_word,
                               const Hyperparams& hyper, std::uint64_t seed);

// log of a Gamma(shape, 1) variate; stable for tiny shapes.
double sample_log_gamma(double shape, Rng& rng);

// Dirichlet draw, normalized in log space so tiny concentrations do not
// collapse to all zeros.
std::vector<double> sample_dirichlet(std::span<const double> concentration, Rng& rng);

}  // namespace hlwc
