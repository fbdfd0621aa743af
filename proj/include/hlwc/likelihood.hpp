#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hlwc/errors.hpp"
#include "hlwc/ncrp_tree.hpp"
#include "hlwc/special.hpp"
#include "hlwc/types.hpp"

namespace hlwc {

struct Hyperparams {
  double gamma = 1.0;
  std::vector<double> eta;    // per level
  std::vector<double> alpha;  // per level
  int depth = 3;
  std::size_t n_docs = 0;

  // gamma = 1, eta = alpha = 1 at every level.
  static Hyperparams defaults(std::size_t n_docs, int depth = 3);

  // Throws ValueError unless every parameter is strictly positive and both
  // vectors have one entry per level.
  void validate() const;
  double alpha_sum() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// Stand-in for a node that does not exist yet.
struct EmptyDocs {
  Count count(DocId) const { return 0; }
  std::uint64_t total() const { return 0; }
};

// log P(added | node) under a symmetric Dirichlet(eta) over n_docs
// documents with the node's counts as prior observations:
//   lgG(T + N eta) - lgG(T + A + N eta) + sum_d [lgG(c_d + a_d + eta) - lgG(c_d + eta)]
template <class Docs>
double dm_log_marginal(const Docs& node, const SparseDocCounts& added, double eta,
                       std::size_t n_docs) {
  if (added.empty()) return 0.0;
  if (!(eta > 0.0)) throw ValueError("eta must be positive");
  const double base = static_cast<double>(node.total()) + static_cast<double>(n_docs) * eta;
  double lp = log_gamma_fn(base) - log_gamma_fn(base + static_cast<double>(total(added)));
  for (const auto& dc : added) {
    const double have = static_cast<double>(node.count(dc.doc)) + eta;
    lp += log_gamma_fn(have + dc.count) - log_gamma_fn(have);
  }
  return lp;
}

// Sum over levels of dm_log_marginal at the candidate's node (empty for new
// steps), scoring level_docs[l] with eta[l].
double path_log_likelihood(const Tree& tree, const CandidatePath& candidate,
                           const LevelDocCounts& level_docs, const Hyperparams& hyper);

struct ScoredCandidate {
  CandidatePath path;
  double log_likelihood = 0.0;

  double log_score() const { return path.log_prior + log_likelihood; }
};

// enumerate_candidates and path_log_likelihood in a single pass: each live
// node is scored once and shared by every candidate through it.
std::vector<ScoredCandidate> score_candidates(const Tree& tree, const LevelDocCounts& level_docs,
                                              const Hyperparams& hyper);

// Unnormalized level weights for one token:
//   (n_l + alpha_l) * (c_l(doc) + eta_l) / (T_l + N eta_l)
// other_level_counts and path_nodes exclude the token being resampled.
void level_weights(std::span<const Count> other_level_counts, std::span<const Node* const> path_nodes,
                   DocId doc, const Hyperparams& hyper, std::span<double> out);

std::vector<double> level_conditional(std::span<const Count> other_level_counts,
                                      std::span<const Node* const> path_nodes, DocId doc,
                                      const Hyperparams& hyper);

// Marginal of a node's full document histogram under Dirichlet(eta).
double node_log_marginal(const DocHistogram& docs, double eta, std::size_t n_docs);

// Marginal of a word's level occupancy counts under Dirichlet(alpha).
double level_log_marginal(std::span<const Count> level_counts, std::span<const double> alpha);

// log P(C, Z, D): nCRP prior + per-node document marginals + per-word level
// marginals. word_level_counts holds one length-depth vector per attached word.
double joint_log_likelihood(const Tree& tree, std::span<const std::vector<Count>> word_level_counts,
                            const Hyperparams& hyper);

}  // namespace hlwc
