#include "hlwc/likelihood.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hlwc {

Hyperparams Hyperparams::defaults(std::size_t n_docs, int depth) {
  Hyperparams h;
  h.depth = depth;
  h.n_docs = n_docs;
  h.eta.assign(depth, 1.0);
  h.alpha.assign(depth, 1.0);
  return h;
}

void Hyperparams::validate() const {
  if (depth < 1) throw ValueError("depth must be at least 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValueError("gamma must be positive and finite");
  if (eta.size() != static_cast<std::size_t>(depth))
    throw ValueError("eta has " + std::to_string(eta.size()) + " entries, expected " + std::to_string(depth));
  if (alpha.size() != static_cast<std::size_t>(depth))
    throw ValueError("alpha has " + std::to_string(alpha.size()) + " entries, expected " +
                     std::to_string(depth));
  for (double v : eta)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValueError("eta entries must be positive and finite");
  for (double v : alpha)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValueError("alpha entries must be positive and finite");
  if (n_docs == 0) throw ValueError("n_docs must be positive");
}

double Hyperparams::alpha_sum() const { return std::accumulate(alpha.begin(), alpha.end(), 0.0); }

double path_log_likelihood(const Tree& tree, const CandidatePath& candidate,
                           const LevelDocCounts& level_docs, const Hyperparams& hyper) {
  double ll = dm_log_marginal(tree.root().docs, level_docs[0], hyper.eta[0], hyper.n_docs);
  for (int level = 1; level < tree.depth(); ++level) {
    const auto& step = candidate.steps[level - 1];
    const auto& added = level_docs[level];
    ll += step ? dm_log_marginal(tree.node(*step).docs, added, hyper.eta[level], hyper.n_docs)
               : dm_log_marginal(EmptyDocs{}, added, hyper.eta[level], hyper.n_docs);
  }
  return ll;
}

namespace {

struct CandidateScorer {
  const Tree& tree;
  const LevelDocCounts& level_docs;
  const Hyperparams& hyper;
  // fresh_suffix[l]: likelihood of levels l..depth-1 all at new nodes.
  std::vector<double> fresh_suffix;
  std::vector<std::optional<NodeId>> steps;
  std::vector<ScoredCandidate> out;

  void visit(const Node& n, double log_prior, double ll) {
    ll += dm_log_marginal(n.docs, level_docs[n.level], hyper.eta[n.level], hyper.n_docs);
    const int depth = tree.depth();
    if (n.level == depth - 1) {
      out.push_back({{steps, log_prior}, ll});
      return;
    }
    const double denom = static_cast<double>(n.n_words) + hyper.gamma;
    for (NodeId c : n.children) {
      const Node& child = tree.node(c);
      steps.emplace_back(c);
      visit(child, log_prior + std::log(static_cast<double>(child.n_words) / denom), ll);
      steps.pop_back();
    }
    ScoredCandidate fresh{{steps, log_prior + std::log(hyper.gamma / denom)},
                          ll + fresh_suffix[n.level + 1]};
    fresh.path.steps.resize(depth - 1);
    out.push_back(std::move(fresh));
  }
};

}  // namespace

std::vector<ScoredCandidate> score_candidates(const Tree& tree, const LevelDocCounts& level_docs,
                                              const Hyperparams& hyper) {
  const int depth = tree.depth();
  CandidateScorer scorer{tree, level_docs, hyper, std::vector<double>(depth + 1, 0.0), {}, {}};
  for (int level = depth - 1; level >= 0; --level)
    scorer.fresh_suffix[level] =
        scorer.fresh_suffix[level + 1] +
        dm_log_marginal(EmptyDocs{}, level_docs[level], hyper.eta[level], hyper.n_docs);
  scorer.steps.reserve(depth);
  scorer.visit(tree.root(), 0.0, 0.0);
  return std::move(scorer.out);
}

void level_weights(std::span<const Count> other_level_counts, std::span<const Node* const> path_nodes,
                   DocId doc, const Hyperparams& hyper, std::span<double> out) {
  const double n_docs = static_cast<double>(hyper.n_docs);
  for (std::size_t l = 0; l < out.size(); ++l) {
    const DocHistogram& docs = path_nodes[l]->docs;
    const double eta = hyper.eta[l];
    out[l] = (other_level_counts[l] + hyper.alpha[l]) * (docs.count(doc) + eta) /
             (static_cast<double>(docs.total()) + n_docs * eta);
  }
}

std::vector<double> level_conditional(std::span<const Count> other_level_counts,
                                      std::span<const Node* const> path_nodes, DocId doc,
                                      const Hyperparams& hyper) {
  std::vector<double> w(path_nodes.size());
  level_weights(other_level_counts, path_nodes, doc, hyper, w);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= sum;
  return w;
}

double node_log_marginal(const DocHistogram& docs, double eta, std::size_t n_docs) {
  const double base = static_cast<double>(n_docs) * eta;
  double lp = log_gamma_fn(base) - log_gamma_fn(base + static_cast<double>(docs.total()));
  const double lg_eta = log_gamma_fn(eta);
  docs.for_each_nonzero([&](DocId, Count c) { lp += log_gamma_fn(c + eta) - lg_eta; });
  return lp;
}

double level_log_marginal(std::span<const Count> level_counts, std::span<const double> alpha) {
  double a_sum = 0.0;
  double n_sum = 0.0;
  double lp = 0.0;
  for (std::size_t l = 0; l < level_counts.size(); ++l) {
    a_sum += alpha[l];
    n_sum += level_counts[l];
    if (level_counts[l] != 0) lp += log_gamma_fn(level_counts[l] + alpha[l]) - log_gamma_fn(alpha[l]);
  }
  return lp + log_gamma_fn(a_sum) - log_gamma_fn(a_sum + n_sum);
}

double joint_log_likelihood(const Tree& tree, std::span<const std::vector<Count>> word_level_counts,
                            const Hyperparams& hyper) {
  if (word_level_counts.empty()) return 0.0;
  double ll = ncrp_log_prior(tree, hyper.gamma);
  for (const auto& [id, n] : tree.nodes()) ll += node_log_marginal(n.docs, hyper.eta[n.level], hyper.n_docs);
  for (const auto& counts : word_level_counts) ll += level_log_marginal(counts, hyper.alpha);
  return ll;
}

}  // namespace hlwc
