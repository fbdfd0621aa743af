#include "hlwc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "hlwc/errors.hpp"

namespace hlwc {

namespace {

double standard_normal(Rng& rng) {
  // Box-Muller, one variate per call so the stream stays stateless.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t sample_cumulative(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

double sample_log_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw ValueError("gamma shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    const double u = 1.0 - rng.uniform();
    return sample_log_gamma(shape + 1.0, rng) + std::log(u) / shape;
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d * v);
  }
}

std::vector<double> sample_dirichlet(std::span<const double> concentration, Rng& rng) {
  std::vector<double> logs(concentration.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = sample_log_gamma(concentration[i], rng);
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double& v : logs) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : logs) v /= sum;
  return logs;
}

namespace {

void check_sizes(std::size_t n_docs, std::size_t vocab_size, std::size_t tokens_per_word) {
  if (n_docs == 0 || vocab_size == 0 || tokens_per_word == 0)
    throw ValueError("synthetic corpus sizes must be at least 1");
}

// Everything below the paths: node document distributions, per-word level
// mixtures, then tokens.
SyntheticData fill_tokens(const Tree& tree, std::vector<Path> paths, std::size_t tokens_per_word,
                          const Hyperparams& h, Rng& rng) {
  const std::size_t n_docs = tree.n_docs();
  const std::size_t vocab_size = paths.size();
  SyntheticData out;
  out.truth.depth = h.depth;
  out.truth.paths = std::move(paths);

  // Document distribution per node, kept as a cumulative table.
  std::map<NodeId, std::vector<double>> doc_cdf;
  for (const auto& [id, node] : tree.nodes()) {
    const std::vector<double> conc(n_docs, h.eta[node.level]);
    auto beta = sample_dirichlet(conc, rng);
    std::partial_sum(beta.begin(), beta.end(), beta.begin());
    doc_cdf.emplace(id, std::move(beta));
  }

  std::vector<Corpus::Entry> entries;
  std::map<std::pair<DocId, WordId>, Count> cells;
  for (std::size_t w = 0; w < vocab_size; ++w) {
    auto theta = sample_dirichlet(h.alpha, rng);
    std::vector<double> theta_cdf(theta);
    std::partial_sum(theta_cdf.begin(), theta_cdf.end(), theta_cdf.begin());
    std::vector<DocId> docs;
    std::vector<int> levels;
    for (std::size_t i = 0; i < tokens_per_word; ++i) {
      const int z = static_cast<int>(sample_cumulative(theta_cdf, rng));
      const auto d = static_cast<DocId>(sample_cumulative(doc_cdf.at(out.truth.paths[w][z]), rng));
      levels.push_back(z);
      docs.push_back(d);
      ++cells[{d, static_cast<WordId>(w)}];
    }
    out.truth.theta.push_back(std::move(theta));
    out.truth.token_docs.push_back(std::move(docs));
    out.truth.token_levels.push_back(std::move(levels));
  }
  for (const auto& [key, c] : cells) entries.push_back({key.first, key.second, c});
  out.corpus = Corpus::from_entries(n_docs, vocab_size, std::move(entries));
  out.vocab = Vocabulary::placeholder(vocab_size);
  return out;
}

}  // namespace

SyntheticData generate_synthetic(std::size_t n_docs, std::size_t vocab_size,
                                 std::size_t tokens_per_word, const Hyperparams& hyper,
                                 std::uint64_t seed) {
  check_sizes(n_docs, vocab_size, tokens_per_word);
  Hyperparams h = hyper;
  h.n_docs = n_docs;
  h.validate();

  Rng rng(seed);
  // Paths: sequential nCRP draws.
  Tree tree(h.depth, n_docs);
  const LevelDocCounts no_docs(h.depth);
  std::vector<Path> paths;
  std::vector<double> log_w;
  for (std::size_t w = 0; w < vocab_size; ++w) {
    const auto candidates = enumerate_candidates(tree, h.gamma);
    log_w.resize(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) log_w[k] = candidates[k].log_prior;
    paths.push_back(tree.attach(candidates[sample_log_discrete(log_w, rng)], no_docs));
  }
  return fill_tokens(tree, std::move(paths), tokens_per_word, h, rng);
}

SyntheticData generate_planted(std::size_t n_docs, std::span<const std::size_t> fan_out,
                               std::size_t vocab_size, std::size_t tokens_per_word,
                               const Hyperparams& hyper, std::uint64_t seed) {
  check_sizes(n_docs, vocab_size, tokens_per_word);
  Hyperparams h = hyper;
  h.n_docs = n_docs;
  h.validate();
  if (fan_out.size() != static_cast<std::size_t>(h.depth - 1))
    throw ValueError("fan_out needs one entry per level below the root");
  std::size_t n_leaves = 1;
  for (std::size_t f : fan_out) {
    if (f == 0) throw ValueError("fan_out entries must be at least 1");
    n_leaves *= f;
  }

  Rng rng(seed);
  Tree tree(h.depth, n_docs);
  const LevelDocCounts no_docs(h.depth);
  std::map<std::vector<std::size_t>, NodeId> made;
  std::vector<Path> paths;
  for (std::size_t w = 0; w < vocab_size; ++w) {
    // Leaf w mod n_leaves, read as mixed-radix digits from the root down.
    std::vector<std::size_t> digits(fan_out.size());
    std::size_t k = w % n_leaves;
    for (std::size_t l = fan_out.size(); l-- > 0;) {
      digits[l] = k % fan_out[l];
      k /= fan_out[l];
    }
    CandidatePath c;
    c.steps.resize(fan_out.size());
    for (std::size_t l = 0; l < digits.size(); ++l) {
      auto it = made.find(std::vector<std::size_t>(digits.begin(), digits.begin() + l + 1));
      if (it == made.end()) break;
      c.steps[l] = it->second;
    }
    const Path p = tree.attach(c, no_docs);
    for (std::size_t l = 0; l < digits.size(); ++l)
      made[std::vector<std::size_t>(digits.begin(), digits.begin() + l + 1)] = p[l + 1];
    paths.push_back(p);
  }
  return fill_tokens(tree, std::move(paths), tokens_per_word, h, rng);
}

}  // namespace hlwc
