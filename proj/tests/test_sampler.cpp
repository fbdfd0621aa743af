#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "hlwc/errors.hpp"
#include "hlwc/sampler.hpp"
#include "hlwc/synthetic.hpp"
#include "oracles.hpp"

using namespace hlwc;

namespace {

struct WordSpec {
  std::vector<DocId> docs;  // ascending
  std::vector<int> levels;
  int group;  // words with equal group share a path
};

// Hand-assembled state for depth-2 trees. Groups are inserted in the
// order given by `insert_order` (defaults to word order).
ModelState make_state(const Hyperparams& h, const std::vector<WordSpec>& specs,
                      std::vector<std::size_t> insert_order = {}) {
  ModelState s(h, h.n_docs);
  s.words.resize(specs.size());
  if (insert_order.empty()) {
    insert_order.resize(specs.size());
    std::iota(insert_order.begin(), insert_order.end(), 0);
  }
  std::map<int, Path> group_path;
  for (std::size_t w : insert_order) {
    auto& ws = s.words[w];
    ws.token_docs = specs[w].docs;
    ws.levels = specs[w].levels;
    ws.level_counts.assign(h.depth, 0);
    for (int z : ws.levels) ++ws.level_counts[z];
    CandidatePath c;
    c.steps.resize(h.depth - 1);
    if (group_path.count(specs[w].group)) c = Tree::existing(group_path[specs[w].group]);
    ws.path = s.tree.attach(c, level_doc_counts(ws, h.depth));
    group_path[specs[w].group] = ws.path;
  }
  for (WordId w = 0; w < specs.size(); ++w) s.active.push_back(w);
  return s;
}

WordView view_of(std::size_t n_docs, std::size_t n_words, std::vector<Corpus::Entry> e) {
  return WordView(Corpus::from_entries(n_docs, n_words, std::move(e)));
}

Hyperparams hyper(int depth, std::size_t n_docs) { return Hyperparams::defaults(n_docs, depth); }

}  // namespace

TEST_CASE("level_doc_counts groups tokens by level") {
  WordState ws;
  ws.token_docs = {0, 0, 1, 3, 3, 3};
  ws.levels = {0, 1, 1, 0, 2, 0};
  auto g = level_doc_counts(ws, 3);
  CHECK(g[0] == SparseDocCounts{{0, 1}, {3, 2}});
  CHECK(g[1] == SparseDocCounts{{0, 1}, {1, 1}});
  CHECK(g[2] == SparseDocCounts{{3, 1}});
}

TEST_CASE("init_state") {
  SUBCASE("single word takes the only path") {
    auto v = view_of(3, 1, {{0, 0, 2}, {2, 0, 1}});
    auto s = init_state(v, hyper(2, 3), 7);
    assert_state_consistency(s);
    CHECK(s.tree.size() == 2);
    CHECK(s.words[0].token_docs == std::vector<DocId>{0, 0, 2});
    CHECK(s.words[0].path.size() == 2);
  }
  SUBCASE("same seed, same state") {
    auto data = generate_synthetic(20, 30, 15, hyper(3, 20), 3);
    WordView v(data.corpus);
    auto a = init_state(v, hyper(3, 20), 99);
    auto b = init_state(v, hyper(3, 20), 99);
    CHECK(a == b);
    auto c = init_state(v, hyper(3, 20), 100);
    assert_state_consistency(a);
    assert_state_consistency(c);
  }
  SUBCASE("inactive words carry no path") {
    auto v = view_of(2, 3, {{0, 0, 1}, {1, 2, 2}});
    auto s = init_state(v, hyper(3, 2), 1);
    CHECK(s.active == std::vector<WordId>{0, 2});
    CHECK(s.words[1].path.empty());
    CHECK(s.tree.root().n_words == 2);
    assert_state_consistency(s);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(init_state(WordView(Corpus(2, 3)), hyper(3, 2), 1), ValueError);
    CHECK_THROWS_AS(init_state(view_of(2, 1, {{0, 0, 1}}), hyper(3, 5), 1), ValueError);
  }
}

TEST_CASE("sample_word_path") {
  SUBCASE("a lone word always returns to a fresh path") {
    auto v = view_of(3, 1, {{0, 0, 2}, {1, 0, 3}});
    auto s = init_state(v, hyper(3, 3), 5);
    for (int i = 0; i < 50; ++i) {
      CHECK_FALSE(sample_word_path(s, 0));
      CHECK(s.tree.size() == 3);
      assert_state_consistency(s);
    }
  }
  SUBCASE("inactive words are skipped") {
    auto v = view_of(2, 2, {{0, 0, 1}});
    auto s = init_state(v, hyper(2, 2), 5);
    const ModelState before = s;
    CHECK_FALSE(sample_word_path(s, 1));
    CHECK(s.tree == before.tree);
  }
}

TEST_CASE("sample_token_level") {
  SUBCASE("depth one keeps every token at the root") {
    auto v = view_of(2, 2, {{0, 0, 2}, {1, 1, 1}});
    auto s = init_state(v, hyper(1, 2), 3);
    for (int i = 0; i < 20; ++i) {
      sample_token_level(s, 0, i % 2);
      CHECK(s.words[0].levels[i % 2] == 0);
    }
    gibbs_sweep(s);
    assert_state_consistency(s);
  }
  SUBCASE("symmetric state draws each level half the time") {
    auto h = hyper(2, 2);
    auto s = make_state(h, {{{1}, {0}, 0}});
    const int n = 100000;
    int at_zero = 0;
    for (int i = 0; i < n; ++i) {
      sample_token_level(s, 0, 0);
      at_zero += s.words[0].levels[0] == 0;
    }
    const double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(at_zero / double(n) - 0.5) < 3 * sigma);
    assert_state_consistency(s);
  }
  SUBCASE("asymmetric state follows the level conditional") {
    // Excluding token 0 of word 0: word-0 level counts [1, 1]; root holds
    // 2 of its 5 tokens in doc 0, the leaf 1 of 3. Weights 6/7 and 4/5.
    auto h = hyper(2, 2);
    auto s = make_state(h, {{{0, 0, 1}, {0, 0, 1}, 0},
                            {{0, 0, 1, 1, 1, 1}, {0, 1, 0, 0, 0, 1}, 0}});
    const int n = 100000;
    int at_zero = 0;
    for (int i = 0; i < n; ++i) {
      sample_token_level(s, 0, 0);
      at_zero += s.words[0].levels[0] == 0;
    }
    const double p = (6.0 / 7.0) / (6.0 / 7.0 + 4.0 / 5.0);
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(at_zero / double(n) - p) < 3 * sigma);
  }
  SUBCASE("bad token index") {
    auto s = make_state(hyper(2, 2), {{{1}, {0}, 0}});
    CHECK_THROWS_AS(sample_token_level(s, 0, 5), ValueError);
  }
}

TEST_CASE("joint LL does not depend on insertion order or node ids") {
  auto h = hyper(2, 3);
  h.alpha = {0.5, 2.0};
  h.eta = {0.7, 0.3};
  const std::vector<WordSpec> specs{{{0, 1, 1}, {0, 1, 1}, 0},
                                    {{2}, {1}, 1},
                                    {{0, 2, 2}, {0, 0, 1}, 0},
                                    {{1, 2}, {1, 0}, 2}};
  auto a = make_state(h, specs, {0, 1, 2, 3});
  auto b = make_state(h, specs, {3, 2, 1, 0});
  CHECK(a.tree.nodes() != b.tree.nodes());
  CHECK(std::abs(joint_log_likelihood(a) - joint_log_likelihood(b)) < 1e-9);
}

TEST_CASE("gibbs sweeps") {
  SUBCASE("single-word corpus") {
    auto s = init_state(view_of(4, 1, {{0, 0, 3}, {3, 0, 1}}), hyper(3, 4), 11);
    auto stats = gibbs_sweep(s);
    CHECK(std::isfinite(stats.joint_ll));
    CHECK(stats.words_moved == 0);
    assert_state_consistency(s);
  }
  SUBCASE("determinism and consistency on synthetic data") {
    auto data = generate_synthetic(15, 25, 12, hyper(3, 15), 8);
    WordView v(data.corpus);
    auto a = init_state(v, hyper(3, 15), 21);
    auto b = init_state(v, hyper(3, 15), 21);
    for (int i = 0; i < 10; ++i) {
      auto sa = gibbs_sweep(a);
      auto sb = gibbs_sweep(b);
      CHECK(sa.joint_ll == sb.joint_ll);
      CHECK(sa.words_moved == sb.words_moved);
      CHECK(sa.tokens_relevelled == sb.tokens_relevelled);
      CHECK(sa.joint_ll == joint_log_likelihood(a));
      assert_state_consistency(a);
    }
    CHECK(a == b);
    CHECK(a.iteration == 10);
  }
}

TEST_CASE("run") {
  auto data = generate_synthetic(15, 20, 10, hyper(3, 15), 4);
  WordView v(data.corpus);

  SUBCASE("trace and best snapshot") {
    auto s = init_state(v, hyper(3, 15), 2);
    int calls = 0;
    auto report = run(s, 8, [&](const ModelState&, const SweepStats&) { ++calls; });
    CHECK(calls == 8);
    REQUIRE(report.ll_trace.size() == 8);
    const auto best = std::max_element(report.ll_trace.begin(), report.ll_trace.end());
    CHECK(report.best_ll == *best);
    CHECK(report.best_iteration == static_cast<std::uint64_t>(best - report.ll_trace.begin()) + 1);
    REQUIRE(report.best_state);
    CHECK(joint_log_likelihood(*report.best_state) == report.best_ll);
    CHECK(report.wall_seconds >= 0.0);
  }
  SUBCASE("a failing hook stops the run and leaves the state consistent") {
    auto s = init_state(v, hyper(3, 15), 2);
    auto report = run(s, 10, [](const ModelState& st, const SweepStats&) {
      if (st.iteration == 3) throw std::runtime_error("disk full");
    });
    CHECK(report.hook_error == "disk full");
    CHECK(report.ll_trace.size() == 3);
    CHECK(s.iteration == 3);
    assert_state_consistency(s);
  }
  SUBCASE("zero iterations rejected") {
    auto s = init_state(v, hyper(3, 15), 2);
    CHECK_THROWS_AS(run(s, 0), ValueError);
  }
}

TEST_CASE("joint LL rises on synthetic data for most seeds") {
  auto gen_h = hyper(3, 30);
  gen_h.eta = {0.1, 0.1, 0.1};
  gen_h.gamma = 0.6;
  int rising = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto data = generate_synthetic(30, 40, 30, gen_h, seed);
    auto s = init_state(WordView(data.corpus), gen_h, 1000 + seed);
    auto report = run(s, 60);
    const auto& tr = report.ll_trace;
    const std::size_t k = tr.size() / 10;
    const double head = std::accumulate(tr.begin(), tr.begin() + k, 0.0) / k;
    const double tail = std::accumulate(tr.end() - k, tr.end(), 0.0) / k;
    rising += tail > head;
  }
  CHECK(rising >= 3);
}

TEST_CASE("depth-three chain matches the enumerated posterior") {
  // Two words (docs {0,1} and {1}); word 1 either shares word 0's leaf,
  // shares only its branch, or sits on another branch. 3 x 27 states.
  const Corpus corpus = Corpus::from_entries(2, 2, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}});
  Hyperparams h = Hyperparams::defaults(2, 3);
  h.gamma = 0.7;
  h.eta = {0.5, 1.0, 0.3};
  h.alpha = {1.0, 0.5, 2.0};
  const std::vector<std::vector<DocId>> docs{{0, 1}, {1}};
  const std::vector<std::vector<std::vector<int>>> shapes{{{0, 0}, {0, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {1, 0}}};

  std::map<std::vector<int>, std::size_t> index;
  std::vector<double> log_joint;
  for (std::size_t c = 0; c < shapes.size(); ++c) {
    const auto& labels = shapes[c];
    for (int a = 0; a < 27; ++a) {
      const std::vector<std::vector<int>> lv{{a % 3, (a / 3) % 3}, {a / 9}};
      double lp = oracle::crp_sequential_log({labels[0][0], labels[1][0]}, h.gamma);
      if (labels[0][0] == labels[1][0])
        lp += oracle::crp_sequential_log({labels[0][1], labels[1][1]}, h.gamma);
      else
        lp += 2 * oracle::crp_sequential_log({0}, h.gamma);
      for (const auto& l : lv) lp += oracle::polya_urn_log_vector(l, h.alpha);
      std::map<std::vector<int>, std::vector<DocId>> draws;
      for (int w = 0; w < 2; ++w)
        for (std::size_t i = 0; i < docs[w].size(); ++i)
          draws[std::vector<int>(labels[w].begin(), labels[w].begin() + lv[w][i])].push_back(docs[w][i]);
      for (const auto& [prefix, d] : draws) lp += oracle::polya_urn_log({}, d, h.eta[prefix.size()], 2);
      index[{static_cast<int>(c), lv[0][0], lv[0][1], lv[1][0]}] = log_joint.size();
      log_joint.push_back(lp);
    }
  }
  const double top = *std::max_element(log_joint.begin(), log_joint.end());
  double z = 0.0;
  for (double x : log_joint) z += std::exp(x - top);

  ModelState s = init_state(WordView(corpus), h, 3);
  const std::size_t n = 200000;
  std::vector<double> hits(log_joint.size(), 0.0);
  for (std::size_t it = 0; it < n; ++it) {
    const auto st = gibbs_sweep(s);
    const auto& p0 = s.words[0].path;
    const auto& p1 = s.words[1].path;
    const int shape = p1[2] == p0[2] ? 0 : (p1[1] == p0[1] ? 1 : 2);
    const std::size_t k = index.at({shape, s.words[0].levels[0], s.words[0].levels[1], s.words[1].levels[0]});
    hits[k] += 1.0;
    if (it % 1000 == 0) CHECK(st.joint_ll == doctest::Approx(log_joint[k]).epsilon(1e-12));
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < hits.size(); ++i) tv += std::abs(hits[i] / n - std::exp(log_joint[i] - top) / z);
  CHECK(tv / 2 < 0.02);
}
