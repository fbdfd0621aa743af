#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "hlwc/corpus.hpp"
#include "hlwc/errors.hpp"

using namespace hlwc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::path(HLWC_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

Corpus random_corpus(std::mt19937& gen, std::size_t docs, std::size_t words, std::size_t cells) {
  std::map<std::pair<DocId, WordId>, Count> m;
  std::uniform_int_distribution<DocId> dd(0, docs - 1);
  std::uniform_int_distribution<WordId> wd(0, words - 1);
  std::uniform_int_distribution<Count> cd(1, 9);
  for (std::size_t i = 0; i < cells; ++i) m[{dd(gen), wd(gen)}] = cd(gen);
  std::vector<Corpus::Entry> e;
  for (auto& [k, c] : m) e.push_back({k.first, k.second, c});
  return Corpus::from_entries(docs, words, e);
}

}  // namespace

TEST_CASE("uci bow: single-line header and entries") {
  auto loaded = parse_uci_bow("2 3 2\n1 1 4\n2 3 1\n", "");
  CHECK(loaded.corpus.n_docs() == 2);
  CHECK(loaded.corpus.n_words() == 3);
  CHECK(loaded.corpus.nnz() == 2);
  CHECK(loaded.corpus.count(0, 0) == 4);
  CHECK(loaded.corpus.count(1, 2) == 1);
  CHECK(loaded.corpus.count(0, 2) == 0);
  CHECK(loaded.vocab.size() == 3);
}

TEST_CASE("uci bow: three-line header and vocabulary") {
  auto loaded = parse_uci_bow("2\n3\n2\n1 1 4\n2 3 1\n", "alpha\nbeta\ngamma\n");
  CHECK(loaded.corpus.count(0, 0) == 4);
  CHECK(loaded.vocab.terms == std::vector<std::string>{"alpha", "beta", "gamma"});
}

TEST_CASE("uci bow: empty corpus") {
  auto loaded = parse_uci_bow("1 1 0\n", "");
  CHECK(loaded.corpus.n_docs() == 1);
  CHECK(loaded.corpus.n_words() == 1);
  CHECK(loaded.corpus.nnz() == 0);
}

TEST_CASE("uci bow: errors carry line numbers") {
  SUBCASE("out-of-range document") {
    try {
      parse_uci_bow("2 3 2\n3 1 1\n", "");
      FAIL("expected BoundsError");
    } catch (const BoundsError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("out-of-range word") { CHECK_THROWS_AS(parse_uci_bow("2 3 1\n1 4 1\n", ""), BoundsError); }
  SUBCASE("malformed line") {
    try {
      parse_uci_bow("2 3 2\n1 1 4\n1 x 1\n", "");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("wrong arity") { CHECK_THROWS_AS(parse_uci_bow("2 3 1\n1 1\n", ""), ParseError); }
  SUBCASE("zero count") { CHECK_THROWS_AS(parse_uci_bow("2 3 1\n1 1 0\n", ""), ValueError); }
  SUBCASE("negative count") { CHECK_THROWS_AS(parse_uci_bow("2 3 1\n1 1 -2\n", ""), ValueError); }
  SUBCASE("truncated header") { CHECK_THROWS_AS(parse_uci_bow("2 3\n", ""), ParseError); }
  SUBCASE("fewer entries than NNZ") { CHECK_THROWS_AS(parse_uci_bow("2 3 2\n1 1 1\n", ""), ParseError); }
  SUBCASE("vocabulary length mismatch") {
    CHECK_THROWS_AS(parse_uci_bow("2 3 1\n1 1 1\n", "a\nb\n"), ValueError);
  }
}

TEST_CASE("uci bow: files round trip through the writer") {
  std::mt19937 gen(7);
  auto dir = scratch_dir("uci_roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    Corpus c = random_corpus(gen, 1 + trial % 7, 1 + trial % 11, trial * 3);
    Vocabulary v = Vocabulary::placeholder(c.n_words());
    write_uci_bow(c, v, dir / "docword.txt", dir / "vocab.txt");
    auto back = load_uci_bow(dir / "docword.txt", dir / "vocab.txt");
    CHECK(back.corpus == c);
    CHECK(back.vocab == v);
  }
  CHECK_THROWS_AS(load_uci_bow(dir / "missing.txt", ""), IoError);
}

TEST_CASE("text directory loading") {
  SUBCASE("one file") {
    auto dir = scratch_dir("text_one");
    write(dir / "a.txt", "a b a");
    auto loaded = load_text_dir(dir);
    CHECK(loaded.corpus.n_docs() == 1);
    CHECK(loaded.corpus.n_words() == 2);
    CHECK(loaded.corpus.count(0, 0) == 2);
    CHECK(loaded.corpus.count(0, 1) == 1);
    CHECK(loaded.vocab.terms == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("two files in name order") {
    auto dir = scratch_dir("text_two");
    write(dir / "2.txt", "x y");
    write(dir / "1.txt", "x");
    auto loaded = load_text_dir(dir);
    CHECK(loaded.corpus.nnz() == 3);
    CHECK(loaded.corpus.count(0, 0) == 1);
    CHECK(loaded.corpus.count(1, 0) == 1);
    CHECK(loaded.corpus.count(1, 1) == 1);
  }
  SUBCASE("lowercasing and punctuation") {
    auto dir = scratch_dir("text_punct");
    write(dir / "d.txt", "Brain, skull; BRAIN-kidney\n");
    auto loaded = load_text_dir(dir);
    CHECK(loaded.vocab.terms == std::vector<std::string>{"brain", "skull", "kidney"});
    CHECK(loaded.corpus.count(0, 0) == 2);
  }
  SUBCASE("empty directory") {
    auto dir = scratch_dir("text_empty");
    CHECK_THROWS_AS(load_text_dir(dir), ValueError);
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(load_text_dir(fs::path(HLWC_TEST_TMP) / "nope"), IoError); }
}

TEST_CASE("filter_vocabulary") {
  // word frequencies: w0=5, w1=3, w2=3
  auto c = Corpus::from_entries(2, 3, {{0, 0, 5}, {0, 1, 2}, {1, 1, 1}, {1, 2, 3}});
  Vocabulary v{{"a", "b", "c"}};

  SUBCASE("ties broken by lower original id") {
    auto r = filter_vocabulary(c, v, 1, 1);
    CHECK(r.vocab.terms == std::vector<std::string>{"b"});
    CHECK(r.kept_original_ids == std::vector<WordId>{1});
    CHECK(r.corpus.n_words() == 1);
    CHECK(r.corpus.n_docs() == 2);
    CHECK(r.corpus.count(0, 0) == 2);
    CHECK(r.corpus.count(1, 0) == 1);
    CHECK(r.shortfall == 0);
  }
  SUBCASE("identity") {
    auto r = filter_vocabulary(c, v, 0, 3);
    CHECK(r.corpus == c);
    CHECK(r.vocab == v);
  }
  SUBCASE("emptied documents keep their ids") {
    auto r = filter_vocabulary(c, v, 0, 1);
    CHECK(r.vocab.terms == std::vector<std::string>{"a"});
    CHECK(r.corpus.n_docs() == 2);
    CHECK(r.corpus.total_tokens() == 5);
  }
  SUBCASE("shortfall reported") {
    auto r = filter_vocabulary(c, v, 1, 10);
    CHECK(r.vocab.size() == 2);
    CHECK(r.shortfall == 8);
    auto all_skipped = filter_vocabulary(c, v, 5, 2);
    CHECK(all_skipped.vocab.size() == 0);
    CHECK(all_skipped.shortfall == 2);
  }
  SUBCASE("keep_next zero") { CHECK_THROWS_AS(filter_vocabulary(c, v, 0, 0), ValueError); }
}

TEST_CASE("filter_vocabulary: conservation and idempotence on random corpora") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus c = random_corpus(gen, 5, 30, 60);
    Vocabulary v = Vocabulary::placeholder(c.n_words());
    const std::size_t skip = trial % 5;
    const std::size_t keep = 1 + trial % 17;
    auto r = filter_vocabulary(c, v, skip, keep);
    const auto freq = c.word_frequencies();
    std::uint64_t expected = 0;
    for (WordId w : r.kept_original_ids) expected += freq[w];
    CHECK(r.corpus.total_tokens() == expected);
    for (std::size_t i = 1; i < r.kept_original_ids.size(); ++i)
      CHECK(r.kept_original_ids[i - 1] < r.kept_original_ids[i]);

    auto again = filter_vocabulary(r.corpus, r.vocab, 0, r.vocab.size());
    CHECK(again.corpus == r.corpus);
    CHECK(again.vocab == r.vocab);
  }
}

TEST_CASE("word_major_view") {
  auto c = Corpus::from_entries(2, 3, {{0, 0, 4}, {1, 2, 1}});
  WordView v(c);
  CHECK(v.postings(0) == SparseDocCounts{{0, 4}});
  CHECK(v.postings(1).empty());
  CHECK(v.postings(2) == SparseDocCounts{{1, 1}});
  CHECK_FALSE(v.active(1));
  CHECK(v.active_words() == std::vector<WordId>{0, 2});
  CHECK(v.word_total(0) == 4);

  WordView empty(Corpus(3, 2));
  CHECK(empty.postings(0).empty());
  CHECK(empty.postings(1).empty());
  CHECK(empty.active_words().empty());
}

TEST_CASE("word_major_view: transpose is exact on random corpora") {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus c = random_corpus(gen, 1 + trial % 9, 1 + trial % 13, trial * 2);
    WordView v(c);
    CHECK(v.to_corpus() == c);
    CHECK(v.total_tokens() == c.total_tokens());
    const auto freq = c.word_frequencies();
    for (WordId w = 0; w < c.n_words(); ++w) {
      CHECK(v.word_total(w) == freq[w]);
      const auto& p = v.postings(w);
      for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i - 1].doc < p[i].doc);
    }
  }
}
