#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hlwc/types.hpp"

namespace hlwc {

// Sparse document-by-word count matrix. Entries are kept sorted by
// (doc, word) and never store a zero count.
class Corpus {
 public:
  struct Entry {
    DocId doc = 0;
    WordId word = 0;
    Count count = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Corpus() = default;
  Corpus(std::size_t n_docs, std::size_t n_words) : n_docs_(n_docs), n_words_(n_words) {}

  // Throws ValueError on out-of-range ids, zero counts or duplicate cells.
  static Corpus from_entries(std::size_t n_docs, std::size_t n_words, std::vector<Entry> entries);

  std::size_t n_docs() const { return n_docs_; }
  std::size_t n_words() const { return n_words_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  // 0 when the cell is absent.
  Count count(DocId doc, WordId word) const;
  std::uint64_t total_tokens() const;
  std::vector<std::uint64_t> word_frequencies() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::size_t n_docs_ = 0;
  std::size_t n_words_ = 0;
  std::vector<Entry> entries_;
};

struct Vocabulary {
  std::vector<std::string> terms;

  std::size_t size() const { return terms.size(); }
  const std::string& term(WordId w) const { return terms.at(w); }
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

  // "w0", "w1", ... for corpora that ship without a vocabulary file.
  static Vocabulary placeholder(std::size_t n_words);
};

// Word-major transpose: for every word, its (doc, count) postings sorted by doc.
class WordView {
 public:
  explicit WordView(const Corpus& corpus);

  std::size_t n_docs() const { return n_docs_; }
  std::size_t n_words() const { return postings_.size(); }
  const SparseDocCounts& postings(WordId w) const { return postings_.at(w); }
  std::uint64_t word_total(WordId w) const { return totals_.at(w); }
  bool active(WordId w) const { return totals_.at(w) > 0; }
  std::vector<WordId> active_words() const;
  std::uint64_t total_tokens() const;

  // Back to document-major form.
  Corpus to_corpus() const;

 private:
  std::size_t n_docs_ = 0;
  std::vector<SparseDocCounts> postings_;
  std::vector<std::uint64_t> totals_;
};

inline WordView word_major_view(const Corpus& corpus) { return WordView(corpus); }

struct LoadedCorpus {
  Corpus corpus;
  Vocabulary vocab;
};

// UCI bag-of-words: D, W, NNZ header followed by 1-indexed "doc word count"
// triples. An empty vocab_path yields placeholder terms.
LoadedCorpus load_uci_bow(const std::filesystem::path& docword_path,
                          const std::filesystem::path& vocab_path);
LoadedCorpus parse_uci_bow(const std::string& docword_text, const std::string& vocab_text);

void write_uci_bow(const Corpus& corpus, const Vocabulary& vocab,
                   const std::filesystem::path& docword_path,
                   const std::filesystem::path& vocab_path);
std::string format_uci_docword(const Corpus& corpus);

// One document per regular file, files taken in sorted filename order.
LoadedCorpus load_text_dir(const std::filesystem::path& dir);

// Lowercase, split on anything that is not an ASCII letter or digit.
std::vector<std::string> tokenize(const std::string& text);

struct FilterResult {
  Corpus corpus;
  Vocabulary vocab;
  // Original ids of the retained words, indexed by new id.
  std::vector<WordId> kept_original_ids;
  // How many of the requested keep_next slots could not be filled.
  std::size_t shortfall = 0;
};

// Rank words by total corpus frequency (ties: lower original id first), drop
// the first skip_top ranks and keep the next keep_next. Retained words keep
// their relative order; documents are never removed.
FilterResult filter_vocabulary(const Corpus& corpus, const Vocabulary& vocab,
                               std::size_t skip_top, std::size_t keep_next);

}  // namespace hlwc
