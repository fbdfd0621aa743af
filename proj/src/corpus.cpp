#include "hlwc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "hlwc/errors.hpp"

namespace hlwc {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

// Splits text into lines, tracking 1-based physical line numbers.
struct LineReader {
  std::istringstream in;
  std::size_t line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Parses a line of integers; throws ParseError on anything else.
std::vector<long long> parse_ints(const std::string& line, std::size_t line_no) {
  std::vector<long long> out;
  std::istringstream ls(line);
  std::string tok;
  while (ls >> tok) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError("expected integer, got '" + tok + "'", line_no);
    }
    if (pos != tok.size()) throw ParseError("expected integer, got '" + tok + "'", line_no);
    out.push_back(v);
  }
  return out;
}

}  // namespace

Corpus Corpus::from_entries(std::size_t n_docs, std::size_t n_words, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.doc, a.word) < std::tie(b.doc, b.word);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.doc >= n_docs || e.word >= n_words)
      throw ValueError("corpus entry out of range: doc " + std::to_string(e.doc) + ", word " +
                       std::to_string(e.word));
    if (e.count == 0) throw ValueError("corpus entry with zero count");
    if (i > 0 && entries[i - 1].doc == e.doc && entries[i - 1].word == e.word)
      throw ValueError("duplicate corpus entry: doc " + std::to_string(e.doc) + ", word " +
                       std::to_string(e.word));
  }
  Corpus c(n_docs, n_words);
  c.entries_ = std::move(entries);
  return c;
}

Count Corpus::count(DocId doc, WordId word) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{doc, word},
                             [](const Entry& e, const std::pair<DocId, WordId>& key) {
                               return std::tie(e.doc, e.word) < std::tie(key.first, key.second);
                             });
  if (it != entries_.end() && it->doc == doc && it->word == word) return it->count;
  return 0;
}

std::uint64_t Corpus::total_tokens() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) sum += e.count;
  return sum;
}

std::vector<std::uint64_t> Corpus::word_frequencies() const {
  std::vector<std::uint64_t> freq(n_words_, 0);
  for (const auto& e : entries_) freq[e.word] += e.count;
  return freq;
}

Vocabulary Vocabulary::placeholder(std::size_t n_words) {
  Vocabulary v;
  v.terms.reserve(n_words);
  for (std::size_t i = 0; i < n_words; ++i) v.terms.push_back("w" + std::to_string(i));
  return v;
}

WordView::WordView(const Corpus& corpus)
    : n_docs_(corpus.n_docs()), postings_(corpus.n_words()), totals_(corpus.n_words(), 0) {
  // Entries are doc-major sorted, so each posting list comes out sorted by doc.
  for (const auto& e : corpus.entries()) {
    postings_[e.word].push_back({e.doc, e.count});
    totals_[e.word] += e.count;
  }
}

std::vector<WordId> WordView::active_words() const {
  std::vector<WordId> out;
  for (WordId w = 0; w < totals_.size(); ++w)
    if (totals_[w] > 0) out.push_back(w);
  return out;
}

std::uint64_t WordView::total_tokens() const {
  return std::accumulate(totals_.begin(), totals_.end(), std::uint64_t{0});
}

Corpus WordView::to_corpus() const {
  std::vector<Corpus::Entry> entries;
  for (WordId w = 0; w < postings_.size(); ++w)
    for (const auto& dc : postings_[w]) entries.push_back({dc.doc, w, dc.count});
  return Corpus::from_entries(n_docs_, postings_.size(), std::move(entries));
}

LoadedCorpus parse_uci_bow(const std::string& docword_text, const std::string& vocab_text) {
  LineReader reader(docword_text);
  std::string line;

  // Header: three integers D, W, NNZ, either one per line or on one line.
  std::vector<long long> header;
  while (header.size() < 3) {
    if (!reader.next(line)) throw ParseError("truncated header (expected D, W, NNZ)", reader.line_no);
    if (blank(line)) continue;
    auto vals = parse_ints(line, reader.line_no);
    if (header.size() + vals.size() > 3) throw ParseError("malformed header", reader.line_no);
    header.insert(header.end(), vals.begin(), vals.end());
  }
  if (header[0] < 0 || header[1] < 0 || header[2] < 0)
    throw ParseError("negative value in header", reader.line_no);
  const auto n_docs = static_cast<std::size_t>(header[0]);
  const auto n_words = static_cast<std::size_t>(header[1]);
  const auto nnz = static_cast<std::size_t>(header[2]);

  std::vector<Corpus::Entry> entries;
  entries.reserve(nnz);
  while (reader.next(line)) {
    if (blank(line)) continue;
    auto vals = parse_ints(line, reader.line_no);
    if (vals.size() != 3) throw ParseError("expected 'docID wordID count'", reader.line_no);
    if (entries.size() == nnz) throw ParseError("more entries than the declared NNZ", reader.line_no);
    if (vals[0] < 1 || static_cast<std::size_t>(vals[0]) > n_docs)
      throw BoundsError("document id " + std::to_string(vals[0]) + " outside [1, " +
                            std::to_string(n_docs) + "]",
                        reader.line_no);
    if (vals[1] < 1 || static_cast<std::size_t>(vals[1]) > n_words)
      throw BoundsError("word id " + std::to_string(vals[1]) + " outside [1, " +
                            std::to_string(n_words) + "]",
                        reader.line_no);
    if (vals[2] <= 0)
      throw ValueError("line " + std::to_string(reader.line_no) + ": count must be positive, got " +
                       std::to_string(vals[2]));
    entries.push_back({static_cast<DocId>(vals[0] - 1), static_cast<WordId>(vals[1] - 1),
                       static_cast<Count>(vals[2])});
  }
  if (entries.size() != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(entries.size()),
                     reader.line_no);

  LoadedCorpus out{Corpus::from_entries(n_docs, n_words, std::move(entries)), {}};

  if (vocab_text.empty() && n_words > 0) {
    out.vocab = Vocabulary::placeholder(n_words);
  } else {
    LineReader vr(vocab_text);
    while (vr.next(line)) {
      if (out.vocab.terms.size() == n_words && blank(line)) continue;
      out.vocab.terms.push_back(line);
    }
    if (out.vocab.size() != n_words)
      throw ValueError("vocabulary has " + std::to_string(out.vocab.size()) +
                       " terms but docword declares W=" + std::to_string(n_words));
  }
  return out;
}

LoadedCorpus load_uci_bow(const std::filesystem::path& docword_path,
                          const std::filesystem::path& vocab_path) {
  std::string vocab_text = vocab_path.empty() ? std::string{} : read_file(vocab_path);
  return parse_uci_bow(read_file(docword_path), vocab_text);
}

std::string format_uci_docword(const Corpus& corpus) {
  std::ostringstream out;
  out << corpus.n_docs() << '\n' << corpus.n_words() << '\n' << corpus.nnz() << '\n';
  for (const auto& e : corpus.entries()) out << e.doc + 1 << ' ' << e.word + 1 << ' ' << e.count << '\n';
  return out.str();
}

void write_uci_bow(const Corpus& corpus, const Vocabulary& vocab,
                   const std::filesystem::path& docword_path,
                   const std::filesystem::path& vocab_path) {
  std::ofstream dw(docword_path, std::ios::binary);
  if (!dw) throw IoError("cannot write " + docword_path.string());
  dw << format_uci_docword(corpus);
  if (!dw) throw IoError("write failed: " + docword_path.string());

  std::ofstream vf(vocab_path, std::ios::binary);
  if (!vf) throw IoError("cannot write " + vocab_path.string());
  for (const auto& t : vocab.terms) vf << t << '\n';
  if (!vf) throw IoError("write failed: " + vocab_path.string());
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

LoadedCorpus load_text_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  if (files.empty()) throw ValueError("no documents in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  Vocabulary vocab;
  std::unordered_map<std::string, WordId> index;
  std::vector<Corpus::Entry> entries;
  for (DocId d = 0; d < files.size(); ++d) {
    std::map<WordId, Count> doc_counts;
    for (auto& tok : tokenize(read_file(files[d]))) {
      auto [it, inserted] = index.try_emplace(tok, static_cast<WordId>(vocab.terms.size()));
      if (inserted) vocab.terms.push_back(tok);
      ++doc_counts[it->second];
    }
    for (auto [w, c] : doc_counts) entries.push_back({d, w, c});
  }
  return {Corpus::from_entries(files.size(), vocab.size(), std::move(entries)), std::move(vocab)};
}

FilterResult filter_vocabulary(const Corpus& corpus, const Vocabulary& vocab,
                               std::size_t skip_top, std::size_t keep_next) {
  if (keep_next == 0) throw ValueError("keep_next must be positive");
  if (vocab.size() != corpus.n_words())
    throw ValueError("vocabulary size does not match corpus width");

  const auto freq = corpus.word_frequencies();
  std::vector<WordId> ranked;
  for (WordId w = 0; w < freq.size(); ++w)
    if (freq[w] > 0) ranked.push_back(w);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](WordId a, WordId b) { return freq[a] > freq[b]; });

  FilterResult out;
  const std::size_t begin = std::min(skip_top, ranked.size());
  const std::size_t end = std::min(skip_top + keep_next, ranked.size());
  out.shortfall = keep_next - (end - begin);
  out.kept_original_ids.assign(ranked.begin() + begin, ranked.begin() + end);
  std::sort(out.kept_original_ids.begin(), out.kept_original_ids.end());

  std::vector<std::int64_t> new_id(corpus.n_words(), -1);
  for (WordId i = 0; i < out.kept_original_ids.size(); ++i) {
    new_id[out.kept_original_ids[i]] = i;
    out.vocab.terms.push_back(vocab.terms[out.kept_original_ids[i]]);
  }

  std::vector<Corpus::Entry> entries;
  for (const auto& e : corpus.entries())
    if (new_id[e.word] >= 0) entries.push_back({e.doc, static_cast<WordId>(new_id[e.word]), e.count});
  out.corpus = Corpus::from_entries(corpus.n_docs(), out.kept_original_ids.size(), std::move(entries));
  return out;
}

}  // namespace hlwc
