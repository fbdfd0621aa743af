#include "hlwc/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hlwc/errors.hpp"

namespace hlwc {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "hlwc-checkpoint";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json payload_of(const ModelState& s, const Vocabulary& vocab, const json& config) {
  json nodes = json::array();
  for (const auto& [id, n] : s.tree.nodes()) {
    nodes.push_back({{"id", id},
                     {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                     {"level", n.level},
                     {"children", n.children}});
  }
  json words = json::array();
  for (const auto& ws : s.words) {
    json docs = json::array();
    for (std::size_t i = 0; i < ws.token_docs.size();) {
      std::size_t j = i;
      while (j < ws.token_docs.size() && ws.token_docs[j] == ws.token_docs[i]) ++j;
      docs.push_back({ws.token_docs[i], j - i});
      i = j;
    }
    words.push_back({{"docs", std::move(docs)}, {"levels", ws.levels}, {"path", ws.path}});
  }
  return {
      {"hyper",
       {{"gamma", s.hyper.gamma},
        {"eta", s.hyper.eta},
        {"alpha", s.hyper.alpha},
        {"depth", s.hyper.depth},
        {"n_docs", s.hyper.n_docs}}},
      {"seed", s.seed},
      {"iteration", s.iteration},
      {"rng", {{"state", s.rng.state()}, {"draws", s.rng.draws()}}},
      {"tree", {{"next_id", s.tree.next_id()}, {"nodes", std::move(nodes)}}},
      {"words", std::move(words)},
      {"vocab", vocab.terms},
      {"config", config},
  };
}

ModelState state_of(const json& p) {
  const auto& jh = p.at("hyper");
  Hyperparams hyper;
  hyper.gamma = jh.at("gamma").get<double>();
  hyper.eta = jh.at("eta").get<std::vector<double>>();
  hyper.alpha = jh.at("alpha").get<std::vector<double>>();
  hyper.depth = jh.at("depth").get<int>();
  hyper.n_docs = jh.at("n_docs").get<std::size_t>();
  hyper.validate();
  const int depth = hyper.depth;

  ModelState s(hyper, hyper.n_docs);
  s.seed = p.at("seed").get<std::uint64_t>();
  s.iteration = p.at("iteration").get<std::uint64_t>();
  s.rng.restore(p.at("rng").at("state").get<std::string>(), p.at("rng").at("draws").get<std::uint64_t>());

  std::vector<NodeShape> shapes;
  for (const auto& jn : p.at("tree").at("nodes")) {
    NodeShape sh;
    sh.id = jn.at("id").get<NodeId>();
    if (!jn.at("parent").is_null()) sh.parent = jn.at("parent").get<NodeId>();
    sh.level = jn.at("level").get<int>();
    sh.children = jn.at("children").get<std::vector<NodeId>>();
    shapes.push_back(std::move(sh));
  }
  s.tree = Tree::from_shape(depth, hyper.n_docs, p.at("tree").at("next_id").get<NodeId>(), shapes);

  const auto& jw = p.at("words");
  s.words.resize(jw.size());
  for (WordId w = 0; w < jw.size(); ++w) {
    auto& ws = s.words[w];
    for (const auto& dc : jw[w].at("docs")) {
      const auto d = dc.at(0).get<DocId>();
      const auto c = dc.at(1).get<std::size_t>();
      if (d >= hyper.n_docs) throw ValueError("word " + std::to_string(w) + " references an unknown document");
      if (!ws.token_docs.empty() && d <= ws.token_docs.back())
        throw ValueError("word " + std::to_string(w) + " documents are not in ascending order");
      ws.token_docs.insert(ws.token_docs.end(), c, d);
    }
    ws.levels = jw[w].at("levels").get<std::vector<int>>();
    ws.path = jw[w].at("path").get<Path>();
    if (ws.levels.size() != ws.token_docs.size())
      throw ValueError("word " + std::to_string(w) + " has mismatched token and level counts");
    ws.level_counts.assign(depth, 0);
    for (int z : ws.levels) {
      if (z < 0 || z >= depth) throw ValueError("word " + std::to_string(w) + " has a level out of range");
      ++ws.level_counts[z];
    }
    if (!ws.active()) continue;
    if (ws.path.size() != static_cast<std::size_t>(depth) || ws.path[0] != s.tree.root_id())
      throw ValueError("word " + std::to_string(w) + " has a malformed path");
    s.active.push_back(w);
    s.tree.attach(Tree::existing(ws.path), level_doc_counts(ws, depth));
  }
  assert_state_consistency(s);
  return s;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checkpoint_dump(const ModelState& state, const Vocabulary& vocab, const json& config) {
  json payload = payload_of(state, vocab, config);
  const std::string checksum = hex64(fnv1a64(payload.dump()));
  json doc = {{"format", kFormat},
              {"version", kCheckpointVersion},
              {"checksum", checksum},
              {"payload", std::move(payload)}};
  return doc.dump() + "\n";
}

Checkpoint checkpoint_parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ChecksumError(std::string("checkpoint is corrupt: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormat)
      throw ChecksumError("not a checkpoint file");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw VersionError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kCheckpointVersion) + ")");
    const json& payload = doc.at("payload");
    if (hex64(fnv1a64(payload.dump())) != doc.at("checksum").get<std::string>())
      throw ChecksumError("checkpoint checksum mismatch");

    Checkpoint cp{state_of(payload), {}, payload.at("config")};
    cp.vocab.terms = payload.at("vocab").get<std::vector<std::string>>();
    return cp;
  } catch (const json::exception& e) {
    throw ValueError(std::string("malformed checkpoint: ") + e.what());
  }
}

void checkpoint_save(const ModelState& state, const std::filesystem::path& path, const Vocabulary& vocab,
                     const json& config) {
  const std::string bytes = checkpoint_dump(state, vocab, config);
  // Write then rename so a crash never leaves a truncated checkpoint behind.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << bytes;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_parse(ss.str());
}

}  // namespace hlwc
