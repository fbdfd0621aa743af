#include "hlwc/ncrp_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "hlwc/errors.hpp"
#include "hlwc/special.hpp"

namespace hlwc {

void DocHistogram::add(DocId d, Count c) {
  if (c == 0) return;
  if (counts_[d] == 0) ++support_;
  counts_[d] += c;
  total_ += c;
}

void DocHistogram::remove(DocId d, Count c) {
  if (c == 0) return;
  if (counts_[d] < c)
    throw ConsistencyError("doc count underflow at doc " + std::to_string(d) + ": have " +
                           std::to_string(counts_[d]) + ", removing " + std::to_string(c));
  counts_[d] -= c;
  total_ -= c;
  if (counts_[d] == 0) --support_;
}

SparseDocCounts DocHistogram::nonzero() const {
  SparseDocCounts out;
  out.reserve(support_);
  for_each_nonzero([&](DocId d, Count c) { out.push_back({d, c}); });
  return out;
}

int CandidatePath::first_new_level() const {
  for (std::size_t k = 0; k < steps.size(); ++k)
    if (!steps[k]) return static_cast<int>(k) + 1;
  return static_cast<int>(steps.size()) + 1;
}

Tree::Tree(int depth, std::size_t n_docs) : depth_(depth), n_docs_(n_docs) {
  if (depth < 1) throw ValueError("tree depth must be at least 1");
  Node root;
  root.id = next_id_++;
  root.level = 0;
  root.docs = DocHistogram(n_docs);
  root_id_ = root.id;
  nodes_.emplace(root.id, std::move(root));
}

Tree Tree::from_shape(int depth, std::size_t n_docs, NodeId next_id,
                      const std::vector<NodeShape>& shapes) {
  Tree t(depth, n_docs);
  t.nodes_.clear();
  bool have_root = false;
  for (const auto& s : shapes) {
    if (s.id >= next_id) throw ValueError("node id " + std::to_string(s.id) + " >= next_id");
    if (s.level < 0 || s.level >= depth)
      throw ValueError("node " + std::to_string(s.id) + " has level outside the tree depth");
    if (!s.parent) {
      if (have_root || s.level != 0) throw ValueError("tree skeleton must have exactly one level-0 root");
      have_root = true;
      t.root_id_ = s.id;
    }
    Node n;
    n.id = s.id;
    n.parent = s.parent;
    n.level = s.level;
    n.children = s.children;
    n.docs = DocHistogram(n_docs);
    if (!t.nodes_.emplace(s.id, std::move(n)).second)
      throw ValueError("duplicate node id " + std::to_string(s.id));
  }
  if (!have_root) throw ValueError("tree skeleton has no root");
  for (const auto& [id, n] : t.nodes_) {
    for (NodeId c : n.children) {
      auto it = t.nodes_.find(c);
      if (it == t.nodes_.end() || it->second.parent != id || it->second.level != n.level + 1)
        throw ValueError("node " + std::to_string(id) + " lists inconsistent child " + std::to_string(c));
    }
    if (n.parent) {
      auto it = t.nodes_.find(*n.parent);
      if (it == t.nodes_.end()) throw ValueError("node " + std::to_string(id) + " has unknown parent");
      const auto& sib = it->second.children;
      if (std::find(sib.begin(), sib.end(), id) == sib.end())
        throw ValueError("node " + std::to_string(id) + " missing from its parent's child list");
    }
  }
  t.next_id_ = next_id;
  return t;
}

const Node& Tree::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw StaleCandidateError("no node with id " + std::to_string(id));
  return it->second;
}

Node& Tree::mutable_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw StaleCandidateError("no node with id " + std::to_string(id));
  return it->second;
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const auto& kv) {
    return kv.second.level == depth_ - 1;
  }));
}

CandidatePath Tree::existing(std::span<const NodeId> path) {
  CandidatePath c;
  for (std::size_t k = 1; k < path.size(); ++k) c.steps.emplace_back(path[k]);
  return c;
}

Path Tree::attach(const CandidatePath& candidate, std::span<const SparseDocCounts> level_docs) {
  if (candidate.steps.size() != static_cast<std::size_t>(depth_ - 1))
    throw ValueError("candidate path length does not match tree depth");
  if (level_docs.size() != static_cast<std::size_t>(depth_))
    throw ValueError("level counts length does not match tree depth");

  // Validate before touching anything so a stale candidate leaves no trace.
  NodeId cur = root_id_;
  bool opened = false;
  for (const auto& step : candidate.steps) {
    if (!step) {
      opened = true;
      continue;
    }
    if (opened) throw StaleCandidateError("existing step below a new step");
    auto it = nodes_.find(*step);
    if (it == nodes_.end() || it->second.parent != cur)
      throw StaleCandidateError("candidate references node " + std::to_string(*step) +
                                " which is not a live child of " + std::to_string(cur));
    cur = *step;
  }

  Path path;
  path.reserve(depth_);
  path.push_back(root_id_);
  for (int level = 1; level < depth_; ++level) {
    const auto& step = candidate.steps[level - 1];
    if (step) {
      path.push_back(*step);
      continue;
    }
    Node n;
    n.id = next_id_++;
    n.parent = path.back();
    n.level = level;
    n.docs = DocHistogram(n_docs_);
    nodes_.at(path.back()).children.push_back(n.id);
    path.push_back(n.id);
    nodes_.emplace(n.id, std::move(n));
  }

  for (int level = 0; level < depth_; ++level) {
    Node& n = nodes_.at(path[level]);
    ++n.n_words;
    for (const auto& dc : level_docs[level]) n.docs.add(dc.doc, dc.count);
  }
  return path;
}

void Tree::detach(std::span<const NodeId> path, std::span<const SparseDocCounts> level_docs) {
  if (path.size() != static_cast<std::size_t>(depth_) || level_docs.size() != path.size())
    throw ConsistencyError("detach: path or level counts length does not match tree depth");
  if (path[0] != root_id_) throw ConsistencyError("detach: path does not start at the root");

  for (int level = 0; level < depth_; ++level) {
    auto it = nodes_.find(path[level]);
    if (it == nodes_.end())
      throw ConsistencyError("detach: node " + std::to_string(path[level]) + " does not exist");
    Node& n = it->second;
    if (n.level != level)
      throw ConsistencyError("detach: node " + std::to_string(n.id) + " is not at level " +
                             std::to_string(level));
    if (n.n_words == 0)
      throw ConsistencyError("detach: customer underflow at node " + std::to_string(n.id));
    --n.n_words;
    for (const auto& dc : level_docs[level]) n.docs.remove(dc.doc, dc.count);
  }

  for (int level = 1; level < depth_; ++level) {
    if (nodes_.at(path[level]).n_words == 0) {
      prune(path[level]);
      break;
    }
  }
}

void Tree::prune(NodeId id) {
  std::vector<NodeId> stack{id};
  const NodeId parent = *nodes_.at(id).parent;
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    auto it = nodes_.find(cur);
    const Node& n = it->second;
    if (n.n_words != 0 || n.docs.total() != 0)
      throw ConsistencyError("pruning node " + std::to_string(cur) + " which still holds counts");
    stack.insert(stack.end(), n.children.begin(), n.children.end());
    nodes_.erase(it);
  }
  auto& siblings = nodes_.at(parent).children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), id));
}

void Tree::add_token(NodeId id, DocId doc) { mutable_node(id).docs.add(doc, 1); }

void Tree::remove_token(NodeId id, DocId doc) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ConsistencyError("remove_token: no node " + std::to_string(id));
  it->second.docs.remove(doc, 1);
}

std::vector<CandidatePath> enumerate_candidates(const Tree& tree, double gamma) {
  std::vector<CandidatePath> out;
  const int depth = tree.depth();
  std::vector<std::optional<NodeId>> steps;
  steps.reserve(depth);

  std::function<void(const Node&, double)> visit = [&](const Node& n, double log_prior) {
    if (n.level == depth - 1) {
      out.push_back({steps, log_prior});
      return;
    }
    const double denom = static_cast<double>(n.n_words) + gamma;
    for (NodeId c : n.children) {
      const Node& child = tree.node(c);
      steps.emplace_back(c);
      visit(child, log_prior + std::log(static_cast<double>(child.n_words) / denom));
      steps.pop_back();
    }
    CandidatePath fresh{steps, log_prior + std::log(gamma / denom)};
    fresh.steps.resize(depth - 1);
    out.push_back(std::move(fresh));
  };
  visit(tree.root(), 0.0);
  return out;
}

double ncrp_log_prior(const Tree& tree, double gamma) {
  // CRP over m customers split into tables of sizes m_j:
  //   gamma^k * prod (m_j - 1)! / prod_{i<m} (gamma + i)
  const double log_gamma_param = std::log(gamma);
  double lp = 0.0;
  for (const auto& [id, n] : tree.nodes()) {
    if (n.level == tree.depth() - 1 || n.n_words == 0) continue;
    lp += log_gamma_fn(gamma) - log_gamma_fn(gamma + static_cast<double>(n.n_words));
    for (NodeId c : n.children) {
      lp += log_gamma_param + log_gamma_fn(static_cast<double>(tree.node(c).n_words));
    }
  }
  return lp;
}

void assert_consistency(const Tree& tree) {
  auto fail = [](NodeId id, const std::string& field, const std::string& detail) {
    throw ConsistencyError("node " + std::to_string(id) + " field " + field + ": " + detail);
  };

  const Node& root = tree.root();
  if (root.parent) fail(root.id, "parent", "root has a parent");
  if (root.level != 0) fail(root.id, "level", "root is not at level 0");

  std::size_t reached = 0;
  std::vector<NodeId> stack{tree.root_id()};
  while (!stack.empty()) {
    const Node& n = tree.nodes().at(stack.back());
    stack.pop_back();
    ++reached;
    if (n.id >= tree.next_id()) fail(n.id, "id", "not below next_id");
    if (n.docs.n_docs() != tree.n_docs()) fail(n.id, "docs", "histogram width differs from n_docs");

    std::uint64_t total = 0;
    std::size_t support = 0;
    n.docs.for_each_nonzero([&](DocId, Count c) {
      total += c;
      ++support;
    });
    if (total != n.docs.total())
      fail(n.id, "doc_total", "cached " + std::to_string(n.docs.total()) + ", recount " + std::to_string(total));
    if (support != n.docs.support()) fail(n.id, "docs", "cached support disagrees with recount");

    if (n.id != tree.root_id() && n.n_words == 0) fail(n.id, "n_words", "unpruned node without customers");

    if (n.level == tree.depth() - 1) {
      if (!n.children.empty()) fail(n.id, "children", "leaf has children");
      continue;
    }
    std::uint64_t child_sum = 0;
    for (NodeId c : n.children) {
      auto it = tree.nodes().find(c);
      if (it == tree.nodes().end()) fail(n.id, "children", "dangling child " + std::to_string(c));
      const Node& child = it->second;
      if (child.parent != n.id) fail(c, "parent", "does not point back to " + std::to_string(n.id));
      if (child.level != n.level + 1) fail(c, "level", "not one below its parent");
      child_sum += child.n_words;
      stack.push_back(c);
    }
    if (child_sum != n.n_words)
      fail(n.id, "n_words", std::to_string(n.n_words) + " but children sum to " + std::to_string(child_sum));
  }
  if (reached != tree.size())
    throw ConsistencyError(std::to_string(tree.size() - reached) + " nodes unreachable from the root");
}

}  // namespace hlwc
