#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hlwc/types.hpp"

namespace hlwc {

// Per-node document occurrence counts. Stored densely over all document ids
// since lookups dominate the sampler; absent ids read as zero.
class DocHistogram {
 public:
  DocHistogram() = default;
  explicit DocHistogram(std::size_t n_docs) : counts_(n_docs, 0) {}

  std::size_t n_docs() const { return counts_.size(); }
  Count count(DocId d) const { return counts_[d]; }
  std::uint64_t total() const { return total_; }
  // Number of documents with a nonzero count.
  std::size_t support() const { return support_; }

  void add(DocId d, Count c);
  // Throws ConsistencyError on underflow.
  void remove(DocId d, Count c);

  // Nonzero entries in ascending doc order.
  SparseDocCounts nonzero() const;
  template <class F>
  void for_each_nonzero(F&& f) const {
    for (DocId d = 0; d < counts_.size(); ++d)
      if (counts_[d] != 0) f(d, counts_[d]);
  }

  friend bool operator==(const DocHistogram&, const DocHistogram&) = default;

 private:
  std::vector<Count> counts_;
  std::uint64_t total_ = 0;
  std::size_t support_ = 0;
};

struct Node {
  NodeId id = 0;
  std::optional<NodeId> parent;
  int level = 0;
  std::vector<NodeId> children;
  // Words whose path passes through this node (CRP customers).
  std::uint64_t n_words = 0;
  DocHistogram docs;

  friend bool operator==(const Node&, const Node&) = default;
};

// A root-to-leaf path proposal. steps[k] is the node at level k + 1; an empty
// optional means "new node". Once a step is new, every deeper step is new.
struct CandidatePath {
  std::vector<std::optional<NodeId>> steps;
  double log_prior = 0.0;

  // Level of the first new node, or depth when the path is all existing.
  int first_new_level() const;
  friend bool operator==(const CandidatePath&, const CandidatePath&) = default;
};

// Root-to-leaf node ids, length = depth.
using Path = std::vector<NodeId>;

// Skeleton entry used to rebuild a tree from a checkpoint.
struct NodeShape {
  NodeId id = 0;
  std::optional<NodeId> parent;
  int level = 0;
  std::vector<NodeId> children;
};

// Fixed-depth nCRP tree. The root (level 0) is shared by every word; each
// attached word owns a path that ends in a leaf at level depth - 1.
class Tree {
 public:
  Tree(int depth, std::size_t n_docs);

  // Rebuilds structure with zero counts; callers then re-attach every word
  // along its existing path. Throws ValueError on a malformed skeleton.
  static Tree from_shape(int depth, std::size_t n_docs, NodeId next_id,
                         const std::vector<NodeShape>& nodes);

  int depth() const { return depth_; }
  std::size_t n_docs() const { return n_docs_; }
  NodeId root_id() const { return root_id_; }
  NodeId next_id() const { return next_id_; }
  const Node& root() const { return nodes_.at(root_id_); }
  const Node& node(NodeId id) const;
  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  // Ordered by id.
  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t n_leaves() const;

  // Materializes new steps, then adds one customer and the word's per-level
  // document counts along the path. level_docs.size() must equal depth.
  Path attach(const CandidatePath& candidate, std::span<const SparseDocCounts> level_docs);

  // Inverse of attach. Nodes left without customers are pruned eagerly.
  void detach(std::span<const NodeId> path, std::span<const SparseDocCounts> level_docs);

  // Single-token moves used by level resampling.
  void add_token(NodeId id, DocId doc);
  void remove_token(NodeId id, DocId doc);

  // Path of existing nodes as a candidate (log_prior left at 0).
  static CandidatePath existing(std::span<const NodeId> path);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  Node& mutable_node(NodeId id);
  void prune(NodeId id);

  int depth_;
  std::size_t n_docs_;
  NodeId root_id_ = 0;
  NodeId next_id_ = 0;
  std::map<NodeId, Node> nodes_;
};

// One candidate per existing leaf plus one per node that can open a new
// child (every non-leaf node, the root included). log_prior is the nCRP
// probability of the path given the words currently attached.
std::vector<CandidatePath> enumerate_candidates(const Tree& tree, double gamma);

// Closed-form log P(C | gamma) for the current attachment: a CRP factor
// at every internal node over its children's customer counts.
double ncrp_log_prior(const Tree& tree, double gamma);

// Recomputes every structural and count invariant from scratch. Throws
// ConsistencyError naming the offending node and field.
void assert_consistency(const Tree& tree);

}  // namespace hlwc
