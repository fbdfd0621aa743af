#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "hlwc/likelihood.hpp"

namespace hlwc {

enum class SnapshotRule { Final, MaxLL };

SnapshotRule parse_snapshot_rule(const std::string& s);
std::string to_string(SnapshotRule rule);

struct ExportOptions {
  // A word is listed at a node on its path when its tokens at that level reach
  // both thresholds.
  double min_share = 0.1;
  std::uint64_t min_tokens = 1;
  std::size_t top_docs = 10;
  // DOT only.
  std::size_t dot_top_words = 8;
  int dot_first_level = 0;  // 1 hides the shared root
};

struct RunConfig {
  Hyperparams hyper = Hyperparams::defaults(0, 3);
  std::uint64_t iterations = 2500;
  std::uint64_t seed = 1;
  std::size_t skip_top = 0;
  std::size_t keep_next = 0;  // 0 disables vocabulary filtering
  std::uint64_t checkpoint_every = 0;
  SnapshotRule snapshot = SnapshotRule::Final;
  unsigned chains = 1;
  ExportOptions export_options;

  // Hyperparameter vectors must already be sized to the depth.
  void validate() const;
  nlohmann::json to_json() const;
};

}  // namespace hlwc
