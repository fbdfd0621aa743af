#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hlwc {

using DocId = std::uint32_t;
using WordId = std::uint32_t;
using NodeId = std::uint64_t;
using Count = std::uint32_t;

struct DocCount {
  DocId doc = 0;
  Count count = 0;

  friend bool operator==(const DocCount&, const DocCount&) = default;
};

// Sorted by doc id, every count >= 1.
using SparseDocCounts = std::vector<DocCount>;

// One SparseDocCounts per tree level: a word's tokens grouped by level allocation.
using LevelDocCounts = std::vector<SparseDocCounts>;

inline std::uint64_t total(const SparseDocCounts& counts) {
  std::uint64_t sum = 0;
  for (const auto& dc : counts) sum += dc.count;
  return sum;
}

}  // namespace hlwc
