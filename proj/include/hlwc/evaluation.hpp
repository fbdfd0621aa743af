#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hlwc/ncrp_tree.hpp"
#include "hlwc/sampler.hpp"

namespace hlwc {

// Adjusted Rand index between two labelings of the same items. Labels are
// arbitrary integers. When both partitions are trivial in the same way
// (the chance-corrected denominator vanishes) the result is 1.
double adjusted_rand_index(std::span<const std::uint64_t> predicted,
                           std::span<const std::uint64_t> truth);

// For each word in `words`, the node id on its path at `level`
// (negative level counts from the leaf: -1 is the leaf).
std::vector<std::uint64_t> cluster_labels(std::span<const Path> paths, std::span<const WordId> words,
                                          int level);
std::vector<std::uint64_t> cluster_labels(const ModelState& state, int level = -1);

}  // namespace hlwc
