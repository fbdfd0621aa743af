#include "hlwc/evaluation.hpp"

#include <map>
#include <utility>

#include "hlwc/errors.hpp"

namespace hlwc {

namespace {

double pairs(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const std::uint64_t> predicted,
                           std::span<const std::uint64_t> truth) {
  if (predicted.size() != truth.size()) throw ValueError("labelings cover different numbers of items");
  const double n = static_cast<double>(predicted.size());

  std::map<std::pair<std::uint64_t, std::uint64_t>, double> table;
  std::map<std::uint64_t, double> rows;
  std::map<std::uint64_t, double> cols;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    table[{predicted[i], truth[i]}] += 1.0;
    rows[predicted[i]] += 1.0;
    cols[truth[i]] += 1.0;
  }

  double index = 0.0;
  for (const auto& [key, c] : table) index += pairs(c);
  double row_pairs = 0.0;
  for (const auto& [key, c] : rows) row_pairs += pairs(c);
  double col_pairs = 0.0;
  for (const auto& [key, c] : cols) col_pairs += pairs(c);

  const double total = pairs(n);
  const double expected = total > 0.0 ? row_pairs * col_pairs / total : 0.0;
  const double max_index = 0.5 * (row_pairs + col_pairs);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

std::vector<std::uint64_t> cluster_labels(std::span<const Path> paths, std::span<const WordId> words,
                                          int level) {
  std::vector<std::uint64_t> out;
  out.reserve(words.size());
  for (WordId w : words) {
    const Path& p = paths[w];
    const int depth = static_cast<int>(p.size());
    const int l = level < 0 ? depth + level : level;
    if (l < 0 || l >= depth) throw ValueError("cluster level outside the tree depth");
    out.push_back(p[l]);
  }
  return out;
}

std::vector<std::uint64_t> cluster_labels(const ModelState& state, int level) {
  std::vector<Path> paths;
  paths.reserve(state.words.size());
  for (const auto& ws : state.words) paths.push_back(ws.path);
  return cluster_labels(paths, state.active, level);
}

}  // namespace hlwc
