#include "hlwc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hlwc/errors.hpp"

namespace hlwc {

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ConsistencyError("Rng::index with empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::restore(const std::string& state, std::uint64_t draws) {
  std::istringstream in(state);
  std::mt19937_64 e;
  in >> e;
  if (in.fail()) throw ValueError("malformed RNG state");
  engine_ = e;
  draws_ = draws;
}

std::size_t sample_discrete(std::span<const double> w, Rng& rng) {
  double sum = 0.0;
  for (double v : w) sum += v;
  if (!(sum > 0.0) || !std::isfinite(sum)) throw ConsistencyError("sampling from non-positive weights");
  double u = rng.uniform() * sum;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  // Rounding left u just past the end; take the last positive entry.
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0.0) return i;
  return w.size() - 1;
}

std::size_t sample_log_discrete(std::span<const double> log_w, Rng& rng) {
  if (log_w.empty()) throw ConsistencyError("sampling from an empty set");
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(top)) throw ConsistencyError("no candidate has finite log weight");
  thread_local std::vector<double> w;
  w.resize(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) w[i] = std::exp(log_w[i] - top);
  return sample_discrete(w, rng);
}

}  // namespace hlwc
