#pragma once

// Test-only reference computations. Each one evaluates a quantity along a
// different route from the library (sequential products instead of
// log-gamma closed forms, pair enumeration instead of contingency tables).

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "hlwc/types.hpp"

namespace hlwc::oracle {

// Sequential Polya-urn probability of drawing `draws` (in the given order)
// from an urn already holding `urn` with symmetric pseudo-count eta over
// n_docs colours.
inline double polya_urn_log(std::map<DocId, std::uint64_t> urn, const std::vector<DocId>& draws,
                            double eta, std::size_t n_docs) {
  double total = 0.0;
  for (const auto& [d, c] : urn) total += static_cast<double>(c);
  double lp = 0.0;
  for (DocId d : draws) {
    lp += std::log((static_cast<double>(urn[d]) + eta) / (total + static_cast<double>(n_docs) * eta));
    ++urn[d];
    total += 1.0;
  }
  return lp;
}

inline std::vector<DocId> expand(const SparseDocCounts& counts) {
  std::vector<DocId> out;
  for (const auto& dc : counts) out.insert(out.end(), dc.count, dc.doc);
  return out;
}

// Sequential Polya urn with a per-category pseudo-count vector (used for
// the level-occupancy marginal with a non-symmetric alpha).
inline double polya_urn_log_vector(const std::vector<int>& draws, const std::vector<double>& alpha) {
  std::vector<double> counts(alpha.size(), 0.0);
  double alpha_sum = 0.0;
  for (double a : alpha) alpha_sum += a;
  double lp = 0.0;
  double n = 0.0;
  for (int k : draws) {
    lp += std::log((counts[k] + alpha[k]) / (n + alpha_sum));
    counts[k] += 1.0;
    n += 1.0;
  }
  return lp;
}

// Chinese restaurant process: probability of seating customers in order,
// table labels given per customer (first occurrence opens the table).
inline double crp_sequential_log(const std::vector<int>& tables, double gamma) {
  std::map<int, double> occupancy;
  double seated = 0.0;
  double lp = 0.0;
  for (int t : tables) {
    auto it = occupancy.find(t);
    if (it == occupancy.end()) {
      lp += std::log(gamma / (seated + gamma));
      occupancy[t] = 1.0;
    } else {
      lp += std::log(it->second / (seated + gamma));
      it->second += 1.0;
    }
    seated += 1.0;
  }
  return lp;
}

// ARI by enumerating every unordered pair of items.
inline double ari_by_pairs(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  double both = 0.0;
  double in_a = 0.0;
  double in_b = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1.0;
    }
  }
  const double expected = in_a * in_b / pairs;
  return (both - expected) / (0.5 * (in_a + in_b) - expected);
}

}  // namespace hlwc::oracle
