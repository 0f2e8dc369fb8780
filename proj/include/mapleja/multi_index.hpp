#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mapleja/errors.hpp"

namespace mapleja {

/// Level tuple (l_1, ..., l_N). Ordered lexicographically.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : levels_(dim, 0u) {}
  explicit MultiIndex(std::vector<unsigned> levels) : levels_(std::move(levels)) {}
  MultiIndex(std::initializer_list<unsigned> levels) : levels_(levels) {}

  std::size_t size() const noexcept { return levels_.size(); }
  unsigned operator[](std::size_t n) const { return levels_[n]; }
  unsigned& operator[](std::size_t n) { return levels_[n]; }
  std::span<const unsigned> levels() const noexcept { return levels_; }

  unsigned total() const noexcept { return std::accumulate(levels_.begin(), levels_.end(), 0u); }
  unsigned max_level() const noexcept {
    unsigned m = 0;
    for (unsigned l : levels_) m = l > m ? l : m;
    return m;
  }

  MultiIndex forward(std::size_t n) const {
    MultiIndex r = *this;
    ++r.levels_[n];
    return r;
  }
  MultiIndex backward(std::size_t n) const {
    MultiIndex r = *this;
    --r.levels_[n];
    return r;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t n = 0; n < levels_.size(); ++n) {
      if (n) s += ' ';
      s += std::to_string(levels_[n]);
    }
    return s + ")";
  }

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<unsigned> levels_;
};

using MultiIndexSet = std::set<MultiIndex>;

/// True iff every backward neighbor of every member is a member.
inline bool is_downward_closed(const MultiIndexSet& set) {
  for (const auto& idx : set)
    for (std::size_t n = 0; n < idx.size(); ++n)
      if (idx[n] > 0 && !set.contains(idx.backward(n))) return false;
  return true;
}

/// Is `idx` outside `set` with all its backward neighbors inside?
inline bool is_admissible(const MultiIndexSet& set, const MultiIndex& idx) {
  if (set.contains(idx)) return false;
  for (std::size_t n = 0; n < idx.size(); ++n)
    if (idx[n] > 0 && !set.contains(idx.backward(n))) return false;
  return true;
}

/// Forward neighbors of a downward-closed set whose addition keeps it closed.
inline MultiIndexSet admissible_neighbors(const MultiIndexSet& set) {
  if (!is_downward_closed(set)) throw ContractError("index set is not downward-closed");
  MultiIndexSet out;
  for (const auto& idx : set)
    for (std::size_t n = 0; n < idx.size(); ++n) {
      auto cand = idx.forward(n);
      if (is_admissible(set, cand)) out.insert(std::move(cand));
    }
  return out;
}

/// {l : |l| <= k} in N dimensions.
inline MultiIndexSet total_degree_set(std::size_t dim, unsigned k) {
  MultiIndexSet out;
  MultiIndex idx(dim);
  // Odometer over the simplex.
  for (;;) {
    out.insert(idx);
    std::size_t n = 0;
    for (; n < dim; ++n) {
      ++idx[n];
      if (idx.total() <= k) break;
      idx[n] = 0;
    }
    if (n == dim) break;
  }
  return out;
}

/// Sparse-grid nodes with m(l) = l + 1 on nested sequences: exactly one
/// node (seq_1[l_1], ..., seq_N[l_N]) per multi-index.
inline std::vector<std::vector<double>> smolyak_nodes(
    const MultiIndexSet& set, std::span<const std::vector<double>> sequences) {
  if (!is_downward_closed(set)) throw ContractError("index set is not downward-closed");
  std::vector<std::vector<double>> out;
  out.reserve(set.size());
  for (const auto& idx : set) {
    if (idx.size() != sequences.size())
      throw ContractError("multi-index dimension does not match the node sequences");
    std::vector<double> y(idx.size());
    for (std::size_t n = 0; n < idx.size(); ++n) {
      if (idx[n] >= sequences[n].size()) throw ContractError("node sequence too short");
      y[n] = sequences[n][idx[n]];
    }
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace mapleja
