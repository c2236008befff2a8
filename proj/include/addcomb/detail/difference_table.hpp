#pragma once

// Interned pairwise differences of a finite indexed support in an abelian group.
//
// Every energy kernel in the library (Z^d, F_2^d, Z/NZ) runs on top of this
// table: once differences p_j - p_i are replaced by small integer ids, the
// kernels are pure integer bookkeeping and never touch group elements again.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "addcomb/core.hpp"

namespace addcomb::detail {

class DifferenceTable {
 public:
  using Id = std::uint32_t;
  static constexpr Id kNone = std::numeric_limits<Id>::max();

  /// diff(i, j) returns a hashable key for p_j - p_i; keys are equal iff the differences are.
  template <class Key, class Hash, class Diff>
  static DifferenceTable build(std::size_t n, Diff&& diff) {
    DifferenceTable t;
    t.n_ = n;
    t.ids_.assign(n * n, 0);
    std::unordered_map<Key, Id, Hash> intern;
    intern.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        auto [it, fresh] = intern.try_emplace(diff(i, j), static_cast<Id>(intern.size()));
        if (fresh) t.representative_.emplace_back(static_cast<Id>(i), static_cast<Id>(j));
        t.ids_[i * n + j] = it->second;
      }
    }
    t.count_ = intern.size();
    t.zero_ = n ? t.ids_[0] : kNone;

    // Pairs grouped by difference (CSR), each group ordered by source index.
    t.offsets_.assign(t.count_ + 1, 0);
    for (Id d : t.ids_) ++t.offsets_[d + 1];
    for (std::size_t d = 0; d < t.count_; ++d) t.offsets_[d + 1] += t.offsets_[d];
    t.pairs_.resize(n * n);
    std::vector<std::size_t> fill(t.offsets_.begin(), t.offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t.pairs_[fill[t.ids_[i * n + j]]++] = {static_cast<Id>(i), static_cast<Id>(j)};

    // Per-row lookup: sorted (difference, partner).
    t.rows_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t.rows_[i * n + j] = {t.ids_[i * n + j], static_cast<Id>(j)};
      std::sort(t.rows_.begin() + static_cast<std::ptrdiff_t>(i * n), t.rows_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    return t;
  }

  std::size_t points() const { return n_; }
  std::size_t differences() const { return count_; }
  Id zero() const { return zero_; }
  Id id(std::size_t i, std::size_t j) const { return ids_[i * n_ + j]; }

  /// All (i, j) with p_j - p_i equal to difference d.
  std::span<const std::pair<Id, Id>> pairs(Id d) const {
    return {pairs_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }
  /// Number of ordered pairs realising d.
  std::size_t multiplicity(Id d) const { return offsets_[d + 1] - offsets_[d]; }
  /// Some pair (i, j) realising d.
  std::pair<Id, Id> representative(Id d) const { return representative_[d]; }

  /// Index j with p_j - p_i = d, or kNone.
  Id partner(std::size_t i, Id d) const {
    auto first = rows_.begin() + static_cast<std::ptrdiff_t>(i * n_);
    auto last = first + static_cast<std::ptrdiff_t>(n_);
    auto it = std::lower_bound(first, last, std::pair<Id, Id>{d, 0});
    if (it == last || it->first != d) return kNone;
    return it->second;
  }

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  Id zero_ = kNone;
  std::vector<Id> ids_;
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<Id, Id>> pairs_;
  std::vector<std::pair<Id, Id>> rows_;
  std::vector<std::pair<Id, Id>> representative_;
};

struct Int64VectorHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h = hash_combine(h, static_cast<std::size_t>(x));
    return h;
  }
};

/// Difference table for points of Z^d; uses machine integers when every coordinate is small.
inline DifferenceTable lattice_difference_table(std::span<const LatticePoint> pts) {
  const std::size_t n = pts.size();
  const std::size_t dim = n ? pts[0].dim() : 0;
  bool small = true;
  const BigInt limit = BigInt(1) << 61;
  for (const auto& p : pts)
    for (const auto& c : p.coords())
      if (abs(c) >= limit) small = false;
  if (small) {
    std::vector<std::int64_t> flat(n * dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < dim; ++k) flat[i * dim + k] = pts[i][k].get_si();
    return DifferenceTable::build<std::vector<std::int64_t>, Int64VectorHash>(n, [&](std::size_t i, std::size_t j) {
      std::vector<std::int64_t> d(dim);
      for (std::size_t k = 0; k < dim; ++k) d[k] = flat[j * dim + k] - flat[i * dim + k];
      return d;
    });
  }
  return DifferenceTable::build<LatticePoint, LatticePointHash>(n, [&](std::size_t i, std::size_t j) { return pts[j] - pts[i]; });
}

inline DifferenceTable parity_difference_table(std::span<const ParityClass> pts) {
  return DifferenceTable::build<ParityClass, ParityClassHash>(pts.size(), [&](std::size_t i, std::size_t j) { return pts[j] ^ pts[i]; });
}

/// Z/NZ with residues in [0, N).
inline DifferenceTable cyclic_difference_table(std::span<const std::int64_t> residues, std::int64_t modulus) {
  return DifferenceTable::build<std::int64_t, std::hash<std::int64_t>>(residues.size(), [&](std::size_t i, std::size_t j) {
    std::int64_t d = (residues[j] - residues[i]) % modulus;
    return d < 0 ? d + modulus : d;
  });
}

}  // namespace addcomb::detail
