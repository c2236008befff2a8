#pragma once

// Integer row echelon forms and the Smith normal form over Z, with unbounded
// integers throughout.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "addcomb/numeric.hpp"

namespace addcomb {

using IntVector = std::vector<BigInt>;
using IntMatrix = std::vector<IntVector>;  // row-major

/// U * M * V = diag(d_1, ..., d_r, 0, ...) with d_i > 0 and d_i | d_{i+1}.
struct SmithForm {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BigInt> diagonal;  // the r nonzero invariants
  std::optional<IntMatrix> v;    // cols x cols, unimodular, when requested

  std::size_t rank() const { return diagonal.size(); }
  /// Invariants other than 1.
  std::vector<BigInt> torsion() const {
    std::vector<BigInt> t;
    for (const auto& d : diagonal)
      if (d != 1) t.push_back(d);
    return t;
  }
};

namespace detail {

inline void swap_columns(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (auto& row : m) std::swap(row[a], row[b]);
}

/// column b -= q * column a
inline void sub_column(IntMatrix& m, std::size_t a, std::size_t b, const BigInt& q) {
  for (auto& row : m) row[b] -= q * row[a];
}

}  // namespace detail

/// Smallest-pivot elimination. When track_v is set the column transform V is kept;
/// row transforms are discarded.
inline SmithForm smith_normal_form(IntMatrix m, std::size_t cols, bool track_v = false) {
  SmithForm out;
  out.rows = m.size();
  out.cols = cols;
  for (const auto& row : m)
    if (row.size() != cols) throw Error("smith_normal_form: ragged matrix");
  IntMatrix v;
  if (track_v) {
    v.assign(cols, IntVector(cols, BigInt(0)));
    for (std::size_t i = 0; i < cols; ++i) v[i][i] = 1;
  }
  const std::size_t rows = m.size();

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block goes to (t, t).
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (m[i][j] != 0 && (!best || abs(m[i][j]) < abs(m[best->first][best->second]))) best = {i, j};
      if (!best) break;
      std::swap(m[t], m[best->first]);
      detail::swap_columns(m, t, best->second);
      if (track_v) detail::swap_columns(v, t, best->second);

      bool dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        const BigInt q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        const BigInt q = m[t][j] / m[t][t];
        detail::sub_column(m, t, j, q);
        if (track_v) detail::sub_column(v, t, j, q);
        if (m[t][j] != 0) dirty = true;
      }
      if (dirty) continue;

      // Divisibility: fold an offending row into row t and go again.
      std::optional<std::size_t> bad;
      for (std::size_t i = t + 1; i < rows && !bad; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (m[i][j] % m[t][t] != 0) {
            bad = i;
            break;
          }
      if (!bad) break;
      for (std::size_t j = t; j < cols; ++j) m[t][j] += m[*bad][j];
    }
    if (t >= rows || m[t][t] == 0) break;
    if (m[t][t] < 0) m[t][t] = -m[t][t];
    out.diagonal.push_back(m[t][t]);
  }
  if (track_v) out.v = std::move(v);
  return out;
}

inline std::vector<BigInt> elementary_divisors(const IntMatrix& m, std::size_t cols) {
  return smith_normal_form(m, cols).diagonal;
}

/// Integer row echelon form built one row at a time; spans the same lattice as the
/// rows inserted. Pivots are kept positive.
class IntegerEchelon {
 public:
  explicit IntegerEchelon(std::size_t cols) : cols_(cols) {}

  std::size_t cols() const { return cols_; }
  std::size_t rank() const { return rows_.size(); }
  std::size_t inserted() const { return inserted_; }

  /// True when every pivot is 1, i.e. the lattice is saturated in Z^cols.
  bool unit_pivots() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const auto& kv) { return kv.second[kv.first] == 1; });
  }

  void insert(IntVector v) {
    if (v.size() != cols_) throw Error("IntegerEchelon: wrong row length");
    ++inserted_;
    for (;;) {
      std::size_t c = 0;
      while (c < cols_ && v[c] == 0) ++c;
      if (c == cols_) return;
      auto it = rows_.find(c);
      if (it == rows_.end()) {
        if (v[c] < 0)
          for (auto& x : v) x = -x;
        rows_.emplace(c, std::move(v));
        return;
      }
      IntVector& p = it->second;
      if (v[c] % p[c] == 0) {
        const BigInt q = v[c] / p[c];
        for (std::size_t j = c; j < cols_; ++j) v[j] -= q * p[j];
        continue;
      }
      BigInt g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), p[c].get_mpz_t(), v[c].get_mpz_t());
      const BigInt vp = v[c] / g, pp = p[c] / g;
      IntVector np(cols_), nv(cols_);
      for (std::size_t j = 0; j < cols_; ++j) {
        np[j] = s * p[j] + t * v[j];
        nv[j] = vp * p[j] - pp * v[j];
      }
      if (np[c] < 0)
        for (auto& x : np) x = -x;
      p = std::move(np);
      v = std::move(nv);
    }
  }

  IntMatrix matrix() const {
    IntMatrix m;
    for (const auto& kv : rows_) m.push_back(kv.second);
    return m;
  }

 private:
  std::size_t cols_;
  std::size_t inserted_ = 0;
  std::map<std::size_t, IntVector> rows_;
};

}  // namespace addcomb
