#pragma once

// Points, finite sets and finitely supported non-negative functions on Z^d,
// parity classes in F_2^d, and elementary set arithmetic.
//
// All containers are canonical: PointSet keeps its points sorted
// lexicographically without duplicates and MassFunction keeps its support
// sorted with strictly positive weights, so structural equality is equality of
// the mathematical objects.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "addcomb/numeric.hpp"

namespace addcomb {

class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::vector<BigInt> coords) : coords_(std::move(coords)) {}
  LatticePoint(std::initializer_list<long> coords) {
    coords_.reserve(coords.size());
    for (long c : coords) coords_.emplace_back(c);
  }
  static LatticePoint zero(std::size_t dim) { return LatticePoint(std::vector<BigInt>(dim, BigInt(0))); }

  std::size_t dim() const { return coords_.size(); }
  const BigInt& operator[](std::size_t i) const { return coords_[i]; }
  BigInt& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<BigInt>& coords() const { return coords_; }

  LatticePoint& operator+=(const LatticePoint& o) {
    check_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  LatticePoint& operator-=(const LatticePoint& o) {
    check_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }
  friend LatticePoint operator-(LatticePoint a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend LatticePoint operator*(const BigInt& k, LatticePoint a) {
    for (auto& c : a.coords_) c *= k;
    return a;
  }

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) { return a.coords_ == b.coords_; }
  friend bool operator!=(const LatticePoint& a, const LatticePoint& b) { return !(a == b); }
  friend bool operator<(const LatticePoint& a, const LatticePoint& b) {
    const std::size_t n = std::min(a.dim(), b.dim());
    for (std::size_t i = 0; i < n; ++i) {
      const int c = cmp(a.coords_[i], b.coords_[i]);
      if (c != 0) return c < 0;
    }
    return a.dim() < b.dim();
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ",";
      s += coords_[i].get_str();
    }
    return s + ")";
  }

 private:
  void check_dim(const LatticePoint& o) const {
    if (o.dim() != dim()) throw Error("LatticePoint: dimension mismatch");
  }
  std::vector<BigInt> coords_;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const {
    std::size_t h = p.dim();
    for (const auto& c : p.coords()) h = hash_combine(h, hash_value(c));
    return h;
  }
};

/// A finite subset of Z^d in canonical (lexicographic) order.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 1) : dim_(dim) {
    if (dim == 0) throw Error("PointSet: dimension must be positive");
  }
  PointSet(std::size_t dim, std::vector<LatticePoint> points) : PointSet(dim) {
    for (const auto& p : points)
      if (p.dim() != dim) throw Error("PointSet: point " + p.to_string() + " has wrong dimension");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    points_ = std::move(points);
  }
  /// One-dimensional set from plain integers.
  static PointSet of(std::initializer_list<long> values) {
    std::vector<LatticePoint> pts;
    for (long v : values) pts.push_back(LatticePoint{v});
    return PointSet(1, std::move(pts));
  }
  static PointSet of_integers(std::span<const BigInt> values) {
    std::vector<LatticePoint> pts;
    for (const auto& v : values) pts.emplace_back(std::vector<BigInt>{v});
    return PointSet(1, std::move(pts));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<LatticePoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  bool contains(const LatticePoint& p) const { return std::binary_search(points_.begin(), points_.end(), p); }
  /// Index of p in canonical order, or size() if absent.
  std::size_t index_of(const LatticePoint& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) return points_.size();
    return static_cast<std::size_t>(it - points_.begin());
  }
  bool is_subset_of(const PointSet& other) const {
    return dim_ == other.dim_ && std::includes(other.points_.begin(), other.points_.end(), points_.begin(), points_.end());
  }
  /// Subset selected by (not necessarily sorted) indices into this set.
  PointSet subset(std::span<const std::size_t> indices) const {
    std::vector<LatticePoint> pts;
    pts.reserve(indices.size());
    for (std::size_t i : indices) pts.push_back(points_.at(i));
    return PointSet(dim_, std::move(pts));
  }

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.dim_ == b.dim_ && a.points_ == b.points_; }
  friend bool operator!=(const PointSet& a, const PointSet& b) { return !(a == b); }

 private:
  std::size_t dim_;
  std::vector<LatticePoint> points_;
};

/// Finitely supported map Z^d -> positive rationals (zero weights are dropped).
class MassFunction {
 public:
  using Entry = std::pair<LatticePoint, Rational>;

  explicit MassFunction(std::size_t dim = 1) : dim_(dim) {
    if (dim == 0) throw Error("MassFunction: dimension must be positive");
  }
  /// Weights of repeated points are added; negative weights are rejected.
  MassFunction(std::size_t dim, std::vector<Entry> entries) : MassFunction(dim) {
    std::map<LatticePoint, Rational> acc;
    for (auto& [p, w] : entries) {
      if (p.dim() != dim) throw Error("MassFunction: point " + p.to_string() + " has wrong dimension");
      if (w < 0) throw Error("MassFunction: negative weight at " + p.to_string());
      acc[p] += w;
    }
    for (auto& [p, w] : acc)
      if (w != 0) support_.emplace_back(p, w);
  }
  static MassFunction indicator(const PointSet& a) {
    MassFunction f(a.dim());
    f.support_.reserve(a.size());
    for (const auto& p : a) f.support_.emplace_back(p, Rational(1));
    return f;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }
  const std::vector<Entry>& support() const { return support_; }
  const LatticePoint& point(std::size_t i) const { return support_[i].first; }
  const Rational& weight(std::size_t i) const { return support_[i].second; }

  Rational at(const LatticePoint& p) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), p,
                               [](const Entry& e, const LatticePoint& q) { return e.first < q; });
    if (it == support_.end() || it->first != p) return Rational(0);
    return it->second;
  }
  bool is_indicator() const {
    return std::all_of(support_.begin(), support_.end(), [](const Entry& e) { return e.second == 1; });
  }
  PointSet support_set() const {
    std::vector<LatticePoint> pts;
    for (const auto& e : support_) pts.push_back(e.first);
    return PointSet(dim_, std::move(pts));
  }

  /// sum of f^p for a positive integer p.
  Rational power_sum(unsigned p) const {
    Rational s = 0;
    for (const auto& e : support_) s += pow(e.second, p);
    return s;
  }
  Rational l1() const { return power_sum(1); }
  Rational l2_squared() const { return power_sum(2); }

  /// f restricted to the support indices given (in any order).
  MassFunction restrict_to(std::span<const std::size_t> indices) const {
    std::vector<Entry> out;
    for (std::size_t i : indices) out.push_back(support_.at(i));
    return MassFunction(dim_, std::move(out));
  }

  friend bool operator==(const MassFunction& a, const MassFunction& b) {
    return a.dim_ == b.dim_ && a.support_ == b.support_;
  }

 private:
  std::size_t dim_;
  std::vector<Entry> support_;
};

/// A vector in F_2^d stored as packed 64-bit words (a single word when d <= 64).
class ParityClass {
 public:
  explicit ParityClass(std::size_t dim = 0) : dim_(dim), words_((dim + 63) / 64, 0) {}
  static ParityClass from_bits(std::string_view bits) {
    ParityClass c(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') c.set(i);
      else if (bits[i] != '0') throw Error("ParityClass: bit string must contain only 0 and 1");
    }
    return c;
  }
  static ParityClass unit(std::size_t dim, std::size_t i) {
    ParityClass c(dim);
    c.set(i);
    return c;
  }

  std::size_t dim() const { return dim_; }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (v) words_[i / 64] |= mask;
    else words_[i / 64] &= ~mask;
  }
  bool is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  /// Lowest set bit, or dim() when zero.
  std::size_t lowest_bit() const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return dim_;
  }
  const std::vector<std::uint64_t>& words() const { return words_; }
  /// Value as an integer; only meaningful for dim() <= 64.
  std::uint64_t as_index() const { return words_.empty() ? 0 : words_[0]; }

  ParityClass& operator^=(const ParityClass& o) {
    if (o.dim_ != dim_) throw Error("ParityClass: dimension mismatch");
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }
  friend ParityClass operator^(ParityClass a, const ParityClass& b) { return a ^= b; }
  /// Inner product over F_2.
  friend bool dot(const ParityClass& a, const ParityClass& b) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < a.words_.size(); ++k) acc ^= a.words_[k] & b.words_[k];
    return std::popcount(acc) & 1;
  }

  std::string to_string() const {
    std::string s(dim_, '0');
    for (std::size_t i = 0; i < dim_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const ParityClass& a, const ParityClass& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_;
  }
  friend bool operator!=(const ParityClass& a, const ParityClass& b) { return !(a == b); }
  /// Canonical order: lexicographic in the bit string.
  friend bool operator<(const ParityClass& a, const ParityClass& b) {
    if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
    for (std::size_t k = 0; k < a.words_.size(); ++k) {
      const std::uint64_t diff = a.words_[k] ^ b.words_[k];
      if (diff) return ((b.words_[k] >> std::countr_zero(diff)) & 1u) != 0;
    }
    return false;
  }

 private:
  std::size_t dim_;
  std::vector<std::uint64_t> words_;
};

struct ParityClassHash {
  std::size_t operator()(const ParityClass& c) const {
    std::size_t h = c.dim();
    for (auto w : c.words()) h = hash_combine(h, static_cast<std::size_t>(w));
    return h;
  }
};

// ---------------------------------------------------------------------------
// Set arithmetic

/// { s1*x + s2*y : x in X, y in Y } with s1, s2 in {+1, -1}.
inline PointSet sumset(const PointSet& x, const PointSet& y, std::pair<int, int> signs = {1, 1}) {
  if (x.dim() != y.dim()) throw Error("sumset: dimension mismatch");
  auto check = [](int s) {
    if (s != 1 && s != -1) throw Error("sumset: signs must be +1 or -1");
  };
  check(signs.first);
  check(signs.second);
  std::vector<LatticePoint> out;
  out.reserve(x.size() * y.size());
  for (const auto& a : x) {
    const LatticePoint sa = signs.first == 1 ? a : -a;
    for (const auto& b : y) out.push_back(signs.second == 1 ? sa + b : sa - b);
  }
  return PointSet(x.dim(), std::move(out));
}

inline PointSet dilate(const PointSet& x, const BigInt& lambda) {
  std::vector<LatticePoint> out;
  out.reserve(x.size());
  for (const auto& a : x) out.push_back(lambda * a);
  return PointSet(x.dim(), std::move(out));
}

inline PointSet translate(const PointSet& x, const LatticePoint& c) {
  std::vector<LatticePoint> out;
  out.reserve(x.size());
  for (const auto& a : x) out.push_back(a + c);
  return PointSet(x.dim(), std::move(out));
}

/// |A+A| / |A|.
inline Rational doubling_constant(const PointSet& a) {
  if (a.empty()) throw Error("doubling_constant: empty set");
  Rational k(static_cast<unsigned long>(sumset(a, a).size()), static_cast<unsigned long>(a.size()));
  k.canonicalize();
  return k;
}

inline ParityClass parity_of(const LatticePoint& p) {
  ParityClass c(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i)
    if (mpz_odd_p(p[i].get_mpz_t())) c.set(i);
  return c;
}

/// Residue classes of A modulo m (coordinates in [0, m)) with multiplicities.
inline std::map<LatticePoint, std::size_t> reduce_mod(const PointSet& a, const BigInt& m) {
  if (m < 2) throw Error("reduce_mod: modulus must be at least 2");
  std::map<LatticePoint, std::size_t> counts;
  for (const auto& p : a) {
    std::vector<BigInt> r;
    r.reserve(p.dim());
    for (const auto& c : p.coords()) r.push_back(mod_floor(c, m));
    ++counts[LatticePoint(std::move(r))];
  }
  return counts;
}

/// Embeds a set into Z^(d + extra) by appending zero coordinates.
inline PointSet pad_dimension(const PointSet& a, std::size_t extra) {
  std::vector<LatticePoint> out;
  for (const auto& p : a) {
    auto c = p.coords();
    c.resize(p.dim() + extra, BigInt(0));
    out.emplace_back(std::move(c));
  }
  return PointSet(a.dim() + extra, std::move(out));
}

}  // namespace addcomb
