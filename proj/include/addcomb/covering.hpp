#pragma once

// Ruzsa covering: greedy maximal families of disjoint translates, the covering
// of 2A - 2A by translates of 2.A, and residue counts modulo N.

#include <atomic>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/parallel.hpp"

namespace addcomb {

struct CoverCertificate {
  std::vector<LatticePoint> translates;
  std::size_t k = 0;
  Rational bound;  // |X + Y| / |X|
  bool covered = false;
  // set by cover_2A2A
  std::optional<Rational> doubling;
  std::optional<Rational> doubling_bound;  // K^6

  bool within_bound() const {
    if (Rational(static_cast<unsigned long>(k)) > bound) return false;
    return !doubling_bound || Rational(static_cast<unsigned long>(k)) <= *doubling_bound;
  }
  bool ok() const { return covered && within_bound(); }
};

using PointHashSet = std::unordered_set<LatticePoint, LatticePointHash>;

/// Checks Y inside the union of y_i + X - X by explicit membership.
inline bool verify_cover(const PointSet& x, const PointSet& y, const std::vector<LatticePoint>& translates) {
  const auto diff = sumset(x, x, {1, -1});
  const PointHashSet d(diff.begin(), diff.end());
  std::atomic<bool> ok{true};
  parallel_chunks(y.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi && ok.load(std::memory_order_relaxed); ++i) {
      bool hit = false;
      for (const auto& t : translates)
        if (d.count(y[i] - t)) {
          hit = true;
          break;
        }
      if (!hit) ok = false;
    }
  });
  return ok;
}

/// Scans Y in canonical order and keeps y whenever y + X misses every translate kept so far.
inline CoverCertificate ruzsa_cover(const PointSet& x, const PointSet& y) {
  if (x.empty()) throw Error("ruzsa_cover: X is empty");
  if (x.dim() != y.dim()) throw Error("ruzsa_cover: dimension mismatch");
  CoverCertificate c;
  PointHashSet used;
  for (const auto& p : y) {
    bool disjoint = true;
    for (const auto& a : x)
      if (used.count(p + a)) {
        disjoint = false;
        break;
      }
    if (!disjoint) continue;
    for (const auto& a : x) used.insert(p + a);
    c.translates.push_back(p);
  }
  c.k = c.translates.size();
  c.bound = Rational(static_cast<unsigned long>(sumset(x, y).size()), static_cast<unsigned long>(x.size()));
  c.bound.canonicalize();
  c.covered = verify_cover(x, y, c.translates);
  return c;
}

/// Covers 2A - 2A by translates of 2.A - 2.A; records K = |A+A|/|A| and checks k <= K^6.
inline CoverCertificate cover_2A2A(const PointSet& a) {
  if (a.empty()) throw Error("cover_2A2A: empty set");
  const auto two_a = sumset(a, a);
  auto c = ruzsa_cover(dilate(a, 2), sumset(two_a, two_a, {1, -1}));
  c.doubling = doubling_constant(a);
  c.doubling_bound = pow(*c.doubling, 6);
  return c;
}

struct ResidueReport {
  BigInt modulus;
  std::size_t size = 0;
  std::size_t classes = 0;  // |image of A mod N|
  Rational doubling;
  unsigned exponent = 0;  // 6 for N = 2, 4 + N otherwise
  Rational bound;         // K^exponent
  bool pass = false;
};

inline ResidueReport residue_bound(const PointSet& a, const BigInt& n) {
  if (n < 2) throw Error("residue_bound: modulus must be at least 2");
  if (a.empty()) throw Error("residue_bound: empty set");
  ResidueReport r;
  r.modulus = n;
  r.size = a.size();
  r.classes = reduce_mod(a, n).size();
  r.doubling = doubling_constant(a);
  if (n == 2) r.exponent = 6;
  else if (n.fits_uint_p() && n.get_ui() <= 60) r.exponent = 4 + static_cast<unsigned>(n.get_ui());
  else r.exponent = 64;  // checks against K^64 <= K^(4+N), a stronger test
  r.bound = pow(r.doubling, r.exponent);
  r.pass = Rational(static_cast<unsigned long>(r.classes)) <= r.bound;
  return r;
}

}  // namespace addcomb
