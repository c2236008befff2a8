#pragma once

// Freiman 2-isomorphisms, the universal Freiman model of a finite set and its
// Freiman dimension.
//
// For A = {a_0, ..., a_{n-1}} the model lives in Z^{n-1} / L, where the symbol
// of a_i is e_i (e_0 = 0) and L is generated by e_i + e_j - e_k - e_l over all
// additive quadruples. Modulo torsion this is Z^d, d = n - 1 - rank L, and the
// images of the a_i generate it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/energy.hpp"
#include "addcomb/snf.hpp"

namespace addcomb {

/// a_i + a_j = a_k + a_l with i <= j, k <= l and (i, j) < (k, l).
struct Quadruple {
  std::size_t i, j, k, l;
  friend bool operator==(const Quadruple&, const Quadruple&) = default;
  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

namespace detail {

/// Unordered pairs (i <= j) grouped by their sum, groups in order of first appearance.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs_by_sum(std::span<const LatticePoint> a) {
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> index;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) {
      auto [it, fresh] = index.try_emplace(a[i] + a[j], groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].emplace_back(i, j);
    }
  return groups;
}

}  // namespace detail

inline std::vector<Quadruple> enumerate_quadruples(const PointSet& a) {
  std::vector<Quadruple> out;
  for (const auto& g : detail::pairs_by_sum(a.points()))
    for (std::size_t p = 0; p < g.size(); ++p)
      for (std::size_t q = p + 1; q < g.size(); ++q) out.push_back({g[p].first, g[p].second, g[q].first, g[q].second});
  std::sort(out.begin(), out.end());
  return out;
}

/// b_i + b_j = b_k + b_l exactly when a_i + a_j = a_k + a_l, for all index quadruples.
inline bool verify_freiman_iso(std::span<const LatticePoint> a, std::span<const LatticePoint> b) {
  if (a.size() != b.size()) throw Error("verify_freiman_iso: sizes differ");
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> sa, sb;
  std::vector<std::size_t> a_to_b, b_to_a;
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) {
      auto [ia, fa] = sa.try_emplace(a[i] + a[j], sa.size());
      auto [ib, fb] = sb.try_emplace(b[i] + b[j], sb.size());
      if (fa) a_to_b.push_back(kUnset);
      if (fb) b_to_a.push_back(kUnset);
      const std::size_t x = ia->second, y = ib->second;
      if (a_to_b[x] == kUnset && b_to_a[y] == kUnset) {
        a_to_b[x] = y;
        b_to_a[y] = x;
      } else if (a_to_b[x] != y || b_to_a[y] != x) {
        return false;
      }
    }
  return true;
}

/// Pairing by position in canonical order.
inline bool verify_freiman_iso(const PointSet& a, const PointSet& b) { return verify_freiman_iso(a.points(), b.points()); }

/// Pairing a[i] <-> b[pairing[i]].
inline bool verify_freiman_iso(const PointSet& a, const PointSet& b, std::span<const std::size_t> pairing) {
  if (a.size() != b.size() || pairing.size() != a.size()) throw Error("verify_freiman_iso: sizes differ");
  std::vector<bool> seen(b.size(), false);
  std::vector<LatticePoint> bb;
  for (std::size_t i : pairing) {
    if (i >= b.size() || seen[i]) throw Error("verify_freiman_iso: pairing is not a bijection");
    seen[i] = true;
    bb.push_back(b[i]);
  }
  return verify_freiman_iso(a.points(), bb);
}

/// True when {b_i - b_0} generates Z^dim as a group.
inline bool affinely_generates(std::span<const LatticePoint> b, std::size_t dim) {
  if (b.empty()) return false;
  IntMatrix m;
  for (std::size_t i = 1; i < b.size(); ++i) m.push_back((b[i] - b[0]).coords());
  if (dim == 0) return true;
  const auto d = elementary_divisors(m, dim);
  return d.size() == dim && std::all_of(d.begin(), d.end(), [](const BigInt& x) { return x == 1; });
}

struct ModelCertificate {
  std::size_t relations = 0;      // relation rows generated
  std::size_t relation_rank = 0;  // rank of L
  std::vector<BigInt> elementary_divisors;
};

struct UniversalModel {
  PointSet source;
  std::size_t dimension = 0;
  std::vector<LatticePoint> images;  // images[i] is the image of source[i]
  std::vector<BigInt> torsion_invariants;
  ModelCertificate certificate;

  PointSet image_set() const { return PointSet(dimension, images); }
};

class ModelVerificationError : public Error {
 public:
  ModelVerificationError(const std::string& what, ModelCertificate cert) : Error(what), certificate_(std::move(cert)) {}
  const ModelCertificate& certificate() const { return certificate_; }

 private:
  ModelCertificate certificate_;
};

namespace detail {

/// Rank over Q of {a_i - a_0}.
inline std::size_t affine_rank(const PointSet& a) {
  IntegerEchelon e(a.dim());
  for (std::size_t i = 1; i < a.size(); ++i) e.insert((a[i] - a[0]).coords());
  return e.rank();
}

}  // namespace detail

/// Builds the universal model and checks it: the images must be Freiman
/// isomorphic to A and must affinely generate Z^d.
inline UniversalModel universal_model(const PointSet& a) {
  if (a.size() < 2) throw Error("universal_model: need at least two points");
  const std::size_t n = a.size();
  const std::size_t cols = n - 1;

  // One relation per extra representation of each sum. The lattice can never
  // exceed rank n - 1 - rank(A - a_0), and once it is saturated at that rank
  // further relations cannot change it.
  const std::size_t max_rank = cols - detail::affine_rank(a);
  IntegerEchelon rel(cols);
  auto symbol = [&](IntVector& row, std::size_t idx, long s) {
    if (idx > 0) row[idx - 1] += s;
  };
  bool done = max_rank == 0;
  for (const auto& g : detail::pairs_by_sum(a.points())) {
    if (done) break;
    for (std::size_t q = 1; q < g.size() && !done; ++q) {
      IntVector row(cols, BigInt(0));
      symbol(row, g[0].first, 1);
      symbol(row, g[0].second, 1);
      symbol(row, g[q].first, -1);
      symbol(row, g[q].second, -1);
      rel.insert(std::move(row));
      done = rel.rank() == max_rank && rel.unit_pivots();
    }
  }

  const auto snf = smith_normal_form(rel.matrix(), cols, true);
  UniversalModel m;
  m.source = a;
  m.certificate.relations = rel.inserted();
  m.certificate.relation_rank = snf.rank();
  m.certificate.elementary_divisors = snf.diagonal;
  m.torsion_invariants = snf.torsion();
  m.dimension = cols - snf.rank();

  // Row i of V holds the coordinates of e_i; the free part is the last d of them.
  const IntMatrix& v = *snf.v;
  m.images.reserve(n);
  m.images.push_back(LatticePoint::zero(m.dimension));
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<BigInt> c(v[i - 1].begin() + static_cast<std::ptrdiff_t>(snf.rank()), v[i - 1].end());
    m.images.emplace_back(std::move(c));
  }

  if (m.dimension == 0)
    throw ModelVerificationError("universal_model: zero-dimensional model for a set of two or more points",
                                 m.certificate);
  if (!verify_freiman_iso(a.points(), m.images))
    throw ModelVerificationError("universal_model: images are not Freiman isomorphic to the source", m.certificate);
  if (!affinely_generates(m.images, m.dimension))
    throw ModelVerificationError("universal_model: images do not affinely generate Z^d", m.certificate);
  return m;
}

inline std::size_t freiman_dimension(const PointSet& a) {
  if (a.empty()) throw Error("freiman_dimension: empty set");
  if (a.size() == 1) return 0;
  return universal_model(a).dimension;
}

struct DimensionLemmaReport {
  std::size_t dim = 0;
  double k = 0;
  double c = 1;
  double bound = 0;  // K - 1 + C K^2 / |A|
  double margin = 0;
  bool holds = false;
};

/// dim(A) <= K - 1 + C K^2 / |A| with K the doubling constant; advisory.
inline DimensionLemmaReport check_dimension_lemma(const PointSet& a, double c = 1.0) {
  if (a.empty()) throw Error("check_dimension_lemma: empty set");
  DimensionLemmaReport r;
  r.dim = freiman_dimension(a);
  r.k = doubling_constant(a).get_d();
  r.c = c;
  r.bound = r.k - 1 + c * r.k * r.k / static_cast<double>(a.size());
  r.margin = r.bound - static_cast<double>(r.dim);
  r.holds = r.margin >= -1e-12;
  return r;
}

}  // namespace addcomb
