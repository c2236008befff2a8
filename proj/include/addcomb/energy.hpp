#pragma once

// Additive (U^2) and U^3 energies, the parallelepiped count matrix R(a,b),
// the U^3 Gowers inner product and the normalized energy.
//
// Counting measure is used throughout. For a finitely supported f,
//
//   R(a,b) = sum_x f(x) f(x+a) f(x+b) f(x+a+b)
//   sum_{a,b} R(a,b)   = ||f||_{U^2}^4   (additive energy)
//   sum_{a,b} R(a,b)^2 = ||f||_{U^3}^8   (U^3 energy)
//
// The U^3 energy is computed row by row: for fixed a, R(a, .) is the
// autocorrelation of g_a(x) = f(x) f(x+a), so the work is sum_a r(a)^2 = E(f)
// and memory stays O(|supp f|^2).

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/detail/difference_table.hpp"
#include "addcomb/parallel.hpp"

namespace addcomb {

namespace detail {

template <class Num>
Num additive_energy_kernel(const DifferenceTable& t, std::span<const Num> w) {
  Num total = 0;
  for (DifferenceTable::Id d = 0; d < t.differences(); ++d) {
    Num r = 0;
    for (auto [i, j] : t.pairs(d)) r += w[i] * w[j];
    total += r * r;
  }
  return total;
}

/// Calls visit(a, b, value) for every nonzero R(a,b), row by row; rows are visited in
/// increasing a and each row's entries in first-touch order.
template <class Num, class Visit>
void rep_rows(const DifferenceTable& t, std::span<const Num> w, DifferenceTable::Id a_lo, DifferenceTable::Id a_hi,
              std::vector<Num>& scratch, std::vector<DifferenceTable::Id>& touched, Visit&& visit) {
  std::vector<Num> g;
  for (DifferenceTable::Id a = a_lo; a < a_hi; ++a) {
    auto ps = t.pairs(a);
    g.resize(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) g[k] = w[ps[k].first] * w[ps[k].second];
    touched.clear();
    for (std::size_t k1 = 0; k1 < ps.size(); ++k1) {
      if (g[k1] == 0) continue;
      for (std::size_t k2 = 0; k2 < ps.size(); ++k2) {
        if (g[k2] == 0) continue;
        const auto b = t.id(ps[k1].first, ps[k2].first);
        if (scratch[b] == 0) touched.push_back(b);
        scratch[b] += g[k1] * g[k2];
      }
    }
    for (auto b : touched) {
      visit(a, b, scratch[b]);
      scratch[b] = 0;
    }
  }
}

/// sum_{a,b} R(a,b)^2. Per-row partials are summed in row order, so the result is
/// independent of the number of workers even for floating point Num.
template <class Num>
Num u3_kernel(const DifferenceTable& t, std::span<const Num> w) {
  const std::size_t rows = t.differences();
  std::vector<Num> per_row(rows, Num(0));
  parallel_chunks(
      rows,
      [&](std::size_t, std::size_t lo, std::size_t hi) {
        std::vector<Num> scratch(rows, Num(0));
        std::vector<DifferenceTable::Id> touched;
        rep_rows<Num>(t, w, static_cast<DifferenceTable::Id>(lo), static_cast<DifferenceTable::Id>(hi), scratch, touched,
                      [&](DifferenceTable::Id a, DifferenceTable::Id, const Num& r) { per_row[a] += r * r; });
      },
      16);
  Num total = 0;
  for (const auto& v : per_row) total += v;
  return total;
}

/// Multilinear R: sum_x f1(x) f2(x+a) f3(x+b) f4(x+a+b), keyed by (a << 32 | b).
template <class Num>
std::unordered_map<std::uint64_t, Num> multilinear_rep(const DifferenceTable& t, std::span<const Num> f1,
                                                        std::span<const Num> f2, std::span<const Num> f3,
                                                        std::span<const Num> f4) {
  std::unordered_map<std::uint64_t, Num> out;
  const std::size_t n = t.points();
  for (std::size_t x = 0; x < n; ++x) {
    if (f1[x] == 0) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (f2[y] == 0) continue;
      const Num fxy = f1[x] * f2[y];
      const auto a = t.id(x, y);
      for (std::size_t z = 0; z < n; ++z) {
        if (f3[z] == 0) continue;
        const auto b = t.id(x, z);
        const auto corner = t.partner(y, b);
        if (corner == DifferenceTable::kNone || f4[corner] == 0) continue;
        out[(static_cast<std::uint64_t>(a) << 32) | b] += fxy * f3[z] * f4[corner];
      }
    }
  }
  return out;
}

/// Integer weights with a common denominator: f = weights / denominator.
struct ScaledWeights {
  std::vector<BigInt> weights;
  BigInt denominator = 1;
  bool unit = true;
};

inline ScaledWeights scale_weights(std::span<const Rational> values) {
  ScaledWeights s;
  for (const auto& v : values) s.denominator = lcm(s.denominator, v.get_den());
  s.weights.reserve(values.size());
  for (const auto& v : values) {
    BigInt w = v.get_num() * (s.denominator / v.get_den());
    if (w != 1 || s.denominator != 1) s.unit = false;
    s.weights.push_back(std::move(w));
  }
  return s;
}

inline ScaledWeights scale_weights(const MassFunction& f) {
  std::vector<Rational> v;
  v.reserve(f.size());
  for (const auto& e : f.support()) v.push_back(e.second);
  return scale_weights(v);
}

inline std::vector<LatticePoint> support_points(const MassFunction& f) {
  std::vector<LatticePoint> pts;
  pts.reserve(f.size());
  for (const auto& e : f.support()) pts.push_back(e.first);
  return pts;
}

/// Supports above this size fall back to big integers even for indicators (n^4 < 2^52).
inline constexpr std::size_t kMachineIntegerLimit = 8192;

template <class Kernel>
Rational exact_energy(const DifferenceTable& t, const ScaledWeights& s, unsigned degree, Kernel&& kernel) {
  if (s.unit && t.points() <= kMachineIntegerLimit) {
    std::vector<std::int64_t> w(t.points(), 1);
    const std::int64_t v = kernel(t, std::span<const std::int64_t>(w));
    return Rational(BigInt(std::to_string(v)));
  }
  const BigInt num = kernel(t, std::span<const BigInt>(s.weights));
  Rational r(num, pow(s.denominator, degree));
  r.canonicalize();
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Sparse R(a,b) with exact entries.
class RepMatrix {
 public:
  using Key = std::pair<LatticePoint, LatticePoint>;

  std::map<Key, Rational>& entries() { return entries_; }
  const std::map<Key, Rational>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  Rational at(const LatticePoint& a, const LatticePoint& b) const {
    auto it = entries_.find({a, b});
    return it == entries_.end() ? Rational(0) : it->second;
  }
  Rational total() const {
    Rational s = 0;
    for (const auto& [k, v] : entries_) s += v;
    return s;
  }
  Rational sum_of_squares() const {
    Rational s = 0;
    for (const auto& [k, v] : entries_) s += v * v;
    return s;
  }
  /// a -> sum_b R(a,b).
  std::map<LatticePoint, Rational> row_sums() const {
    std::map<LatticePoint, Rational> out;
    for (const auto& [k, v] : entries_) out[k.first] += v;
    return out;
  }
  /// b -> sum_a R(a,b).
  std::map<LatticePoint, Rational> column_sums() const {
    std::map<LatticePoint, Rational> out;
    for (const auto& [k, v] : entries_) out[k.second] += v;
    return out;
  }

 private:
  std::map<Key, Rational> entries_;
};

inline RepMatrix rep_matrix(const MassFunction& f) {
  RepMatrix out;
  if (f.empty()) return out;
  const auto pts = detail::support_points(f);
  const auto table = detail::lattice_difference_table(pts);
  const auto scaled = detail::scale_weights(f);
  const Rational scale(1, pow(scaled.denominator, 4));
  auto difference = [&](detail::DifferenceTable::Id d) {
    auto [i, j] = table.representative(d);
    return pts[j] - pts[i];
  };
  std::vector<BigInt> scratch(table.differences(), BigInt(0));
  std::vector<detail::DifferenceTable::Id> touched;
  detail::rep_rows<BigInt>(table, scaled.weights, 0, static_cast<detail::DifferenceTable::Id>(table.differences()), scratch,
                           touched, [&](auto a, auto b, const BigInt& r) {
                             Rational v = Rational(r) * scale;
                             v.canonicalize();
                             out.entries().emplace(RepMatrix::Key{difference(a), difference(b)}, std::move(v));
                           });
  return out;
}

/// ||f||_{U^2}^4 = #{x - y = z - w} weighted by f.
inline Rational additive_energy(const MassFunction& f) {
  if (f.empty()) return 0;
  const auto pts = detail::support_points(f);
  const auto table = detail::lattice_difference_table(pts);
  return detail::exact_energy(table, detail::scale_weights(f), 4, [](const auto& t, auto w) {
    return detail::additive_energy_kernel(t, w);
  });
}

/// ||f||_{U^3}^8.
inline Rational u3_energy(const MassFunction& f) {
  if (f.empty()) return 0;
  const auto pts = detail::support_points(f);
  const auto table = detail::lattice_difference_table(pts);
  return detail::exact_energy(table, detail::scale_weights(f), 8, [](const auto& t, auto w) {
    return detail::u3_kernel(t, w);
  });
}

inline BigInt additive_energy(const PointSet& a) { return additive_energy(MassFunction::indicator(a)).get_num(); }
inline BigInt u3_energy(const PointSet& a) { return u3_energy(MassFunction::indicator(a)).get_num(); }

/// <<f_1, ..., f_8>>_{U^3}.
inline Rational gowers_inner_u3(std::span<const MassFunction, 8> fs) {
  const std::size_t dim = fs[0].dim();
  std::vector<LatticePoint> pts;
  for (const auto& f : fs) {
    if (f.dim() != dim) throw Error("gowers_inner_u3: dimension mismatch");
    for (const auto& e : f.support()) pts.push_back(e.first);
  }
  for (const auto& f : fs)
    if (f.empty()) return 0;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<Rational> all;
  for (const auto& f : fs)
    for (const auto& e : f.support()) all.push_back(e.second);
  const BigInt denom = detail::scale_weights(all).denominator;

  std::array<std::vector<BigInt>, 8> w;
  for (std::size_t k = 0; k < 8; ++k) {
    w[k].assign(pts.size(), BigInt(0));
    for (const auto& [p, v] : fs[k].support()) {
      const auto idx = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), p) - pts.begin());
      w[k][idx] = v.get_num() * (denom / v.get_den());
    }
  }
  const auto table = detail::lattice_difference_table(pts);
  const auto lo = detail::multilinear_rep<BigInt>(table, w[0], w[1], w[2], w[3]);
  const auto hi = detail::multilinear_rep<BigInt>(table, w[4], w[5], w[6], w[7]);
  BigInt total = 0;
  for (const auto& [key, v] : lo) {
    auto it = hi.find(key);
    if (it != hi.end()) total += v * it->second;
  }
  Rational out(total, pow(denom, 8));
  out.canonicalize();
  return out;
}

/// (||f||_{U^3} / ||f||_2)^8 = u3_energy / (sum f^2)^4, exactly.
inline Rational normalized_energy_pow8(const MassFunction& f) {
  if (f.empty()) throw Error("normalized_energy: zero function");
  return u3_energy(f) / pow(f.l2_squared(), 4);
}

/// ||f||_{U^3} / ||f||_2, in (0, 1] for nonzero f.
inline double normalized_energy(const MassFunction& f) { return root_of(normalized_energy_pow8(f), 8); }
inline double normalized_energy(const PointSet& a) { return normalized_energy(MassFunction::indicator(a)); }

struct EnergyReport {
  Rational e_u2;
  Rational e_u3;
  Rational l1;
  Rational l2_sq;
  Rational l4_4;
  double normalized = 0;
};

inline EnergyReport energy_report(const MassFunction& f) {
  if (f.empty()) throw Error("energy_report: zero function");
  EnergyReport r;
  r.e_u2 = additive_energy(f);
  r.e_u3 = u3_energy(f);
  r.l1 = f.l1();
  r.l2_sq = f.l2_squared();
  r.l4_4 = f.power_sum(4);
  r.normalized = root_of(r.e_u3 / pow(r.l2_sq, 4), 8);
  return r;
}

// ---------------------------------------------------------------------------
// Functions on the cyclic group Z/NZ.

struct CyclicFunction {
  std::int64_t modulus = 1;
  std::vector<Rational> values;  // values[x] for x in [0, modulus)
};

namespace detail {
inline std::pair<DifferenceTable, ScaledWeights> cyclic_setup(const CyclicFunction& f) {
  if (f.modulus < 1 || static_cast<std::int64_t>(f.values.size()) != f.modulus)
    throw Error("CyclicFunction: values must have one entry per residue");
  std::vector<std::int64_t> residues;
  std::vector<Rational> w;
  for (std::int64_t x = 0; x < f.modulus; ++x) {
    if (f.values[static_cast<std::size_t>(x)] < 0) throw Error("CyclicFunction: negative value");
    if (f.values[static_cast<std::size_t>(x)] != 0) {
      residues.push_back(x);
      w.push_back(f.values[static_cast<std::size_t>(x)]);
    }
  }
  return {cyclic_difference_table(residues, f.modulus), scale_weights(w)};
}
}  // namespace detail

inline Rational u3_energy(const CyclicFunction& f) {
  auto [table, scaled] = detail::cyclic_setup(f);
  if (table.points() == 0) return 0;
  return detail::exact_energy(table, scaled, 8, [](const auto& t, auto w) { return detail::u3_kernel(t, w); });
}

inline Rational additive_energy(const CyclicFunction& f) {
  auto [table, scaled] = detail::cyclic_setup(f);
  if (table.points() == 0) return 0;
  return detail::exact_energy(table, scaled, 4, [](const auto& t, auto w) { return detail::additive_energy_kernel(t, w); });
}

}  // namespace addcomb
