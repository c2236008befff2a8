#pragma once

// The L^2 mass profile of a function on Z^d modulo 2, and the F_2^d side of the
// energy argument: constrained quadruple sums, fiber norms, sparse U^3 norms on
// F_2^d and hyperplane splits of the profile.
//
// Everything here is sparse in the support; F_2^d itself is only materialised
// by the exhaustive hyperplane search for d <= 20.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/detail/difference_table.hpp"
#include "addcomb/energy.hpp"

namespace addcomb {

/// eta(w)^2 = sum of f(x)^2 over x = w mod 2.
struct EtaProfile {
  std::size_t dim = 0;
  std::map<ParityClass, Rational> mass_sq;
  Rational total;

  Rational mass(const ParityClass& w) const {
    auto it = mass_sq.find(w);
    return it == mass_sq.end() ? Rational(0) : it->second;
  }
  double eta(const ParityClass& w) const { return std::sqrt(mass(w).get_d()); }
  std::size_t size() const { return mass_sq.size(); }
};

inline EtaProfile eta_profile(const MassFunction& f) {
  if (f.empty()) throw Error("eta_profile: zero function");
  EtaProfile p;
  p.dim = f.dim();
  for (const auto& [x, w] : f.support()) {
    const Rational sq = w * w;
    p.mass_sq[parity_of(x)] += sq;
    p.total += sq;
  }
  return p;
}

inline EtaProfile eta_profile(const PointSet& a) { return eta_profile(MassFunction::indicator(a)); }

namespace detail {

template <class V>
std::vector<ParityClass> classes_of(const std::map<ParityClass, V>& m) {
  std::vector<ParityClass> out;
  out.reserve(m.size());
  for (const auto& kv : m) out.push_back(kv.first);
  return out;
}

}  // namespace detail

/// ||g||_{U^2}^4 over F_2^d with counting measure, for nonnegative rational g.
inline Rational f2_additive_energy(const std::map<ParityClass, Rational>& g) {
  if (g.empty()) return 0;
  const auto cls = detail::classes_of(g);
  std::vector<Rational> w;
  for (const auto& kv : g) w.push_back(kv.second);
  const auto table = detail::parity_difference_table(cls);
  return detail::exact_energy(table, detail::scale_weights(w), 4,
                              [](const auto& t, auto v) { return detail::additive_energy_kernel(t, v); });
}

/// ||g||_{U^3}^8 over F_2^d, exact for rational g.
inline Rational f2_u3_energy(const std::map<ParityClass, Rational>& g) {
  if (g.empty()) return 0;
  const auto cls = detail::classes_of(g);
  std::vector<Rational> w;
  for (const auto& kv : g) w.push_back(kv.second);
  const auto table = detail::parity_difference_table(cls);
  return detail::exact_energy(table, detail::scale_weights(w), 8,
                              [](const auto& t, auto v) { return detail::u3_kernel(t, v); });
}

/// sum over r + s + t + u = 0 (mod 2) of f(r)^2 f(s)^2 f(t)^2 f(u)^2, i.e. ||eta^2||_{U^2}^4.
inline Rational constrained_quad_sum(const EtaProfile& eta) { return f2_additive_energy(eta.mass_sq); }
inline Rational constrained_quad_sum(const MassFunction& f) {
  if (f.empty()) return 0;
  return constrained_quad_sum(eta_profile(f));
}

/// ||eta||_p = (sum eta^p)^(1/p), computed from the exact squares.
inline double eta_lp(const EtaProfile& eta, double p = 8.0 / 3.0) {
  if (!(p > 0)) throw Error("eta_lp: exponent must be positive");
  double s = 0;
  for (const auto& [w, m] : eta.mass_sq) s += std::pow(m.get_d(), p / 2);
  return std::pow(s, 1 / p);
}

// ---------------------------------------------------------------------------
// Sparse U^3 on F_2^d for real-valued functions.

/// ||g||_{U^3}^8 over F_2^d for nonnegative g. Uses the row-by-row R(a,b) kernel on
/// the XOR difference table, so the sum order is fixed and the result is
/// reproducible for any worker count.
inline double sparse_u3_f2_pow8(const std::map<ParityClass, double>& g) {
  std::map<ParityClass, double> pos;
  for (const auto& [w, v] : g) {
    if (v < 0) throw Error("sparse_u3_f2: negative value");
    if (v > 0) pos.emplace(w, v);
  }
  if (pos.empty()) return 0;
  const auto cls = detail::classes_of(pos);
  std::vector<double> w;
  for (const auto& kv : pos) w.push_back(kv.second);
  const auto table = detail::parity_difference_table(cls);
  return detail::u3_kernel<double>(table, std::span<const double>(w));
}

inline double sparse_u3_f2(const std::map<ParityClass, double>& g) { return std::pow(sparse_u3_f2_pow8(g), 0.125); }

inline std::map<ParityClass, double> eta_values(const EtaProfile& eta) {
  std::map<ParityClass, double> out;
  for (const auto& [w, m] : eta.mass_sq) out.emplace(w, std::sqrt(m.get_d()));
  return out;
}

/// E(eta) = ||eta||_{U^3} / ||eta||_2 over F_2^d.
inline double normalized_energy(const EtaProfile& eta) {
  if (eta.mass_sq.empty()) throw Error("normalized_energy: zero profile");
  const double t = eta.total.get_d();
  return std::pow(sparse_u3_f2_pow8(eta_values(eta)) / (t * t * t * t), 0.125);
}

// ---------------------------------------------------------------------------
// Fiber norms.

/// gamma(w) = ||f restricted to the class w||_{U^3}; the eighth powers are exact.
struct FiberGamma {
  std::size_t dim = 0;
  std::map<ParityClass, Rational> eighth;
  std::map<ParityClass, double> values;
  /// Support indices of f in each fiber, in support order.
  std::map<ParityClass, std::vector<std::size_t>> members;
};

inline FiberGamma fiber_gamma(const MassFunction& f) {
  if (f.empty()) throw Error("fiber_gamma: zero function");
  FiberGamma g;
  g.dim = f.dim();
  for (std::size_t i = 0; i < f.size(); ++i) g.members[parity_of(f.point(i))].push_back(i);
  for (const auto& [w, idx] : g.members) {
    const Rational e = u3_energy(f.restrict_to(idx));
    g.eighth.emplace(w, e);
    g.values.emplace(w, root_of(e, 8));
  }
  return g;
}

inline FiberGamma fiber_gamma(const PointSet& a) { return fiber_gamma(MassFunction::indicator(a)); }

// ---------------------------------------------------------------------------
// Linear algebra over F_2.

namespace detail {

/// Row-reduced basis of a subspace of F_2^d.
class F2Basis {
 public:
  explicit F2Basis(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }
  const std::vector<ParityClass>& rows() const { return rows_; }

  ParityClass reduce(ParityClass v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k)
      if (v.get(pivots_[k])) v ^= rows_[k];
    return v;
  }
  bool contains(const ParityClass& v) const { return reduce(v).is_zero(); }
  /// Returns false when v is already in the span.
  bool insert(const ParityClass& v) {
    ParityClass r = reduce(v);
    if (r.is_zero()) return false;
    const std::size_t p = r.lowest_bit();
    for (auto& row : rows_)
      if (row.get(p)) row ^= r;
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<ParityClass> rows_;
  std::vector<std::size_t> pivots_;
};

/// Some theta with dot(theta, h) = 0 on the span of `basis` and dot(theta, v) = 1,
/// or nothing when v lies in the span. Free variables are set to zero.
inline std::optional<ParityClass> f2_separating_functional(const F2Basis& basis, const ParityClass& v) {
  if (basis.contains(v)) return std::nullopt;
  // Solve M theta = e_last where the rows of M are the basis vectors followed by v.
  const std::size_t d = basis.dim();
  std::vector<ParityClass> rows = basis.rows();
  rows.push_back(v);
  std::vector<bool> rhs(rows.size(), false);
  rhs.back() = true;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < d && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && !rows[p].get(c)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    std::swap(rhs[p], rhs[r]);
    for (std::size_t q = 0; q < rows.size(); ++q)
      if (q != r && rows[q].get(c)) {
        rows[q] ^= rows[r];
        rhs[q] = rhs[q] != rhs[r];
      }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t q = r; q < rows.size(); ++q)
    if (rhs[q]) return std::nullopt;
  ParityClass theta(d);
  for (std::size_t q = 0; q < r; ++q)
    if (rhs[q]) theta.set(pivot_col[q]);
  return theta;
}

/// In-place Walsh-Hadamard transform (unnormalised).
inline void fwht(std::vector<std::int64_t>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1)
    for (std::size_t i = 0; i < a.size(); i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int64_t x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hyperplane splits.

/// A split of F_2^d by the functional w -> dot(normal, w); side i holds the classes
/// with dot = i. `heavy` is the side carrying more mass.
struct HyperplaneSplit {
  ParityClass normal;
  int heavy = 0;
  Rational alpha0_sq;
  Rational alpha1_sq;
  double alpha0 = 0;
  double alpha1 = 0;
  bool exhaustive = false;

  Rational light_sq() const { return heavy == 0 ? alpha1_sq : alpha0_sq; }
  bool side_of(const ParityClass& w) const { return dot(normal, w); }
};

inline HyperplaneSplit make_split(const EtaProfile& eta, const ParityClass& theta) {
  HyperplaneSplit s;
  s.normal = theta;
  Rational m1 = 0;
  for (const auto& [w, m] : eta.mass_sq)
    if (dot(theta, w)) m1 += m;
  s.alpha1_sq = m1 / eta.total;
  s.alpha0_sq = 1 - s.alpha1_sq;
  s.alpha0 = std::sqrt(s.alpha0_sq.get_d());
  s.alpha1 = std::sqrt(s.alpha1_sq.get_d());
  s.heavy = s.alpha1_sq > s.alpha0_sq ? 1 : 0;
  return s;
}

inline constexpr std::size_t kExhaustiveHyperplaneDim = 20;

namespace detail {

/// Integer masses on a common denominator if they fit the transform, else nothing.
inline std::optional<std::vector<std::pair<std::uint64_t, std::int64_t>>> integer_masses(const EtaProfile& eta) {
  std::vector<Rational> v;
  for (const auto& kv : eta.mass_sq) v.push_back(kv.second);
  const auto s = scale_weights(v);
  BigInt total = 0;
  for (const auto& w : s.weights) total += w;
  if (total >= (BigInt(1) << 62)) return std::nullopt;
  std::vector<std::pair<std::uint64_t, std::int64_t>> out;
  std::size_t k = 0;
  for (const auto& kv : eta.mass_sq) out.emplace_back(kv.first.as_index(), s.weights[k++].get_si());
  return out;
}

}  // namespace detail

/// Finds theta != 0 with 0 < min(alpha0, alpha1) <= tau. For d <= 20 every
/// hyperplane is examined and the one with the smallest nonzero light side is
/// returned (ties by canonical order of theta); otherwise the span detector runs.
inline std::optional<HyperplaneSplit> hyperplane_imbalance_search(const EtaProfile& eta, double tau = 0.1) {
  if (eta.mass_sq.empty()) throw Error("hyperplane_imbalance_search: zero profile");
  if (!(tau > 0)) throw Error("hyperplane_imbalance_search: tau must be positive");
  const Rational tau_sq = pow(exact_rational(tau), 2);
  const std::size_t d = eta.dim;

  if (d <= kExhaustiveHyperplaneDim) {
    if (auto masses = detail::integer_masses(eta)) {
      std::vector<std::int64_t> a(std::size_t{1} << d, 0);
      std::int64_t total = 0;
      for (auto [idx, m] : *masses) {
        a[idx] += m;
        total += m;
      }
      detail::fwht(a);
      // a[theta] = m0 - m1, so the light side carries (total - |a|) / 2.
      std::optional<std::uint64_t> best;
      std::int64_t best_light = 0;
      for (std::uint64_t theta = 1; theta < a.size(); ++theta) {
        const std::int64_t light2 = total - (a[theta] < 0 ? -a[theta] : a[theta]);
        if (light2 == 0) continue;
        if (Rational(light2, 2 * total) > tau_sq) continue;
        // canonical order on classes is lexicographic in the bit string
        auto canon = [&](std::uint64_t x) {
          ParityClass c(d);
          for (std::size_t i = 0; i < d; ++i)
            if ((x >> i) & 1u) c.set(i);
          return c;
        };
        if (!best || light2 < best_light || (light2 == best_light && canon(theta) < canon(*best))) {
          best = theta;
          best_light = light2;
        }
      }
      if (!best) return std::nullopt;
      ParityClass theta(d);
      for (std::size_t i = 0; i < d; ++i)
        if ((*best >> i) & 1u) theta.set(i);
      auto s = make_split(eta, theta);
      s.exhaustive = true;
      return s;
    }
  }

  // Span detector: classes in decreasing mass order until (1 - tau^2) of the mass is covered.
  std::vector<std::pair<Rational, ParityClass>> order;
  for (const auto& [w, m] : eta.mass_sq) order.emplace_back(m, w);
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  const ParityClass& x0 = order.front().second;
  const Rational needed = (1 - tau_sq) * eta.total;
  detail::F2Basis span(d);
  Rational covered = 0;
  std::size_t used = 0;
  while (used < order.size() && covered < needed) {
    span.insert(order[used].second ^ x0);
    covered += order[used].first;
    ++used;
  }
  if (span.rank() == d) return std::nullopt;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ParityClass v = order[k].second ^ x0;
    if (span.contains(v)) continue;
    auto theta = detail::f2_separating_functional(span, v);
    if (!theta) continue;
    auto s = make_split(eta, *theta);
    if (s.light_sq() > 0 && s.light_sq() <= tau_sq) return s;
  }
  return std::nullopt;
}

}  // namespace addcomb
