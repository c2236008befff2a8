#pragma once

// Executable checks of the energy inequalities and identities, and seeded
// sweeps over random inputs.
//
// Every check is arranged as lhs <= rhs. When both sides are rational (eighth
// powers of norms, counts) the comparison is exact; otherwise it is done in
// doubles with relative tolerance 1e-9.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/energy.hpp"
#include "addcomb/mod2.hpp"
#include "addcomb/parallel.hpp"
#include "addcomb/random.hpp"

namespace addcomb {

inline constexpr double kRelativeTolerance = 1e-9;

struct CheckResult {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  std::optional<Rational> lhs_exact;
  std::optional<Rational> rhs_exact;
  double margin = 0;  // rhs - lhs
  bool exact = false;
  bool pass = false;
  std::string witness;
  std::vector<CheckResult> parts;

  /// margin / max(|lhs|, |rhs|), or 0 when both sides vanish.
  double relative_margin() const {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0 ? 0 : margin / scale;
  }
};

namespace detail {

inline CheckResult exact_check(std::string name, const Rational& lhs, const Rational& rhs) {
  CheckResult r;
  r.name = std::move(name);
  r.lhs_exact = lhs;
  r.rhs_exact = rhs;
  r.lhs = lhs.get_d();
  r.rhs = rhs.get_d();
  r.margin = Rational(rhs - lhs).get_d();
  r.exact = true;
  r.pass = lhs <= rhs;
  return r;
}

inline CheckResult exact_equality(std::string name, const Rational& lhs, const Rational& rhs) {
  auto r = exact_check(std::move(name), lhs, rhs);
  r.pass = lhs == rhs;
  return r;
}

inline CheckResult float_check(std::string name, double lhs, double rhs) {
  CheckResult r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = r.margin >= -kRelativeTolerance * std::max(std::abs(lhs), std::abs(rhs));
  return r;
}

inline CheckResult bundle(std::string name, std::vector<CheckResult> parts) {
  const auto worst = std::min_element(parts.begin(), parts.end(), [](const CheckResult& a, const CheckResult& b) {
    if (a.pass != b.pass) return !a.pass;
    return a.relative_margin() < b.relative_margin();
  });
  CheckResult r = *worst;
  r.parts.clear();
  r.name = std::move(name);
  r.exact = std::all_of(parts.begin(), parts.end(), [](const CheckResult& p) { return p.exact; });
  r.pass = std::all_of(parts.begin(), parts.end(), [](const CheckResult& p) { return p.pass; });
  r.parts = std::move(parts);
  return r;
}

inline void require_nonzero(const MassFunction& f, const char* what) {
  if (f.empty()) throw Error(std::string(what) + ": zero function");
}

/// Exact square root of a rational square, if it is one.
inline std::optional<Rational> rational_sqrt(const Rational& x) {
  if (x < 0) return std::nullopt;
  if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) return std::nullopt;
  BigInt n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// sum over r + s + t + u = 0 (mod 2) of f(r)^2 f(s)^2 f(t)^2 f(u)^2, straight from the
/// points: pairs (r, s) grouped by the parity of r + s.
inline Rational constrained_sum_from_points(const MassFunction& f) {
  std::map<ParityClass, Rational> pair_mass;
  for (const auto& [r, fr] : f.support())
    for (const auto& [s, fs] : f.support()) pair_mass[parity_of(r + s)] += fr * fr * fs * fs;
  Rational total = 0;
  for (const auto& kv : pair_mass) total += kv.second * kv.second;
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Energy inequalities.

/// ||f||_{U^3} >= ||f||_{U^2}^2 / ||f||_1, as E(f)^4 <= u3(f) ||f||_1^8.
inline CheckResult check_shkredov(const MassFunction& f) {
  detail::require_nonzero(f, "check_shkredov");
  const Rational e = additive_energy(f);
  return detail::exact_check("shkredov", pow(e, 4), u3_energy(f) * pow(f.l1(), 8));
}

/// ||f||_{U^3} <= ||f||_{U^2}^(1/2) ||f||_4^(1/2), as u3(f) <= E(f) sum f^4.
inline CheckResult check_amgm_upper(const MassFunction& f) {
  detail::require_nonzero(f, "check_amgm_upper");
  return detail::exact_check("amgm_upper", u3_energy(f), additive_energy(f) * f.power_sum(4));
}

inline bool is_odd_prime(std::int64_t n) {
  if (n < 3 || n % 2 == 0) return false;
  for (std::int64_t p = 3; p * p <= n; p += 2)
    if (n % p == 0) return false;
  return true;
}

/// ||f||_{U^3} <= ||f||_2 on Z/NZ for N an odd prime, as u3(f) <= (sum f^2)^4.
inline CheckResult check_u3_le_l2_cyclic(const CyclicFunction& f) {
  if (!is_odd_prime(f.modulus)) throw Error("check_u3_le_l2_cyclic: modulus must be an odd prime");
  Rational l2 = 0;
  for (const auto& v : f.values) l2 += v * v;
  return detail::exact_check("u3_le_l2_cyclic", u3_energy(f), pow(l2, 4));
}

/// u3(f) <= sum_{r+s+t+u = 0 mod 2} f(r)^2 f(s)^2 f(t)^2 f(u)^2 = ||eta^2||_{U^2}^4 and
/// ||f||_{U^3} <= ||eta||_{8/3}.
inline CheckResult check_mod2(const MassFunction& f) {
  detail::require_nonzero(f, "check_mod2");
  const auto eta = eta_profile(f);
  const Rational u3 = u3_energy(f);
  const Rational direct = detail::constrained_sum_from_points(f);
  const Rational via_eta = constrained_quad_sum(eta);
  std::vector<CheckResult> parts;
  parts.push_back(detail::exact_check("u3_le_constrained_sum", u3, direct));
  parts.push_back(detail::exact_equality("constrained_sum_eq_eta_sq_u2", direct, via_eta));
  parts.push_back(detail::float_check("u3_le_eta_8_3", root_of(u3, 8), eta_lp(eta, 8.0 / 3.0)));
  return detail::bundle("mod2", std::move(parts));
}

/// ||f||_{U^3} <= ||gamma||_{U^3} with gamma(w) = ||f on the class w||_{U^3}.
inline CheckResult check_fibering(const MassFunction& f) {
  detail::require_nonzero(f, "check_fibering");
  const auto g = fiber_gamma(f);
  const Rational u3 = u3_energy(f);
  const double lhs = u3.get_d();
  return detail::float_check("fibering", lhs, sparse_u3_f2_pow8(g.values));
}

/// <<F_1, ..., F_8>>_{U^3} <= prod ||F_i||_{U^3}, as <<...>>^8 <= prod u3(F_i).
inline CheckResult check_gcs(std::span<const MassFunction, 8> fs) {
  Rational prod = 1;
  for (const auto& f : fs) prod *= u3_energy(f);
  return detail::exact_check("gowers_cauchy_schwarz", pow(gowers_inner_u3(fs), 8), prod);
}

/// sum R(a,b) = E(f), sum R(a,b)^2 = u3(f), sum_a (sum_b R(a,b))^(1/2) = ||f||_1^2.
inline CheckResult check_r_identities(const MassFunction& f) {
  detail::require_nonzero(f, "check_r_identities");
  const auto r = rep_matrix(f);
  std::vector<CheckResult> parts;
  parts.push_back(detail::exact_equality("sum_r_eq_u2", r.total(), additive_energy(f)));
  parts.push_back(detail::exact_equality("sum_r_sq_eq_u3", r.sum_of_squares(), u3_energy(f)));
  Rational roots = 0;
  bool squares = true;
  for (const auto& [a, s] : r.row_sums()) {
    auto q = detail::rational_sqrt(s);
    if (!q) {
      squares = false;
      break;
    }
    roots += *q;
  }
  auto third = detail::exact_equality("sum_sqrt_rows_eq_l1_sq", roots, pow(f.l1(), 2));
  if (!squares) third.pass = false;
  parts.push_back(std::move(third));
  return detail::bundle("r_identities", std::move(parts));
}

// ---------------------------------------------------------------------------
// The analytic lemma and the entropy inequalities behind it.

using NonnegMatrix = std::vector<std::vector<Rational>>;

/// sum R^2 >= (sum R)^4 / ([sum_a (sum_b R)^(1/2)]^2 [sum_b (sum_a R)^(1/2)]^2).
inline CheckResult check_key_lemma(const NonnegMatrix& r) {
  Rational total = 0, squares = 0;
  std::size_t cols = 0;
  for (const auto& row : r) cols = std::max(cols, row.size());
  std::vector<Rational> rows(r.size()), col_sums(cols);
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r[a].size(); ++b) {
      const Rational& v = r[a][b];
      if (v < 0) throw Error("check_key_lemma: negative entry");
      total += v;
      squares += v * v;
      rows[a] += v;
      col_sums[b] += v;
    }
  if (total == 0) throw Error("check_key_lemma: zero matrix");
  double sa = 0, sb = 0;
  for (const auto& x : rows) sa += std::sqrt(x.get_d());
  for (const auto& x : col_sums) sb += std::sqrt(x.get_d());
  const double t = total.get_d();
  return detail::float_check("key_lemma", t * t * t * t / (sa * sa * sb * sb), squares.get_d());
}

/// For a joint distribution W of (X, Y): 2 log sum W_X^(1/2) >= H(X) (and for Y),
/// log sum W^2 >= -H(X, Y), and H(X, Y) <= H(X) + H(Y). Natural logarithms.
inline CheckResult renyi_checks(const NonnegMatrix& w) {
  Rational total = 0;
  std::size_t cols = 0;
  for (const auto& row : w) cols = std::max(cols, row.size());
  std::vector<Rational> px(w.size()), py(cols);
  Rational collision = 0;
  double hxy = 0;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = 0; b < w[a].size(); ++b) {
      const Rational& v = w[a][b];
      if (v < 0) throw Error("renyi_checks: negative probability");
      total += v;
      px[a] += v;
      py[b] += v;
      collision += v * v;
      if (v > 0) hxy -= v.get_d() * std::log(v.get_d());
    }
  if (total != 1) throw Error("renyi_checks: distribution does not sum to 1");
  auto entropy = [](const std::vector<Rational>& p) {
    double h = 0;
    for (const auto& x : p)
      if (x > 0) h -= x.get_d() * std::log(x.get_d());
    return h;
  };
  auto half_renyi = [](const std::vector<Rational>& p) {
    double s = 0;
    for (const auto& x : p) s += std::sqrt(x.get_d());
    return 2 * std::log(s);
  };
  const double hx = entropy(px), hy = entropy(py);
  std::vector<CheckResult> parts;
  parts.push_back(detail::float_check("renyi_half_x", hx, half_renyi(px)));
  parts.push_back(detail::float_check("renyi_half_y", hy, half_renyi(py)));
  parts.push_back(detail::float_check("collision", -hxy, std::log(collision.get_d())));
  parts.push_back(detail::float_check("subadditivity", hxy, hx + hy));
  return detail::bundle("renyi", std::move(parts));
}

// ---------------------------------------------------------------------------
// Random inputs.

inline constexpr std::array<long, 3> kSampleBoxes{3, 10, 100};
inline constexpr long kMaxDenominator = 16;

inline Rational random_weight(std::mt19937_64& rng) {
  Rational r(draw(rng, 1, 2 * kMaxDenominator), draw(rng, 1, kMaxDenominator));
  r.canonicalize();
  return r;
}

/// Support points uniform in [-box, box]^dim, weights p/q with q <= 16.
inline MassFunction random_mass_function(std::mt19937_64& rng, std::size_t dim, std::size_t max_support, long box) {
  const auto n = static_cast<std::size_t>(draw(rng, 1, static_cast<long>(max_support)));
  std::map<LatticePoint, Rational> m;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<BigInt> c;
    for (std::size_t k = 0; k < dim; ++k) c.emplace_back(draw(rng, -box, box));
    m[LatticePoint(std::move(c))] = random_weight(rng);
  }
  return MassFunction(dim, std::vector<std::pair<LatticePoint, Rational>>(m.begin(), m.end()));
}

inline NonnegMatrix random_matrix(std::mt19937_64& rng, std::size_t max_side, bool sparse) {
  const auto rows = static_cast<std::size_t>(draw(rng, 1, static_cast<long>(max_side)));
  const auto cols = static_cast<std::size_t>(draw(rng, 1, static_cast<long>(max_side)));
  NonnegMatrix m(rows, std::vector<Rational>(cols, Rational(0)));
  bool any = false;
  for (auto& row : m)
    for (auto& x : row)
      if (!sparse || draw(rng, 0, 3) == 0) {
        x = random_weight(rng);
        any = true;
      }
  if (!any) m[0][0] = 1;
  return m;
}

inline NonnegMatrix normalized(NonnegMatrix m) {
  Rational total = 0;
  for (const auto& row : m)
    for (const auto& x : row) total += x;
  for (auto& row : m)
    for (auto& x : row) x /= total;
  return m;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t passed = 0;
  double worst_margin = 0;  // smallest relative margin seen
  bool exact = true;
  std::vector<CheckResult> failures;  // first few, with witnesses

  bool ok() const { return passed == samples; }
};

/// One sample of a suite; `index` and `seed` select the generator state.
using SampleCheck = std::function<CheckResult(std::mt19937_64&, std::size_t index)>;

inline SweepReport run_sweep(const std::string& suite, std::size_t samples, std::uint64_t seed, const SampleCheck& check,
                             std::size_t keep_failures = 5) {
  std::vector<CheckResult> results(samples);
  parallel_chunks(samples, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto rng = sample_rng(seed, i);
      results[i] = check(rng, i);
      if (!results[i].pass && results[i].witness.empty())
        results[i].witness = "seed=" + std::to_string(seed) + " index=" + std::to_string(i);
    }
  });
  SweepReport rep;
  rep.suite = suite;
  rep.seed = seed;
  rep.samples = samples;
  bool first = true;
  for (auto& r : results) {
    if (r.pass) ++rep.passed;
    else if (rep.failures.size() < keep_failures) rep.failures.push_back(r);
    rep.exact = rep.exact && r.exact;
    const double m = r.relative_margin();
    if (first || m < rep.worst_margin) rep.worst_margin = m;
    first = false;
  }
  return rep;
}

namespace detail {

inline std::string describe(const MassFunction& f) {
  std::string s = "{";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ", ";
    s += f.point(i).to_string() + ": " + f.weight(i).get_str();
  }
  return s + "}";
}

inline CheckResult with_witness(CheckResult r, const std::string& w) {
  if (!r.pass) r.witness = w;
  return r;
}

/// Sample parameters cycle with the index so every sweep covers every box and dimension.
inline std::size_t sample_dim(std::size_t i) { return 1 + i % 3; }
inline long sample_box(std::size_t i) { return kSampleBoxes[(i / 3) % kSampleBoxes.size()]; }

}  // namespace detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "shkredov", "amgm", "cyclic", "mod2",
                                              "fibering",   "gcs",      "key_lemma", "renyi"};
  return names;
}

/// The sample check behind each named suite.
inline SampleCheck suite_check(const std::string& suite) {
  using detail::describe;
  using detail::sample_box;
  using detail::sample_dim;
  using detail::with_witness;
  auto on_function = [](CheckResult (*fn)(const MassFunction&), std::size_t max_support) -> SampleCheck {
    return [fn, max_support](std::mt19937_64& rng, std::size_t i) {
      const auto f = random_mass_function(rng, sample_dim(i), max_support, sample_box(i));
      return with_witness(fn(f), describe(f));
    };
  };
  if (suite == "identities")
    return [](std::mt19937_64& rng, std::size_t i) {
      // Z and Z^2, support up to 12
      const auto f = random_mass_function(rng, 1 + i % 2, 12, kSampleBoxes[(i / 2) % 3]);
      std::vector<CheckResult> parts{check_r_identities(f)};
      const Rational direct = detail::constrained_sum_from_points(f);
      parts.push_back(detail::exact_equality("constrained_sum_eq_eta_sq_u2", direct, constrained_quad_sum(eta_profile(f))));
      return with_witness(detail::bundle("identities", std::move(parts)), describe(f));
    };
  if (suite == "shkredov") return on_function(check_shkredov, 10);
  if (suite == "amgm") return on_function(check_amgm_upper, 10);
  if (suite == "mod2") return on_function(check_mod2, 10);
  if (suite == "fibering") return on_function(check_fibering, 10);
  if (suite == "cyclic")
    return [](std::mt19937_64& rng, std::size_t i) {
      static constexpr std::array<std::int64_t, 4> primes{3, 5, 7, 11};
      CyclicFunction f;
      f.modulus = primes[i % primes.size()];
      for (std::int64_t x = 0; x < f.modulus; ++x) f.values.push_back(draw(rng, 0, 2) ? random_weight(rng) : Rational(0));
      if (std::all_of(f.values.begin(), f.values.end(), [](const Rational& v) { return v == 0; })) f.values[0] = 1;
      std::string w = "N=" + std::to_string(f.modulus) + " [";
      for (const auto& v : f.values) w += v.get_str() + " ";
      return with_witness(check_u3_le_l2_cyclic(f), w + "]");
    };
  if (suite == "gcs")
    return [](std::mt19937_64& rng, std::size_t i) {
      std::array<MassFunction, 8> fs;
      std::string w;
      // small boxes keep the inner product nonzero often enough to matter
      const long box = i % 2 ? 2 : sample_box(i / 2);
      const std::size_t dim = 1 + (i / 2) % 2;
      for (auto& f : fs) {
        f = random_mass_function(rng, dim, 5, box);
        w += describe(f) + " ";
      }
      return with_witness(check_gcs(fs), w);
    };
  if (suite == "key_lemma")
    return [](std::mt19937_64& rng, std::size_t i) {
      const auto m = random_matrix(rng, 12, i % 4 != 0);
      return check_key_lemma(m);
    };
  if (suite == "renyi")
    return [](std::mt19937_64& rng, std::size_t i) { return renyi_checks(normalized(random_matrix(rng, 8, i % 2 == 0))); };
  throw Error("unknown suite '" + suite + "'");
}

inline SweepReport verify_suite(const std::string& suite, std::size_t samples, std::uint64_t seed) {
  // each suite draws from its own stream
  std::uint64_t salt = 0;
  for (char c : suite) salt = salt * 131 + static_cast<unsigned char>(c);
  return run_sweep(suite, samples, splitmix64(seed ^ salt), suite_check(suite));
}

}  // namespace addcomb
