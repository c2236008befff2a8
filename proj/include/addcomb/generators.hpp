#pragma once

// Deterministic set generators: progressions, Sidon sets, the union-of-blocks
// example and seeded random sets, plus a fixed corpus mixing all of them.

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/random.hpp"

namespace addcomb {

/// {start, start + step, ..., start + (n - 1) step}.
inline PointSet ap(std::size_t n, const BigInt& start = 0, const BigInt& step = 1) {
  if (n == 0) throw Error("ap: length must be positive");
  if (step == 0 && n > 1) throw Error("ap: step must be nonzero");
  std::vector<BigInt> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(start + step * static_cast<unsigned long>(k));
  return PointSet::of_integers(v);
}

/// {start + sum n_i steps_i : 0 <= n_i < lengths_i} in Z.
inline PointSet gap(const std::vector<std::size_t>& lengths, const std::vector<BigInt>& steps, const BigInt& start = 0) {
  if (lengths.empty() || lengths.size() != steps.size()) throw Error("gap: need one step per length");
  std::vector<BigInt> v{start};
  for (std::size_t r = 0; r < lengths.size(); ++r) {
    if (lengths[r] == 0) throw Error("gap: lengths must be positive");
    std::vector<BigInt> next;
    for (const auto& x : v)
      for (std::size_t k = 0; k < lengths[r]; ++k) next.push_back(x + steps[r] * static_cast<unsigned long>(k));
    v = std::move(next);
  }
  return PointSet::of_integers(v);
}

/// Greedy B_2 sequence from 0: each next element is the least integer keeping all pairwise sums distinct.
inline PointSet sidon(std::size_t m) {
  if (m == 0) throw Error("sidon: size must be positive");
  std::vector<long> out;
  std::unordered_set<long> sums;
  for (long c = 0; out.size() < m; ++c) {
    bool ok = !sums.count(2 * c);
    for (std::size_t i = 0; i < out.size() && ok; ++i) ok = !sums.count(out[i] + c);
    if (!ok) continue;
    for (long x : out) sums.insert(x + c);
    sums.insert(2 * c);
    out.push_back(c);
  }
  std::vector<BigInt> v(out.begin(), out.end());
  return PointSet::of_integers(v);
}

/// {a + 100^b N : 1 <= a <= N, 1 <= b <= k}.
inline PointSet union_example(std::size_t n, std::size_t k) {
  if (n == 0 || k == 0) throw Error("union_example: N and k must be positive");
  std::vector<BigInt> v;
  for (std::size_t b = 1; b <= k; ++b) {
    const BigInt block = pow(BigInt(100), b) * static_cast<unsigned long>(n);
    for (std::size_t a = 1; a <= n; ++a) v.push_back(block + static_cast<unsigned long>(a));
  }
  return PointSet::of_integers(v);
}

/// `count` draws uniform in [-box, box]^dim (duplicates collapse).
inline PointSet random_box(std::size_t count, long box, std::size_t dim, std::uint64_t seed) {
  if (dim == 0 || box < 0) throw Error("random_box: bad parameters");
  std::mt19937_64 rng(sample_seed(seed, 0));
  std::vector<LatticePoint> pts;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<BigInt> c;
    for (std::size_t k = 0; k < dim; ++k) c.emplace_back(draw(rng, -box, box));
    pts.emplace_back(std::move(c));
  }
  return PointSet(dim, std::move(pts));
}

/// Each element of `base` kept independently with probability keep_num / keep_den.
inline PointSet random_subset(const PointSet& base, long keep_num, long keep_den, std::uint64_t seed) {
  std::mt19937_64 rng(sample_seed(seed, 1));
  std::vector<LatticePoint> pts;
  for (const auto& p : base)
    if (draw(rng, 1, keep_den) <= keep_num) pts.push_back(p);
  if (pts.empty()) pts.push_back(base[0]);
  return PointSet(base.dim(), std::move(pts));
}

struct NamedSet {
  std::string name;
  PointSet set;
};

/// A fixed mix of structured and random sets (well over 200 of them).
inline std::vector<NamedSet> corpus(std::uint64_t seed = 0) {
  std::vector<NamedSet> out;
  auto add = [&](std::string name, PointSet s) { out.push_back({std::move(name), std::move(s)}); };
  for (std::size_t n = 1; n <= 40; ++n) add("ap:" + std::to_string(n), ap(n, 0, 1));
  for (long step = 2; step <= 12; ++step) add("ap_step:" + std::to_string(step), ap(15, -7, step));
  for (std::size_t a = 2; a <= 6; ++a)
    for (std::size_t b = 2; b <= 6; ++b) add("gap2:" + std::to_string(a) + "x" + std::to_string(b), gap({a, b}, {1, 100}));
  for (std::size_t a = 2; a <= 4; ++a)
    for (std::size_t c = 2; c <= 3; ++c) add("gap3:" + std::to_string(a) + "x3x" + std::to_string(c), gap({a, 3, c}, {1, 37, 1000}));
  for (std::size_t m = 1; m <= 24; ++m) add("sidon:" + std::to_string(m), sidon(m));
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t k = 1; k <= 4; ++k) add("union:" + std::to_string(n) + "," + std::to_string(k), union_example(n, k));
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto s = sample_seed(seed, i);
    add("dense_subset:" + std::to_string(i), random_subset(ap(30 + i % 20), 3, 4, s));
  }
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto s = sample_seed(seed, 1000 + i);
    add("box2:" + std::to_string(i), random_box(5 + i % 20, 2 + static_cast<long>(i % 4), 2, s));
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto s = sample_seed(seed, 2000 + i);
    add("box1:" + std::to_string(i), random_box(4 + i % 16, 50, 1, s));
  }
  return out;
}

}  // namespace addcomb
