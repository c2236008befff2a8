#pragma once

// The energy-increment loop. Each step passes from A_n to the universal model
// A', reads off the mod-2 profile eta and the fiber norms gamma, and picks a
// proper subset A_{n+1} with larger normalized U^3 energy, until the Freiman
// dimension is at most 8 log2 K_n + 32 (K_n = 1 / E(A_n)).
//
// Every guarantee is recomputed on the chosen subset with exact eighth powers.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "addcomb/core.hpp"
#include "addcomb/energy.hpp"
#include "addcomb/freiman.hpp"
#include "addcomb/mod2.hpp"
#include "addcomb/parallel.hpp"

namespace addcomb {

struct CaseParams {
  double eps = 0.002;
  double delta = 0.01;
  double tau = 0.1;
  std::size_t max_iters = 1000;

  void validate() const {
    if (!(eps > 0 && eps < 1)) throw Error("CaseParams: eps must lie in (0, 1)");
    if (!(delta > 0 && delta < 1)) throw Error("CaseParams: delta must lie in (0, 1)");
    if (!(tau > 0 && tau <= 0.1)) throw Error("CaseParams: tau must lie in (0, 0.1]");
    if (max_iters == 0) throw Error("CaseParams: max_iters must be positive");
  }
  /// The epsilon handed to the fiber case.
  double case_b_eps() const { return std::min(eps, delta); }
};

enum class StepCase { Terminate, A, B, C, Fallback };

inline const char* to_string(StepCase c) {
  switch (c) {
    case StepCase::Terminate: return "TERMINATE";
    case StepCase::A: return "A";
    case StepCase::B: return "B";
    case StepCase::C: return "C";
    case StepCase::Fallback: return "FALLBACK";
  }
  return "?";
}

enum class SelectorKind { Whole, Threshold, Fiber, HyperplaneSide };

/// Which classes of F_2^d were kept.
struct Selector {
  SelectorKind kind = SelectorKind::Whole;
  ParityClass cls;          // the fiber, or the hyperplane normal
  int side = 0;             // hyperplane side kept
  std::size_t classes = 0;  // number of classes kept

  std::string describe() const {
    switch (kind) {
      case SelectorKind::Whole: return "whole";
      case SelectorKind::Threshold: return "threshold:" + std::to_string(classes);
      case SelectorKind::Fiber: return "fiber:" + cls.to_string();
      case SelectorKind::HyperplaneSide: return "hyperplane:" + cls.to_string() + ":" + std::to_string(side);
    }
    return "?";
  }

  friend bool operator<(const Selector& a, const Selector& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.side < b.side;
  }
};

struct StepOutcome {
  StepCase case_taken = StepCase::Terminate;
  PointSet subset;
  Selector selector;
  std::size_t size_before = 0;
  std::size_t size_after = 0;
  std::size_t dim = 0;
  Rational pow8_before;  // E(A_n)^8
  Rational pow8_after;   // E(A_{n+1})^8
  double k_before = 1;
  double k_after = 1;
  Rational density_ratio = 1;  // |A_n| / |A_{n+1}|
  double eta_energy = 0;       // E(eta); 0 on TERMINATE
  double bound = 32;           // 8 log2 K_n + 32
};

struct IncrementTrace {
  CaseParams params;
  PointSet initial;
  std::vector<StepOutcome> steps;
  PointSet final_set;
  std::size_t final_dim = 0;
  Rational final_pow8 = 1;
  double final_k = 1;
  double bound_used = 32;
  Rational density_total = 1;  // |A_0| / |X|

  std::size_t increments() const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [](const StepOutcome& s) { return s.case_taken != StepCase::Terminate; }));
  }
};

class IncrementFailure : public Error {
 public:
  explicit IncrementFailure(const std::string& what) : Error(what) {}
  IncrementFailure(const std::string& what, IncrementTrace trace) : Error(what), trace_(std::move(trace)) {}
  const IncrementTrace& trace() const { return trace_; }

 private:
  IncrementTrace trace_;
};

// ---------------------------------------------------------------------------
// Case A: discarding classes where eta is small.

struct CaseASplit {
  double r = 0;
  double w = 0;
  std::vector<ParityClass> big;  // S, in canonical order
  Rational t;                    // ||eta_bg||_2^2 / ||eta||_2^2
  bool increment = false;        // ||eta_sml||_2 > R ||eta||_2

  Rational small_fraction() const { return 1 - t; }
};

/// S = {w : eta(w) / ||eta||_2 >= W}, compared as eta(w)^2 / ||eta||_2^2 >= W^2.
inline CaseASplit discard_small_classes(const EtaProfile& eta, double w, double r) {
  if (eta.mass_sq.empty()) throw Error("discard_small_classes: zero profile");
  if (!(r > 0 && r < 1)) throw Error("discard_small_classes: R must lie in (0, 1)");
  if (!(w >= 0)) throw Error("discard_small_classes: W must be nonnegative");
  CaseASplit out;
  out.r = r;
  out.w = w;
  const Rational w_sq = pow(exact_rational(w), 2);
  Rational kept = 0;
  for (const auto& [cls, m] : eta.mass_sq)
    if (m >= w_sq * eta.total) {
      out.big.push_back(cls);
      kept += m;
    }
  out.t = kept / eta.total;
  out.increment = 1 - out.t > pow(exact_rational(r), 2);
  if (out.increment && out.big.empty()) throw Error("discard_small_classes: every class is small");
  return out;
}

/// The dichotomy with W = 2^-8 R^4 K^-4.
inline CaseASplit case_a_split(const EtaProfile& eta, double r, double k) {
  if (!(k >= 1 - 1e-12)) throw Error("case_a_split: K must be at least 1");
  return discard_small_classes(eta, std::ldexp(std::pow(r / k, 4), -8), r);
}

namespace detail {

using IndexSet = std::vector<std::size_t>;

inline std::map<ParityClass, IndexSet> class_members(std::span<const LatticePoint> pts) {
  std::map<ParityClass, IndexSet> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out[parity_of(pts[i])].push_back(i);
  return out;
}

inline EtaProfile profile_of(const std::map<ParityClass, IndexSet>& members, std::size_t dim) {
  EtaProfile p;
  p.dim = dim;
  for (const auto& [cls, idx] : members) {
    p.mass_sq.emplace(cls, Rational(static_cast<long>(idx.size())));
    p.total += static_cast<long>(idx.size());
  }
  return p;
}

inline Rational set_pow8(const PointSet& s) { return normalized_energy_pow8(MassFunction::indicator(s)); }

inline double k_of(const Rational& pow8) { return root_of(1 / pow8, 8); }

/// 8 log2 K + 32.
inline double dimension_bound(const Rational& pow8) { return log2_of(1 / pow8) + 32; }

/// dim <= 8 log2 K + 32, i.e. E^8 * 2^(dim - 32) <= 1.
inline bool within_bound(std::size_t dim, const Rational& pow8) {
  if (dim <= 32) return true;
  return pow8 * pow(Rational(2), static_cast<unsigned long>(dim - 32)) <= 1;
}

inline IndexSet union_of(const std::map<ParityClass, IndexSet>& members, const std::vector<ParityClass>& classes) {
  IndexSet out;
  for (const auto& c : classes) {
    auto it = members.find(c);
    if (it != members.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline IndexSet side_members(const std::map<ParityClass, IndexSet>& members, const ParityClass& normal, int side) {
  std::vector<ParityClass> classes;
  for (const auto& kv : members)
    if (static_cast<int>(dot(normal, kv.first)) == side) classes.push_back(kv.first);
  return union_of(members, classes);
}

inline Rational size_ratio(std::size_t a, std::size_t b) {
  Rational r(static_cast<long>(a), static_cast<long>(b));
  r.canonicalize();
  return r;
}

/// The fiber of S with the largest gamma / eta (for indicators, the largest fiber
/// energy); ties go to the larger fiber, then to the smaller class.
template <class Pow8>
ParityClass best_fiber(const std::map<ParityClass, IndexSet>& members, const std::vector<ParityClass>& s, Pow8&& pow8) {
  std::optional<ParityClass> best;
  Rational best_val;
  std::size_t best_size = 0;
  for (const auto& c : s) {
    const auto& idx = members.at(c);
    const Rational v = pow8(c, idx);
    if (!best || v > best_val || (v == best_val && idx.size() > best_size)) {
      best = c;
      best_val = v;
      best_size = idx.size();
    }
  }
  if (!best) throw Error("case_b_fiber: no class to choose from");
  return *best;
}

inline bool case_a_holds(const Rational& before, const Rational& after, const Rational& density) {
  return after >= before * density * density;
}

inline bool case_b_ratio_holds(const Rational& before, const Rational& after, double eps) {
  return after >= before * pow(1 + exact_rational(eps) / 2, 8);
}

/// |A'| / |A'_w| <= 2^24 K^16 eps^-8 with K^16 = E^-16.
inline bool case_b_density_holds(const Rational& before, const Rational& density, double eps) {
  return density * pow(exact_rational(eps), 8) * before * before <= pow(Rational(2), 24);
}

inline bool case_c_holds(const Rational& before, const Rational& after, const Rational& density) {
  return after >= before * density;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Case B: the best fiber.

struct FiberChoice {
  ParityClass omega;
  PointSet fiber;
  Rational ratio_pow8;  // (E(A'_w) / E(A'))^8
  Rational density;     // |A'| / |A'_w|
  bool ratio_ok = false;
  bool density_ok = false;
  bool proper = false;

  bool certified() const { return ratio_ok && density_ok && proper; }
};

/// Chooses w in S (the big classes for R = eps / 2K) maximizing gamma / eta and
/// checks both guarantees against recomputed energies.
inline FiberChoice case_b_fiber(const PointSet& a_prime, const EtaProfile& eta, const FiberGamma& gamma, double eps) {
  if (!(eps > 0 && eps < 1)) throw Error("case_b_fiber: eps must lie in (0, 1)");
  const Rational before = detail::set_pow8(a_prime);
  const double k = detail::k_of(before);
  const auto split = case_a_split(eta, eps / (2 * k), k);
  const auto members = detail::class_members(a_prime.points());
  auto pow8 = [&](const ParityClass& c, const detail::IndexSet& idx) -> Rational {
    return gamma.eighth.at(c) / pow(Rational(static_cast<long>(idx.size())), 4);
  };
  FiberChoice out;
  out.omega = detail::best_fiber(members, split.big, pow8);
  const auto& idx = members.at(out.omega);
  out.fiber = a_prime.subset(idx);
  out.ratio_pow8 = detail::set_pow8(out.fiber) / before;
  out.density = detail::size_ratio(a_prime.size(), idx.size());
  out.ratio_ok = detail::case_b_ratio_holds(before, before * out.ratio_pow8, eps);
  out.density_ok = detail::case_b_density_holds(before, out.density, eps);
  out.proper = idx.size() < a_prime.size();
  return out;
}

// ---------------------------------------------------------------------------
// Case C: a hyperplane carrying almost all the mass.

struct CosetChoice {
  HyperplaneSplit split;
  int side = 0;
  PointSet kept;
  Rational ratio_pow8;
  Rational density;
  bool certified = false;  // ratio^8 >= density
};

/// Searches for a split with min(alpha0, alpha1) <= tau and keeps the heavy side,
/// or the light side when only that one meets ratio >= density^(1/8).
inline std::optional<CosetChoice> case_c_coset(const PointSet& a_prime, const EtaProfile& eta, double tau) {
  auto split = hyperplane_imbalance_search(eta, tau);
  if (!split) return std::nullopt;
  const Rational before = detail::set_pow8(a_prime);
  const auto members = detail::class_members(a_prime.points());
  std::optional<CosetChoice> first;
  for (int side : {split->heavy, 1 - split->heavy}) {
    const auto idx = detail::side_members(members, split->normal, side);
    if (idx.empty() || idx.size() == a_prime.size()) continue;
    CosetChoice c;
    c.split = *split;
    c.side = side;
    c.kept = a_prime.subset(idx);
    c.ratio_pow8 = detail::set_pow8(c.kept) / before;
    c.density = detail::size_ratio(a_prime.size(), idx.size());
    c.certified = c.ratio_pow8 >= c.density;
    if (c.certified) return c;
    if (!first) first = c;
  }
  if (first) return first;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// One step of the loop.

/// Case dispatch on a given model of A (images aligned with A's canonical order),
/// without the dimension test.
inline StepOutcome dispatch_step(const PointSet& a, const UniversalModel& model, const CaseParams& params) {
  params.validate();
  if (a.size() < 2) throw Error("dispatch_step: need at least two points");
  if (model.images.size() != a.size()) throw Error("dispatch_step: model does not match the set");
  using detail::IndexSet;
  const std::size_t n = a.size();
  const auto members = detail::class_members(model.images);
  const EtaProfile eta = detail::profile_of(members, model.dimension);

  StepOutcome out;
  out.size_before = n;
  out.dim = model.dimension;
  out.pow8_before = detail::set_pow8(a);
  out.k_before = detail::k_of(out.pow8_before);
  out.bound = detail::dimension_bound(out.pow8_before);
  out.eta_energy = normalized_energy(eta);
  const Rational& before = out.pow8_before;

  std::map<ParityClass, Rational> fiber_pow8;
  auto fiber_energy = [&](const ParityClass& c, const IndexSet& idx) -> Rational {
    auto it = fiber_pow8.find(c);
    if (it != fiber_pow8.end()) return it->second;
    return fiber_pow8[c] = detail::set_pow8(a.subset(idx));
  };
  auto finish = [&](StepCase c, Selector sel, const IndexSet& idx, Rational after) {
    out.case_taken = c;
    out.selector = std::move(sel);
    out.subset = a.subset(idx);
    out.size_after = idx.size();
    out.pow8_after = std::move(after);
    out.k_after = detail::k_of(out.pow8_after);
    out.density_ratio = detail::size_ratio(n, idx.size());
    return out;
  };
  auto proper = [&](const IndexSet& idx) { return !idx.empty() && idx.size() < n; };

  const double eps_b = params.case_b_eps();
  const auto a_split = case_a_split(eta, eps_b / (2 * out.k_before), out.k_before);
  std::optional<HyperplaneSplit> split;
  bool searched = false;

  if (out.eta_energy <= 1 - params.delta) {
    if (a_split.increment) {
      const IndexSet idx = detail::union_of(members, a_split.big);
      if (proper(idx)) {
        Rational after = detail::set_pow8(a.subset(idx));
        if (detail::case_a_holds(before, after, detail::size_ratio(n, idx.size())))
          return finish(StepCase::A, {SelectorKind::Threshold, ParityClass(model.dimension), 0, a_split.big.size()}, idx,
                        std::move(after));
      }
    } else {
      const ParityClass w = detail::best_fiber(members, a_split.big, fiber_energy);
      const IndexSet& idx = members.at(w);
      if (proper(idx)) {
        const Rational after = fiber_energy(w, idx);
        const Rational density = detail::size_ratio(n, idx.size());
        if (detail::case_b_ratio_holds(before, after, eps_b) && detail::case_b_density_holds(before, density, eps_b))
          return finish(StepCase::B, {SelectorKind::Fiber, w, 0, 1}, idx, after);
      }
    }
  } else {
    split = hyperplane_imbalance_search(eta, params.tau);
    searched = true;
    if (split)
      for (int side : {split->heavy, 1 - split->heavy}) {
        const IndexSet idx = detail::side_members(members, split->normal, side);
        if (!proper(idx)) continue;
        Rational after = detail::set_pow8(a.subset(idx));
        if (detail::case_c_holds(before, after, detail::size_ratio(n, idx.size()))) {
          const std::size_t classes = std::count_if(members.begin(), members.end(), [&](const auto& kv) {
            return static_cast<int>(dot(split->normal, kv.first)) == side;
          });
          return finish(StepCase::C, {SelectorKind::HyperplaneSide, split->normal, side, classes}, idx, std::move(after));
        }
      }
  }

  // Fallback: every fiber, both hyperplane sides, the threshold set.
  if (!searched) split = hyperplane_imbalance_search(eta, params.tau);
  struct Candidate {
    Selector sel;
    IndexSet idx;
    Rational pow8;
  };
  std::vector<Candidate> cands;
  {
    const IndexSet idx = detail::union_of(members, a_split.big);
    if (proper(idx)) cands.push_back({{SelectorKind::Threshold, ParityClass(model.dimension), 0, a_split.big.size()}, idx, 0});
  }
  for (const auto& [cls, idx] : members)
    if (proper(idx)) cands.push_back({{SelectorKind::Fiber, cls, 0, 1}, idx, 0});
  if (split)
    for (int side : {0, 1}) {
      const IndexSet idx = detail::side_members(members, split->normal, side);
      if (proper(idx)) cands.push_back({{SelectorKind::HyperplaneSide, split->normal, side, 0}, idx, 0});
    }
  for (auto& c : cands)
    if (c.sel.kind == SelectorKind::Fiber && fiber_pow8.count(c.sel.cls)) c.pow8 = fiber_pow8.at(c.sel.cls);
  parallel_chunks(cands.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      if (cands[i].pow8 == 0) cands[i].pow8 = detail::set_pow8(a.subset(cands[i].idx));
  });

  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (c.pow8 <= before) continue;
    if (!best || c.pow8 > best->pow8 || (c.pow8 == best->pow8 && c.idx.size() > best->idx.size()) ||
        (c.pow8 == best->pow8 && c.idx.size() == best->idx.size() && c.sel < best->sel))
      best = &c;
  }
  if (!best) {
    std::string msg = "increment step: no candidate increases the energy (|A| = " + std::to_string(n) +
                      ", d = " + std::to_string(model.dimension) + ", E(eta) = " + std::to_string(out.eta_energy) +
                      ", K = " + std::to_string(out.k_before) + ", candidates = " + std::to_string(cands.size()) + ")";
    throw IncrementFailure(msg);
  }
  return finish(StepCase::Fallback, best->sel, best->idx, best->pow8);
}

/// Terminates when dim(A_n) <= 8 log2 K_n + 32, otherwise dispatches on the universal model.
inline StepOutcome increment_step(const PointSet& a, const CaseParams& params) {
  params.validate();
  if (a.size() < 2) throw Error("increment_step: need at least two points");
  const auto model = universal_model(a);
  const Rational pow8 = detail::set_pow8(a);
  if (detail::within_bound(model.dimension, pow8)) {
    StepOutcome out;
    out.case_taken = StepCase::Terminate;
    out.subset = a;
    out.size_before = out.size_after = a.size();
    out.dim = model.dimension;
    out.pow8_before = out.pow8_after = pow8;
    out.k_before = out.k_after = detail::k_of(pow8);
    out.bound = detail::dimension_bound(pow8);
    return out;
  }
  // d > 8 log2 K + 32 is K < 2^(d/8 - 4), the hypothesis of the coset case.
  if (!(pow8 * pow(Rational(2), static_cast<unsigned long>(model.dimension - 32)) > 1))
    throw Error("increment_step: loop condition inconsistent");
  return dispatch_step(a, model, params);
}

inline IncrementTrace run_increment(const PointSet& a, const CaseParams& params = {}) {
  params.validate();
  if (a.empty()) throw Error("run_increment: empty set");
  IncrementTrace trace;
  trace.params = params;
  trace.initial = a;
  PointSet cur = a;
  for (std::size_t iter = 0; cur.size() > 1; ++iter) {
    if (iter == params.max_iters) throw IncrementFailure("run_increment: max_iters exhausted", trace);
    StepOutcome step;
    try {
      step = increment_step(cur, params);
    } catch (const IncrementFailure& e) {
      throw IncrementFailure(e.what(), trace);
    }
    const bool done = step.case_taken == StepCase::Terminate;
    cur = step.subset;
    trace.steps.push_back(std::move(step));
    if (done) break;
  }
  trace.final_set = cur;
  trace.final_pow8 = detail::set_pow8(cur);
  trace.final_k = detail::k_of(trace.final_pow8);
  trace.bound_used = detail::dimension_bound(trace.final_pow8);
  trace.final_dim = freiman_dimension(cur);
  trace.density_total = detail::size_ratio(a.size(), cur.size());
  if (!detail::within_bound(trace.final_dim, trace.final_pow8))
    throw IncrementFailure("run_increment: final set exceeds the dimension bound", trace);
  return trace;
}

/// Recomputes every per-step invariant of a trace; returns the violations.
inline std::vector<std::string> check_trace(const IncrementTrace& t) {
  std::vector<std::string> bad;
  auto fail = [&](std::size_t i, const std::string& what) { bad.push_back("step " + std::to_string(i) + ": " + what); };
  const double eps_b = t.params.case_b_eps();
  PointSet prev = t.initial;
  Rational telescoped = 1;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    const Rational before = detail::set_pow8(prev);
    if (before != s.pow8_before) fail(i, "recorded energy before does not match");
    if (s.case_taken == StepCase::Terminate) {
      if (i + 1 != t.steps.size()) fail(i, "TERMINATE is not the last step");
      if (!(s.subset == prev)) fail(i, "TERMINATE changed the set");
      if (!detail::within_bound(s.dim, before)) fail(i, "terminated above the dimension bound");
      continue;
    }
    if (s.subset.empty() || s.subset.size() >= prev.size() || !s.subset.is_subset_of(prev))
      fail(i, "subset is not a proper nonempty subset");
    if (s.subset.empty()) break;
    const Rational after = detail::set_pow8(s.subset);
    const Rational density = detail::size_ratio(prev.size(), s.subset.size());
    if (after != s.pow8_after) fail(i, "recorded energy after does not match");
    if (density != s.density_ratio) fail(i, "recorded density ratio does not match");
    if (!(after > before)) fail(i, "energy did not strictly increase");
    if (s.k_after > s.k_before) fail(i, "K increased");
    if (detail::within_bound(s.dim, before)) fail(i, "stepped although within the dimension bound");
    switch (s.case_taken) {
      case StepCase::A:
        if (!detail::case_a_holds(before, after, density)) fail(i, "case A ratio below density^(1/4)");
        break;
      case StepCase::B:
        if (!detail::case_b_ratio_holds(before, after, eps_b)) fail(i, "case B ratio below 1 + eps/2");
        if (!detail::case_b_density_holds(before, density, eps_b)) fail(i, "case B density above 2^24 K^16 eps^-8");
        break;
      case StepCase::C:
        if (!detail::case_c_holds(before, after, density)) fail(i, "case C ratio below density^(1/8)");
        break;
      default: break;
    }
    telescoped *= density;
    prev = s.subset;
  }
  if (!(prev == t.final_set)) bad.push_back("final set does not match the last step");
  if (!t.final_set.empty()) {
    if (telescoped != detail::size_ratio(t.initial.size(), t.final_set.size()))
      bad.push_back("density ratios do not telescope");
    if (telescoped != t.density_total) bad.push_back("recorded total density does not match");
  }
  return bad;
}

}  // namespace addcomb
