#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "addcomb/generators.hpp"
#include "addcomb/increment.hpp"
#include "oracles.hpp"

namespace addcomb {
namespace {

EtaProfile profile(std::size_t dim, std::initializer_list<std::pair<const char*, long>> masses) {
  EtaProfile p;
  p.dim = dim;
  for (auto [bits, m] : masses) {
    p.mass_sq[ParityClass::from_bits(bits)] = m;
    p.total += m;
  }
  return p;
}

// brute force on small sets; the library kernel (checked against it elsewhere) beyond that
Rational pow8_of(const PointSet& s) {
  const auto f = MassFunction::indicator(s);
  const Rational u3 = s.size() <= 24 ? oracle::u3_energy(f) : u3_energy(f);
  return u3 / pow(Rational(static_cast<long>(s.size())), 4);
}

TEST(CaseParams, Validation) {
  CaseParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.case_b_eps(), 0.002);
  p.tau = 0.2;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.eps = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.delta = 1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.max_iters = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.eps = 0.05;
  EXPECT_DOUBLE_EQ(p.case_b_eps(), 0.01);
}

TEST(CaseA, Examples) {
  const auto s = case_a_split(profile(1, {{"0", 100}, {"1", 1}}), 0.5, 1.2);
  EXPECT_NEAR(s.w, std::pow(2.0, -8) * 0.0625 / std::pow(1.2, 4), 1e-18);
  EXPECT_NEAR(s.w, 1.18e-4, 1e-6);
  EXPECT_FALSE(s.increment);
  EXPECT_EQ(s.big.size(), 2u);
  EXPECT_EQ(s.t, 1);

  const auto single = case_a_split(profile(3, {{"101", 1}}), 0.3, 1.0);
  EXPECT_FALSE(single.increment);
  EXPECT_EQ(single.t, 1);
  EXPECT_EQ(single.small_fraction(), 0);

  EXPECT_THROW(case_a_split(profile(1, {{"0", 1}}), 1.0, 1.0), Error);
  EXPECT_THROW(case_a_split(profile(1, {{"0", 1}}), 0.5, 0.5), Error);
}

TEST(CaseA, ThresholdIsExact) {
  // mass fraction 1/100 sits exactly on W^2 for W = 0.1 only if W^2 is exactly 1/100;
  // the double 0.1 is slightly larger, so the class is small.
  const auto eta = profile(1, {{"0", 99}, {"1", 1}});
  EXPECT_EQ(discard_small_classes(eta, 0.1, 0.05).big.size(), 1u);
  EXPECT_EQ(discard_small_classes(eta, 0.0999, 0.05).big.size(), 2u);
  EXPECT_EQ(discard_small_classes(eta, 0.125, 0.5).big.size(), 1u);
  EXPECT_TRUE(discard_small_classes(eta, 0.125, 0.05).increment);
  EXPECT_FALSE(discard_small_classes(eta, 0.125, 0.1).increment);  // 1 - t = R^2 is not "greater"
}

// One heavy point plus a thousand light points in distinct classes of F_2^10.
TEST(CaseA, PlantedIncrement) {
  std::mt19937_64 rng(2024);
  std::vector<std::pair<LatticePoint, Rational>> entries;
  entries.emplace_back(LatticePoint::zero(10), Rational(315));  // 315^2 = 99225
  for (long c = 1; c <= 1000; ++c) {
    std::vector<BigInt> x;
    for (std::size_t i = 0; i < 10; ++i) x.emplace_back(((c >> i) & 1) + 2 * static_cast<long>(rng() % 1000000));
    entries.emplace_back(LatticePoint(std::move(x)), Rational(1));
  }
  const MassFunction f(10, entries);
  const auto eta = eta_profile(f);
  ASSERT_EQ(eta.size(), 1001u);

  // With W = 2^-8 R^4 K^-4 and R^2 < 1 - t = 0.01 every class is big.
  const double k = root_of(1 / normalized_energy_pow8(f), 8);
  EXPECT_FALSE(case_a_split(eta, 0.09, k).increment);

  const double w = 0.01, r = 0.05;
  const auto s = discard_small_classes(eta, w, r);
  ASSERT_TRUE(s.increment);
  ASSERT_EQ(s.big.size(), 1u);
  EXPECT_EQ(s.t, Rational(3969, 4009));

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (parity_of(f.point(i)) == s.big[0]) keep.push_back(i);
  const auto fs = f.restrict_to(keep);
  const Rational ratio8 = normalized_energy_pow8(fs) / normalized_energy_pow8(f);
  EXPECT_GE(ratio8 * s.t * s.t, 1);  // ratio >= t^(-1/4)
  const double t = s.t.get_d();
  const double lemma = std::pow(t, -0.5) * (1 - std::pow(w, 0.25) * k * std::sqrt(1 - t));
  EXPECT_GE(root_of(ratio8, 8), lemma);
}

TEST(CaseB, TwoSingletonFibers) {
  const auto a = PointSet::of({0, 1});
  const auto c = case_b_fiber(a, eta_profile(a), fiber_gamma(a), 0.002);
  EXPECT_EQ(c.omega, ParityClass::from_bits("0"));
  EXPECT_EQ(c.fiber, PointSet::of({0}));
  EXPECT_EQ(c.ratio_pow8, 2);  // ratio 2^(1/8)
  EXPECT_EQ(c.density, 2);
  EXPECT_TRUE(c.certified());
}

TEST(CaseB, PicksTheDenserFiberByEnergy) {
  const auto a = PointSet::of({0, 2, 4, 5});
  const auto c = case_b_fiber(a, eta_profile(a), fiber_gamma(a), 0.002);
  EXPECT_EQ(pow8_of(PointSet::of({0, 2, 4})), Rational(11, 27));
  EXPECT_EQ(pow8_of(PointSet::of({5})), 1);
  EXPECT_EQ(c.fiber, PointSet::of({5}));
  EXPECT_EQ(c.ratio_pow8, 1 / pow8_of(a));
  EXPECT_TRUE(c.certified());
}

TEST(CaseB, SingleFiberIsNotProper) {
  const auto a = PointSet::of({0, 2, 4});
  const auto c = case_b_fiber(a, eta_profile(a), fiber_gamma(a), 0.002);
  EXPECT_EQ(c.fiber, a);
  EXPECT_FALSE(c.proper);
  EXPECT_FALSE(c.certified());
}

PointSet planted_coset() {
  std::vector<BigInt> v;
  for (long k = 0; k < 99; ++k) v.emplace_back(2 * k);
  v.emplace_back(1);
  return PointSet::of_integers(v);
}

TEST(CaseC, Examples) {
  const PointSet square(2, {LatticePoint{0, 0}, LatticePoint{2, 0}, LatticePoint{0, 2}, LatticePoint{1, 1}});
  const auto eta = eta_profile(square);
  EXPECT_EQ(eta.mass(ParityClass::from_bits("00")), 3);
  EXPECT_EQ(eta.mass(ParityClass::from_bits("11")), 1);
  EXPECT_EQ(make_split(eta, ParityClass::from_bits("10")).alpha1_sq, Rational(1, 4));
  EXPECT_FALSE(case_c_coset(square, eta, 0.1));

  const PointSet cube(2, {LatticePoint{0, 0}, LatticePoint{1, 0}, LatticePoint{0, 1}, LatticePoint{1, 1}});
  EXPECT_FALSE(case_c_coset(cube, eta_profile(cube), 0.1));
}

TEST(CaseC, PlantedStrayPoint) {
  const auto a = planted_coset();
  const auto c = case_c_coset(a, eta_profile(a), 0.1);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->side, c->split.heavy);
  EXPECT_EQ(c->kept.size(), 99u);
  EXPECT_FALSE(c->kept.contains(LatticePoint{1}));
  EXPECT_EQ(c->density, Rational(100, 99));
  EXPECT_TRUE(c->certified);
  EXPECT_EQ(c->ratio_pow8, pow8_of(c->kept) / pow8_of(a));
  EXPECT_GE(c->ratio_pow8, Rational(100, 99));
}

TEST(Dispatch, CosetCaseOnItsModel) {
  const auto a = planted_coset();
  const auto model = universal_model(a);
  ASSERT_EQ(model.dimension, 1u);
  const auto s = dispatch_step(a, model, CaseParams{});
  EXPECT_GT(s.eta_energy, 0.99);
  EXPECT_NEAR(s.eta_energy, std::pow((std::pow(99.0, 4) + 14 * 99.0 * 99.0 + 1) / 1e8, 0.125), 1e-12);
  EXPECT_EQ(s.case_taken, StepCase::C);
  EXPECT_EQ(s.size_after, 99u);
  EXPECT_FALSE(s.subset.contains(LatticePoint{1}));
  EXPECT_GE(s.pow8_after, s.pow8_before * s.density_ratio);
}

TEST(Dispatch, SmallTwoDimensionalModel) {
  const auto a = PointSet::of({0, 2, 4, 5});
  const auto s = dispatch_step(a, universal_model(a), CaseParams{});
  EXPECT_NE(s.case_taken, StepCase::Terminate);
  EXPECT_GT(s.pow8_after, s.pow8_before);
  EXPECT_LT(s.size_after, 4u);
  EXPECT_TRUE(s.subset.is_subset_of(a));
}

TEST(IncrementStep, ApTerminates) {
  const auto s = increment_step(ap(10), CaseParams{});
  EXPECT_EQ(s.case_taken, StepCase::Terminate);
  EXPECT_EQ(s.dim, 1u);
  EXPECT_EQ(s.subset, ap(10));
  EXPECT_THROW(increment_step(PointSet::of({5}), CaseParams{}), Error);
}

TEST(RunIncrement, SmallInputsStop) {
  const auto t = run_increment(ap(10));
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].case_taken, StepCase::Terminate);
  EXPECT_EQ(t.increments(), 0u);
  EXPECT_EQ(t.final_set, ap(10));
  EXPECT_EQ(t.final_dim, 1u);

  const auto u = run_increment(union_example(3, 2));
  EXPECT_EQ(u.final_set, union_example(3, 2));
  EXPECT_EQ(u.final_dim, 2u);
  EXPECT_EQ(u.increments(), 0u);

  const auto one = run_increment(PointSet::of({5}));
  EXPECT_TRUE(one.steps.empty());
  EXPECT_EQ(one.final_set, PointSet::of({5}));
  EXPECT_EQ(one.final_dim, 0u);
  EXPECT_THROW(run_increment(PointSet(1)), Error);
  for (const auto* t2 : {&t, &u, &one}) EXPECT_TRUE(check_trace(*t2).empty());
}

TEST(RunIncrement, Sidon64) {
  const auto a = sidon(64);
  const auto t = run_increment(a);
  ASSERT_GE(t.increments(), 1u);
  const auto& first = t.steps[0];
  EXPECT_EQ(first.dim, 63u);
  EXPECT_EQ(first.dim, oracle::freiman_dimension(a));
  EXPECT_EQ(first.pow8_before, pow8_of(a));
  EXPECT_NEAR(first.k_before, 2.47, 0.01);
  EXPECT_LT(first.bound, 63.0);
  EXPECT_LT(first.eta_energy, 0.99);
  // all fibers of the model are single points, so the fiber case lands on one of them
  EXPECT_EQ(first.case_taken, StepCase::B);
  EXPECT_EQ(first.size_after, 1u);
  EXPECT_EQ(first.pow8_after, 1);
  EXPECT_TRUE(check_trace(t).empty());
  EXPECT_EQ(t.density_total, 64);
  EXPECT_LE(static_cast<double>(oracle::freiman_dimension(t.final_set)), t.bound_used);
}

TEST(RunIncrement, RandomWideSetsKeepInvariants) {
  std::mt19937_64 rng(31);
  std::size_t stepped = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 50 + 4 * static_cast<std::size_t>(trial);
    std::vector<LatticePoint> pts;
    const std::size_t dim = 1 + trial % 2;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<BigInt> c;
      for (std::size_t k = 0; k < dim; ++k) c.emplace_back(static_cast<long>(rng() % 1000000000));
      pts.emplace_back(std::move(c));
    }
    // a short progression inside makes some fibers larger than a point
    for (long k = 0; k < 6; ++k) pts.push_back(LatticePoint(std::vector<BigInt>(dim, BigInt(7 * k - 5000))));
    const PointSet a(dim, pts);
    const auto t = run_increment(a);
    const auto bad = check_trace(t);
    EXPECT_TRUE(bad.empty()) << trial << ": " << (bad.empty() ? "" : bad[0]);
    EXPECT_LE(static_cast<double>(oracle::freiman_dimension(t.final_set)), t.bound_used + 1e-9);
    stepped += t.increments() > 0;
  }
  EXPECT_GE(stepped, 3u);
}

TEST(CheckTrace, DetectsTampering) {
  auto t = run_increment(sidon(64));
  ASSERT_TRUE(check_trace(t).empty());
  auto bad = t;
  bad.steps[0].density_ratio = 2;
  EXPECT_FALSE(check_trace(bad).empty());
  bad = t;
  bad.steps[0].subset = sidon(64);
  EXPECT_FALSE(check_trace(bad).empty());
  bad = t;
  bad.steps[0].case_taken = StepCase::A;  // a 64-fold density loss needs ratio >= 64^(1/4)
  EXPECT_FALSE(check_trace(bad).empty());
  bad = t;
  bad.final_set = sidon(3);
  EXPECT_FALSE(check_trace(bad).empty());
}

}  // namespace
}  // namespace addcomb
