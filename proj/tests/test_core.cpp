#include <gtest/gtest.h>

#include <random>

#include "addcomb/core.hpp"
#include "oracles.hpp"

namespace addcomb {
namespace {

PointSet points2(std::initializer_list<std::pair<long, long>> pts) {
  std::vector<LatticePoint> v;
  for (auto [a, b] : pts) v.push_back(LatticePoint{a, b});
  return PointSet(2, std::move(v));
}

TEST(Sumset, Examples) {
  EXPECT_EQ(sumset(PointSet::of({0, 1}), PointSet::of({0, 1})), PointSet::of({0, 1, 2}));
  EXPECT_EQ(sumset(PointSet::of({0, 1, 3}), PointSet::of({0, 1, 3})), PointSet::of({0, 1, 2, 3, 4, 6}));
  EXPECT_TRUE(sumset(PointSet(1), PointSet::of({0, 1})).empty());
  EXPECT_EQ(sumset(PointSet::of({0, 1, 3}), PointSet::of({0, 2}), {1, -1}), PointSet::of({-2, -1, 0, 1, 3}));
}

TEST(Sumset, DimensionMismatchThrows) {
  EXPECT_THROW(sumset(PointSet::of({0}), points2({{0, 0}})), Error);
  EXPECT_THROW(sumset(PointSet::of({0}), PointSet::of({0}), {2, 1}), Error);
}

TEST(Sumset, CommutativeAndMonotone) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_set(rng, 2, 6, 4);
    const auto y = oracle::random_set(rng, 2, 6, 4);
    const auto big = PointSet(2, [&] {
      auto v = x.points();
      for (const auto& p : oracle::random_set(rng, 2, 4, 4)) v.push_back(p);
      return v;
    }());
    EXPECT_EQ(sumset(x, y), sumset(y, x));
    EXPECT_TRUE(sumset(x, y).is_subset_of(sumset(big, y)));
  }
}

TEST(Dilate, Examples) {
  EXPECT_EQ(dilate(PointSet::of({0, 1, 3}), 2), PointSet::of({0, 2, 6}));
  EXPECT_EQ(dilate(PointSet::of({0, 1, 3}), 1), PointSet::of({0, 1, 3}));
  EXPECT_EQ(dilate(PointSet::of({0, 1, 3}), 0), PointSet::of({0}));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_set(rng, 2, 8, 5);
    EXPECT_EQ(dilate(x, -3).size(), x.size());
  }
}

TEST(DoublingConstant, Examples) {
  EXPECT_EQ(doubling_constant(PointSet::of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})), Rational(19, 10));
  EXPECT_EQ(doubling_constant(PointSet::of({0})), Rational(1));
  EXPECT_EQ(doubling_constant(PointSet::of({0, 1, 3, 7})), Rational(5, 2));
  EXPECT_THROW(doubling_constant(PointSet(1)), Error);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) EXPECT_GE(doubling_constant(oracle::random_set(rng, 1, 10, 30)), 1);
}

TEST(ReduceMod, Examples) {
  const auto two = reduce_mod(points2({{0, 0}, {1, 1}, {2, 0}}), 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.at(LatticePoint{0, 0}), 2u);
  EXPECT_EQ(two.at(LatticePoint{1, 1}), 1u);

  const auto ap = reduce_mod(PointSet::of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), 2);
  EXPECT_EQ(ap.at(LatticePoint{0}), 5u);
  EXPECT_EQ(ap.at(LatticePoint{1}), 5u);

  const auto three = reduce_mod(PointSet::of({0, 3, 6, 9}), 3);
  ASSERT_EQ(three.size(), 1u);
  EXPECT_EQ(three.at(LatticePoint{0}), 4u);

  EXPECT_THROW(reduce_mod(PointSet::of({1}), 1), Error);
  // negative coordinates land in [0, m)
  EXPECT_EQ(reduce_mod(PointSet::of({-1}), 2).count(LatticePoint{1}), 1u);
}

TEST(ReduceMod, MultiplicitiesSumToSize) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_set(rng, 3, 12, 9);
    for (long m : {2, 3, 5}) {
      std::size_t total = 0;
      for (const auto& [cls, c] : reduce_mod(a, m)) total += c;
      EXPECT_EQ(total, a.size());
    }
  }
}

TEST(ParityClass, BitsAndOrder) {
  const auto c = parity_of(LatticePoint{3, -2, 5, 0});
  EXPECT_EQ(c.to_string(), "1010");
  EXPECT_EQ(ParityClass::from_bits("1010"), c);
  EXPECT_TRUE(dot(c, ParityClass::from_bits("0010")));
  EXPECT_FALSE(dot(c, ParityClass::from_bits("1010")));
  EXPECT_LT(ParityClass::from_bits("0011"), ParityClass::from_bits("0100"));
  EXPECT_LT(ParityClass::from_bits("0000"), ParityClass::from_bits("0001"));

  ParityClass wide(130);
  wide.set(129);
  wide.set(3);
  EXPECT_EQ(wide.popcount(), 2u);
  EXPECT_EQ(wide.lowest_bit(), 3u);
  EXPECT_EQ((wide ^ wide).is_zero(), true);
}

TEST(MassFunction, CanonicalForm) {
  MassFunction f(1, {{LatticePoint{2}, Rational(1, 2)}, {LatticePoint{0}, Rational(3)}, {LatticePoint{2}, Rational(1, 2)},
                     {LatticePoint{5}, Rational(0)}});
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f.point(0), LatticePoint{0});
  EXPECT_EQ(f.at(LatticePoint{2}), 1);
  EXPECT_EQ(f.at(LatticePoint{5}), 0);
  EXPECT_THROW(MassFunction(1, {{LatticePoint{0}, Rational(-1)}}), Error);
  EXPECT_THROW(MassFunction(2, {{LatticePoint{0}, Rational(1)}}), Error);
}

TEST(PointSet, CanonicalAndDimensionChecked) {
  EXPECT_EQ(PointSet::of({3, 1, 3, 2}), PointSet::of({1, 2, 3}));
  EXPECT_THROW(PointSet(2, {LatticePoint{1}}), Error);
  EXPECT_THROW(PointSet(0), Error);
}

}  // namespace
}  // namespace addcomb
