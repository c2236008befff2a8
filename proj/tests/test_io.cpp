#include <gtest/gtest.h>

#include <random>

#include "addcomb/generators.hpp"
#include "addcomb/io.hpp"
#include "oracles.hpp"

namespace addcomb {
namespace {

TEST(SetJson, Format) {
  const auto j = to_json(PointSet::of({2, 0, 1}));
  EXPECT_EQ(j.dump(), R"({"dim":1,"points":[[0],[1],[2]]})");
}

TEST(SetJson, LargeCoordinatesAreStrings) {
  const BigInt big = BigInt(1) << 53;
  const PointSet s(2, {LatticePoint(std::vector<BigInt>{big, BigInt(-5)}), LatticePoint(std::vector<BigInt>{BigInt(-big + 1), BigInt(7)})});
  const auto j = to_json(s);
  EXPECT_EQ(j["points"][0][0], Json(-9007199254740991));
  EXPECT_EQ(j["points"][1][0], Json("9007199254740992"));
  EXPECT_EQ(parse_set(j.dump()), s);
}

TEST(SetJson, RoundTripCorpus) {
  for (const auto& [name, s] : corpus(1)) EXPECT_EQ(parse_set(to_json(s).dump()), s) << name;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto s = oracle::random_set(rng, 1 + i % 4, 20, 1000);
    EXPECT_EQ(parse_set(to_json(s).dump()), s);
  }
}

TEST(SetJson, Rejects) {
  EXPECT_THROW(parse_set("{"), Error);
  EXPECT_THROW(parse_set(R"({"points":[[1]]})"), Error);
  EXPECT_THROW(parse_set(R"({"dim":0,"points":[]})"), Error);
  EXPECT_THROW(parse_set(R"({"dim":2,"points":[[1]]})"), Error);
  EXPECT_THROW(parse_set(R"({"dim":1,"points":[[1.5]]})"), Error);
  EXPECT_THROW(parse_set(R"({"dim":1,"points":[["x"]]})"), Error);
  EXPECT_EQ(parse_set(R"({"dim":1,"points":[["-12"],[3],[3]]})"), PointSet::of({-12, 3}));
}

TEST(EtaJson, RoundTrip) {
  const auto eta = eta_profile(MassFunction(2, {{LatticePoint{0, 1}, Rational(1, 2)}, {LatticePoint{1, 1}, Rational(3)}, {LatticePoint{2, 3}, Rational(1)}}));
  const auto j = to_json(eta);
  EXPECT_EQ(j.dump(), R"({"01":"5/4","11":"9"})");
  const auto back = eta_from_json(j, 2);
  EXPECT_EQ(back.mass_sq, eta.mass_sq);
  EXPECT_EQ(back.total, eta.total);
}

TEST(EnergyJson, Fields) {
  const auto j = to_json(energy_report(MassFunction::indicator(PointSet::of({0, 1, 2}))));
  EXPECT_EQ(j["e_u2"], "19");
  EXPECT_EQ(j["e_u3"], "33");
  EXPECT_NEAR(j["normalized"].get<double>(), std::pow(33.0 / 81.0, 0.125), 1e-12);
}

TEST(TraceJson, LinesAndCsv) {
  const auto t = run_increment(ap(10));
  const auto lines = trace_jsonl(t);
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), static_cast<long>(t.steps.size()));
  const auto first = Json::parse(lines.substr(0, lines.find('\n')));
  EXPECT_EQ(first["case"], "TERMINATE");
  EXPECT_EQ(first["step"], 0);
  const auto csv = trace_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,case,size,k,dim,density_ratio");
  EXPECT_EQ(trace_summary_json(t)["final_size"], 10);
}

TEST(CoverJson, Fields) {
  const auto j = to_json(ruzsa_cover(PointSet::of({0, 1}), PointSet::of({0, 1, 2, 3})));
  EXPECT_EQ(j["k"], 2);
  EXPECT_EQ(j["bound"], "5/2");
  EXPECT_EQ(j["translates"].dump(), "[[0],[2]]");
}

}  // namespace
}  // namespace addcomb
