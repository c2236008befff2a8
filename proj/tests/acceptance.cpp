// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Usage: acceptance [path to the addcomb binary]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "addcomb/covering.hpp"
#include "addcomb/energy.hpp"
#include "addcomb/freiman.hpp"
#include "addcomb/generators.hpp"
#include "addcomb/increment.hpp"
#include "addcomb/inequalities.hpp"
#include "oracles.hpp"

using namespace addcomb;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

int run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) o.require(false, "took " + fmt(secs) + " s, budget " + fmt(budget_s) + " s");
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " (" << fmt(secs) << " s)";
  if (!o.detail.empty()) std::cout << "  " << o.detail;
  std::cout << std::endl;
  return o.pass ? 0 : 1;
}

Outcome identities() {
  Outcome o;
  const auto r = verify_suite("identities", 1000, kSeed);
  o.require(r.exact, "identity suite used a float comparison");
  o.require(r.ok(), std::to_string(r.samples - r.passed) + " failures, first: " + (r.failures.empty() ? "" : r.failures[0].witness));
  o.detail = o.pass ? "1000/1000 exact" : o.detail;
  return o;
}

Outcome sweeps() {
  Outcome o;
  std::string summary;
  for (const auto& s : suite_names()) {
    if (s == "identities") continue;
    const auto r = verify_suite(s, 10000, kSeed);
    o.require(r.ok(), s + ": " + std::to_string(r.samples - r.passed) + " failures " +
                          (r.failures.empty() ? "" : r.failures[0].witness));
    summary += s + " " + std::to_string(r.passed) + "/" + std::to_string(r.samples) + " ";
  }
  if (o.pass) o.detail = summary + "(tol 1e-9 relative, 0 on exact paths)";
  return o;
}

Outcome fixtures() {
  Outcome o;
  const auto e012 = additive_energy(PointSet::of({0, 1, 2}));
  const auto u01 = u3_energy(PointSet::of({0, 1}));
  const auto u012 = u3_energy(PointSet::of({0, 1, 2}));
  const double n01 = normalized_energy(PointSet::of({0, 1}));
  o.require(e012 == 19, "E({0,1,2}) = " + e012.get_str());
  o.require(u01 == 8, "E_U3({0,1}) = " + u01.get_str());
  o.require(u012 == 33, "E_U3({0,1,2}) = " + u012.get_str());
  o.require(std::abs(n01 - std::pow(2.0, -0.125)) <= 1e-12, "normalized({0,1}) = " + fmt(n01, 17));
  if (o.pass) o.detail = "E=19, U3=8, U3=33, normalized=2^(-1/8)";
  return o;
}

Outcome freiman() {
  Outcome o;
  std::size_t models = 0;
  auto check_model = [&](const std::string& name, const PointSet& a, std::size_t expected) {
    const auto m = universal_model(a);
    ++models;
    o.require(m.dimension == expected, name + " has dimension " + std::to_string(m.dimension));
    o.require(oracle::freiman_dimension(a) == expected, name + " oracle dimension differs");
    const PointSet img = m.image_set();
    o.require(verify_freiman_iso(a.points(), m.images) && verify_freiman_iso(std::span<const LatticePoint>(m.images), a.points()),
              name + " model is not Freiman isomorphic");
    o.require(affinely_generates(m.images, m.dimension), name + " model does not affinely generate");
    o.require(u3_energy(img) == u3_energy(a) && additive_energy(img) == additive_energy(a), name + " energy not preserved");
  };
  for (std::size_t n = 3; n <= 40; ++n) check_model("ap(" + std::to_string(n) + ")", ap(n), 1);
  for (std::size_t m : {4, 8, 16}) check_model("sidon(" + std::to_string(m) + ")", sidon(m), m - 1);
  for (std::size_t k : {2, 3}) check_model("union(3," + std::to_string(k) + ")", union_example(3, k), k);
  if (o.pass) o.detail = std::to_string(models) + " models verified both ways, energies preserved exactly";
  return o;
}

Outcome increment() {
  Outcome o;
  const auto a = sidon(64);
  const CaseParams params;
  const auto t = run_increment(a, params);
  o.require(t.increments() >= 1, "no increment step");
  o.require(t.steps.size() <= params.max_iters, "exceeded max_iters");
  for (const auto& v : check_trace(t)) o.require(false, v);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (s.case_taken == StepCase::Terminate) continue;
    o.require(s.size_after < s.size_before, "step " + std::to_string(i) + " not proper");
    o.require(s.pow8_after > s.pow8_before, "step " + std::to_string(i) + " K not decreasing");
  }
  const std::size_t d = oracle::freiman_dimension(t.final_set);
  o.require(d <= 1 || detail::within_bound(d, t.final_pow8), "final dimension " + std::to_string(d) + " above 8 log2 K + 32");
  o.require(static_cast<double>(d) <= 8 * std::log2(t.final_k) + 32 + 1e-9, "final dimension check (float)");
  if (o.pass)
    o.detail = std::to_string(t.increments()) + " increment(s), cases:" + [&] {
      std::string c;
      for (const auto& s : t.steps) c += std::string(" ") + to_string(s.case_taken);
      return c;
    }() + ", |X| = " + std::to_string(t.final_set.size()) + ", dim(X) = " + std::to_string(d) + ", K = " + fmt(t.final_k, 6);
  return o;
}

Outcome covering() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < 1000; ++i) {
    const auto x = oracle::random_set(rng, 1 + i % 2, 8, 6);
    const auto y = oracle::random_set(rng, 1 + i % 2, 20, 12);
    const auto c = ruzsa_cover(x, y);
    o.require(c.covered && c.within_bound(), "cover sample " + std::to_string(i));
  }
  const auto sets = corpus(0);
  o.require(sets.size() >= 200, "corpus has " + std::to_string(sets.size()) + " sets");
  for (const auto& [name, s] : sets) {
    o.require(residue_bound(s, 2).pass, name + " mod 2");
    o.require(residue_bound(s, 3).pass, name + " mod 3");
  }
  if (o.pass) o.detail = "1000 covers, " + std::to_string(sets.size()) + " corpus sets mod 2 and 3";
  return o;
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  status = pclose(p);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.require(false, "no CLI path given");
    return o;
  }
  const std::string tmp = "acceptance_trace_";
  std::array<std::string, 2> verify_out, inc_out, traces;
  const std::array<int, 2> threads{1, 8};
  for (int i = 0; i < 2; ++i) {
    int st = 0;
    const std::string th = " --threads " + std::to_string(threads[i]);
    verify_out[i] = capture(cli + " verify --seed 42 --json" + th, st);
    o.require(st == 0, "verify exited with " + std::to_string(st));
    const std::string trace = tmp + std::to_string(i) + ".jsonl";
    inc_out[i] = capture(cli + " increment --gen sidon:64 --json --trace-out " + trace + th, st);
    o.require(st == 0, "increment exited with " + std::to_string(st));
    traces[i] = slurp(trace);
    std::remove(trace.c_str());
  }
  o.require(!verify_out[0].empty() && verify_out[0] == verify_out[1], "verify output differs between thread counts");
  o.require(!inc_out[0].empty() && inc_out[0] == inc_out[1], "increment output differs between thread counts");
  o.require(!traces[0].empty() && traces[0] == traces[1], "trace files differ between thread counts");
  if (o.pass)
    o.detail = "verify (" + std::to_string(verify_out[0].size()) + " bytes) and increment (" + std::to_string(inc_out[0].size()) +
               " + " + std::to_string(traces[0].size()) + " bytes) identical at 1 and 8 threads";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  set_max_threads(0);
  int failures = 0;
  failures += run(1, "exact identities on 1000 random functions", 60, identities);
  failures += run(2, "inequality sweeps, 10^4 samples per checker", 300, sweeps);
  failures += run(3, "fixture values", 1, fixtures);
  failures += run(4, "Freiman dimension and model verification", 60, freiman);
  failures += run(5, "increment pipeline on greedy Sidon(64)", 600, increment);
  failures += run(6, "Ruzsa covering and residue bounds", 120, covering);
  failures += run(7, "determinism across thread counts", 600, [&] { return determinism(cli); });
  std::cout << (failures == 0 ? "all 7 criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
