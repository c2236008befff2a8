// addcomb: command-line front end for the energy, dimension, increment,
// verification and covering routines.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "addcomb/covering.hpp"
#include "addcomb/freiman.hpp"
#include "addcomb/generators.hpp"
#include "addcomb/increment.hpp"
#include "addcomb/inequalities.hpp"
#include "addcomb/io.hpp"
#include "addcomb/random.hpp"

using namespace addcomb;

namespace {

struct Options {
  bool json = false;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  // input set
  std::string input;
  std::string gen;

  // gen
  std::string kind;
  std::size_t n = 10;
  std::string start = "0";
  std::string step = "1";
  std::vector<std::size_t> lengths;
  std::vector<std::string> steps;
  std::size_t m = 8;
  std::size_t big_n = 3;
  std::size_t k = 2;
  long box = 10;
  std::size_t count = 20;
  std::size_t dim = 1;
  std::string path;

  // increment
  CaseParams params;
  std::string trace_out;
  std::string csv_out;

  // verify
  std::vector<std::string> suites;
  std::size_t trials = 10000;

  // cover
  std::vector<long> moduli{2, 3};
  std::string with;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

BigInt big(const std::string& s) {
  BigInt v;
  if (s.empty() || v.set_str(s, 10) != 0) throw Error("invalid integer '" + s + "'");
  return v;
}

std::size_t count_arg(const std::string& s) {
  const BigInt v = big(s);
  if (v < 0 || !v.fits_ulong_p()) throw Error("invalid count '" + s + "'");
  return v.get_ui();
}

/// KIND:ARGS shorthand, e.g. ap:10, ap:10,0,3, gap:3x4:1,10, sidon:64, union:3,2, box:20,10,2.
PointSet gen_from_spec(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<std::string>{} : split(spec.substr(colon + 1), ',');
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw Error("bad arguments in '" + spec + "'");
  };
  if (kind == "ap") {
    need(1, 3);
    return ap(count_arg(args[0]), args.size() > 1 ? big(args[1]) : BigInt(0), args.size() > 2 ? big(args[2]) : BigInt(1));
  }
  if (kind == "sidon") {
    need(1, 1);
    return sidon(count_arg(args[0]));
  }
  if (kind == "union" || kind == "union_example") {
    need(2, 2);
    return union_example(count_arg(args[0]), count_arg(args[1]));
  }
  if (kind == "box" || kind == "random_box") {
    need(2, 3);
    return random_box(count_arg(args[0]), static_cast<long>(count_arg(args[1])), args.size() > 2 ? count_arg(args[2]) : 1, seed);
  }
  if (kind == "gap") {
    const auto parts = split(spec.substr(colon + 1), ':');
    if (colon == std::string::npos || parts.size() != 2) throw Error("gap spec is gap:L1xL2...:S1,S2,...");
    std::vector<std::size_t> lengths;
    std::vector<BigInt> steps;
    for (const auto& l : split(parts[0], 'x')) lengths.push_back(count_arg(l));
    for (const auto& s : split(parts[1], ',')) steps.push_back(big(s));
    return gap(lengths, steps);
  }
  if (kind == "file") {
    need(1, 1);
    return read_set_file(args[0]);
  }
  throw Error("unknown generator '" + kind + "'");
}

PointSet input_set(const Options& o) {
  if (!o.gen.empty() && !o.input.empty()) throw Error("give either an input file or --gen, not both");
  if (!o.gen.empty()) return gen_from_spec(o.gen, o.seed);
  if (o.input.empty() || o.input == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return parse_set(ss.str());
  }
  return read_set_file(o.input);
}

void print_json(const Json& j) { std::cout << j.dump() << '\n'; }

void row(const std::string& key, const std::string& value) { std::cout << std::left << std::setw(22) << key << value << '\n'; }

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o) {
  PointSet s(1);
  if (o.kind == "ap") s = ap(o.n, big(o.start), big(o.step));
  else if (o.kind == "gap") {
    std::vector<BigInt> steps;
    for (const auto& x : o.steps) steps.push_back(big(x));
    s = gap(o.lengths, steps, big(o.start));
  } else if (o.kind == "sidon") s = sidon(o.m);
  else if (o.kind == "union_example") s = union_example(o.big_n, o.k);
  else if (o.kind == "random_box") s = random_box(o.count, o.box, o.dim, o.seed);
  else if (o.kind == "from_file") s = read_set_file(o.path);
  else throw CLI::ValidationError("gen", "unknown kind '" + o.kind + "'");
  print_json(to_json(s));
  return 0;
}

int cmd_energy(const Options& o) {
  const auto a = input_set(o);
  if (a.empty()) throw Error("energy: empty set");
  const auto f = MassFunction::indicator(a);
  const auto r = energy_report(f);
  const auto lower = check_shkredov(f);
  const auto upper = check_amgm_upper(f);
  const bool ok = lower.pass && upper.pass && r.normalized > 0 && r.normalized <= 1;
  if (o.json) {
    Json j;
    j["size"] = a.size();
    j["dim"] = a.dim();
    j["doubling"] = to_json(doubling_constant(a));
    j["energy"] = to_json(r);
    j["k"] = 1 / r.normalized;
    j["checks"] = Json::array({to_json(lower), to_json(upper)});
    j["ok"] = ok;
    print_json(j);
  } else {
    row("|A|", std::to_string(a.size()));
    row("|A+A|/|A|", doubling_constant(a).get_str() + " (" + fmt(doubling_constant(a).get_d()) + ")");
    row("E(A)", r.e_u2.get_str());
    row("E_U3(A)", r.e_u3.get_str());
    row("normalized energy", fmt(r.normalized));
    row("K", fmt(1 / r.normalized));
    row("shkredov", lower.pass ? "pass" : "FAIL");
    row("amgm upper", upper.pass ? "pass" : "FAIL");
  }
  return ok ? 0 : 1;
}

int cmd_dim(const Options& o) {
  const auto a = input_set(o);
  if (a.size() < 2) {
    if (o.json) print_json(Json{{"size", a.size()}, {"dimension", 0}, {"ok", true}});
    else row("dimension", "0");
    return 0;
  }
  const auto model = universal_model(a);  // throws if the model fails verification
  const bool energy_kept = u3_energy(model.image_set()) == u3_energy(a) && additive_energy(model.image_set()) == additive_energy(a);
  const auto lemma = check_dimension_lemma(a);
  if (o.json) {
    Json j;
    j["size"] = a.size();
    j["dimension"] = model.dimension;
    j["model"] = to_json(model);
    j["energy_preserved"] = energy_kept;
    j["dimension_lemma"] = {{"k", lemma.k}, {"bound", lemma.bound}, {"holds", lemma.holds}};
    j["ok"] = energy_kept;
    print_json(j);
  } else {
    row("|A|", std::to_string(a.size()));
    row("dimension", std::to_string(model.dimension));
    std::string t;
    for (const auto& x : model.torsion_invariants) t += x.get_str() + " ";
    row("torsion", t.empty() ? "none" : t);
    row("energy preserved", energy_kept ? "yes" : "NO");
    row("K - 1 + K^2/|A|", fmt(lemma.bound) + (lemma.holds ? "" : " (exceeded)"));
  }
  return energy_kept ? 0 : 1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

int cmd_increment(const Options& o) {
  const auto a = input_set(o);
  o.params.validate();
  IncrementTrace t;
  try {
    t = run_increment(a, o.params);
  } catch (const IncrementFailure& e) {
    if (!o.trace_out.empty()) write_file(o.trace_out, trace_jsonl(e.trace()));
    throw;
  }
  auto violations = check_trace(t);
  const std::size_t recomputed = freiman_dimension(t.final_set);
  if (recomputed != t.final_dim) violations.push_back("final dimension recomputes to " + std::to_string(recomputed));
  if (recomputed > 1 && !detail::within_bound(recomputed, t.final_pow8))
    violations.push_back("final set exceeds the dimension bound");
  if (!o.trace_out.empty()) write_file(o.trace_out, trace_jsonl(t));
  if (!o.csv_out.empty()) write_file(o.csv_out, trace_csv(t));
  const bool ok = violations.empty();
  if (o.json) {
    Json j = trace_summary_json(t);
    j["recomputed_dim"] = recomputed;
    j["violations"] = violations;
    j["ok"] = ok;
    print_json(j);
  } else {
    std::cout << std::left << std::setw(6) << "step" << std::setw(11) << "case" << std::setw(8) << "|A_n|" << std::setw(14) << "K_n"
              << std::setw(6) << "d_n" << "density" << '\n';
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto& s = t.steps[i];
      std::cout << std::setw(6) << i << std::setw(11) << to_string(s.case_taken) << std::setw(8) << s.size_before << std::setw(14)
                << fmt(s.k_before) << std::setw(6) << s.dim << s.density_ratio.get_str() << '\n';
    }
    row("final |X|", std::to_string(t.final_set.size()));
    row("final dim", std::to_string(t.final_dim) + " <= " + fmt(t.bound_used));
    row("final K", fmt(t.final_k));
    row("|A|/|X|", t.density_total.get_str());
    for (const auto& v : violations) row("violation", v);
  }
  return ok ? 0 : 1;
}

int cmd_verify(const Options& o) {
  auto suites = o.suites.empty() ? suite_names() : o.suites;
  bool ok = true;
  if (!o.json)
    std::cout << std::left << std::setw(12) << "suite" << std::setw(10) << "samples" << std::setw(10) << "passed" << std::setw(20)
              << "worst margin" << "seed" << '\n';
  for (const auto& s : suites) {
    const auto r = verify_suite(s, o.trials, o.seed);
    ok = ok && r.ok();
    if (o.json) {
      Json j = to_json(r);
      j["base_seed"] = o.seed;
      print_json(j);
    } else {
      std::cout << std::setw(12) << s << std::setw(10) << r.samples << std::setw(10) << r.passed << std::setw(20) << fmt(r.worst_margin)
                << o.seed << '\n';
      for (const auto& f : r.failures) std::cout << "  failure " << f.name << ": " << f.witness << '\n';
    }
  }
  return ok ? 0 : 1;
}

int cmd_cover(const Options& o) {
  const auto a = input_set(o);
  bool ok = true;
  Json out;
  if (!o.with.empty()) {
    const auto y = read_set_file(o.with);
    const auto c = ruzsa_cover(a, y);
    ok = c.ok();
    out["cover"] = to_json(c);
    if (!o.json) {
      row("k", std::to_string(c.k));
      row("|X+Y|/|X|", c.bound.get_str());
      row("covered", c.covered ? "yes" : "NO");
    }
  } else {
    const auto c = cover_2A2A(a);
    ok = c.ok();
    out["cover_2A2A"] = to_json(c);
    if (!o.json) {
      row("K", c.doubling->get_str());
      row("k", std::to_string(c.k));
      row("|X+Y|/|X|", c.bound.get_str() + " (" + fmt(c.bound.get_d()) + ")");
      row("K^6", fmt(c.doubling_bound->get_d()));
      row("covered", c.covered ? "yes" : "NO");
    }
  }
  Json res = Json::array();
  for (long n : o.moduli) {
    const auto r = residue_bound(a, n);
    ok = ok && r.pass;
    res.push_back(to_json(r));
    if (!o.json)
      row("mod " + std::to_string(n), std::to_string(r.classes) + " classes <= K^" + std::to_string(r.exponent) + " = " + fmt(r.bound.get_d()) +
                                          (r.pass ? "" : " FAIL"));
  }
  out["residues"] = res;
  out["ok"] = ok;
  if (o.json) print_json(out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive energy, Freiman dimension and energy-increment toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Machine-readable JSON output");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores); results do not depend on it");
  auto* seed_opt = app.add_option("--seed", o.seed, "Seed (default: TOOLKIT_SEED, else 0)");

  auto add_input = [&](CLI::App* c) {
    c->add_option("input", o.input, "Set JSON file ('-' or omitted: stdin)");
    c->add_option("--gen", o.gen, "Generate the input instead: ap:N[,start,step], gap:L1xL2:S1,S2, sidon:M, union:N,K, box:COUNT,B[,DIM], file:PATH");
  };

  auto* gen = app.add_subcommand("gen", "Print a generated set as JSON");
  gen->add_option("kind", o.kind, "ap | gap | sidon | union_example | random_box | from_file")->required();
  gen->add_option("--n", o.n, "AP length");
  gen->add_option("--start", o.start, "AP / GAP start");
  gen->add_option("--step", o.step, "AP step");
  gen->add_option("--lengths", o.lengths, "GAP lengths")->delimiter(',');
  gen->add_option("--steps", o.steps, "GAP steps")->delimiter(',');
  gen->add_option("--m", o.m, "Sidon set size");
  gen->add_option("--N", o.big_n, "union_example block length");
  gen->add_option("--k", o.k, "union_example block count");
  gen->add_option("--box", o.box, "random_box half-width");
  gen->add_option("--count", o.count, "random_box draws");
  gen->add_option("--dim", o.dim, "random_box dimension");
  gen->add_option("--path", o.path, "from_file path");

  auto* energy = app.add_subcommand("energy", "Additive and U^3 energies");
  add_input(energy);
  auto* dim = app.add_subcommand("dim", "Freiman dimension via the universal model");
  add_input(dim);

  auto* inc = app.add_subcommand("increment", "Run the energy-increment iteration");
  add_input(inc);
  inc->add_option("--epsilon", o.params.eps, "Fiber-case epsilon");
  inc->add_option("--delta", o.params.delta, "Coset-case delta");
  inc->add_option("--tau", o.params.tau, "Hyperplane imbalance tau");
  inc->add_option("--max-iters", o.params.max_iters, "Iteration cap");
  inc->add_option("--trace-out", o.trace_out, "Write the trace as JSON lines");
  inc->add_option("--csv-out", o.csv_out, "Write the CSV step summary");

  auto* verify = app.add_subcommand("verify", "Seeded inequality sweeps");
  verify->add_option("--suite", o.suites, "Suites to run (default: all)")->check(CLI::IsMember(suite_names()));
  verify->add_option("--trials", o.trials, "Samples per suite");

  auto* cover = app.add_subcommand("cover", "Covering of 2A-2A and residue bounds");
  add_input(cover);
  cover->add_option("--modulus", o.moduli, "Residue moduli (default 2 3)");
  cover->add_option("--with", o.with, "Cover this set Y by translates of the input X instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  o.seed_given = seed_opt->count() > 0;
  try {
    if (!o.seed_given) o.seed = default_seed(0);
    set_max_threads(o.threads);
    if (gen->parsed()) return cmd_gen(o);
    if (energy->parsed()) return cmd_energy(o);
    if (dim->parsed()) return cmd_dim(o);
    if (inc->parsed()) return cmd_increment(o);
    if (verify->parsed()) return cmd_verify(o);
    if (cover->parsed()) return cmd_cover(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
