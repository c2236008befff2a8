#pragma once

// JSON interchange: point sets, energy reports, mass profiles, models,
// increment traces, check results and covering certificates.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "addcomb/core.hpp"
#include "addcomb/covering.hpp"
#include "addcomb/energy.hpp"
#include "addcomb/freiman.hpp"
#include "addcomb/increment.hpp"
#include "addcomb/inequalities.hpp"
#include "addcomb/mod2.hpp"

namespace addcomb {

using Json = nlohmann::ordered_json;

inline const BigInt& json_safe_limit() {
  static const BigInt limit = BigInt(1) << 53;
  return limit;
}

/// Integers below 2^53 in absolute value as JSON numbers, others as decimal strings.
inline Json to_json(const BigInt& c) {
  if (abs(c) < json_safe_limit()) return Json(c.get_si());
  return Json(c.get_str());
}

inline Json to_json(const Rational& q) { return Json(q.get_str()); }

inline BigInt bigint_from_json(const Json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return BigInt(std::to_string(j.get<std::uint64_t>()));
    return BigInt(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    BigInt c;
    const auto& s = j.get_ref<const std::string&>();
    if (s.empty() || c.set_str(s, 10) != 0) throw Error("invalid integer '" + s + "'");
    return c;
  }
  throw Error("expected an integer, got " + j.dump());
}

inline Json to_json(const LatticePoint& p) {
  Json a = Json::array();
  for (const auto& c : p.coords()) a.push_back(to_json(c));
  return a;
}

inline Json to_json(const std::vector<LatticePoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline Json to_json(const PointSet& s) {
  Json j;
  j["dim"] = s.dim();
  j["points"] = to_json(s.points());
  return j;
}

inline PointSet set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("points")) throw Error("set JSON needs \"dim\" and \"points\"");
  if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0) throw Error("\"dim\" must be a positive integer");
  const auto dim = j["dim"].get<std::size_t>();
  if (!j["points"].is_array()) throw Error("\"points\" must be an array");
  std::vector<LatticePoint> pts;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != dim) throw Error("point " + p.dump() + " does not have " + std::to_string(dim) + " coordinates");
    std::vector<BigInt> c;
    for (const auto& x : p) c.push_back(bigint_from_json(x));
    pts.emplace_back(std::move(c));
  }
  return PointSet(dim, std::move(pts));
}

inline PointSet parse_set(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  return set_from_json(j);
}

inline PointSet read_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_set(ss.str());
}

inline Json to_json(const EnergyReport& r) {
  Json j;
  j["e_u2"] = to_json(r.e_u2);
  j["e_u3"] = to_json(r.e_u3);
  j["l1"] = to_json(r.l1);
  j["l2_sq"] = to_json(r.l2_sq);
  j["l4_4"] = to_json(r.l4_4);
  j["normalized"] = r.normalized;
  return j;
}

inline Json to_json(const EtaProfile& eta) {
  Json m = Json::object();
  for (const auto& [w, v] : eta.mass_sq) m[w.to_string()] = v.get_str();
  return m;
}

inline EtaProfile eta_from_json(const Json& j, std::size_t dim) {
  if (!j.is_object()) throw Error("profile JSON must be an object");
  EtaProfile eta;
  eta.dim = dim;
  for (const auto& [k, v] : j.items()) {
    if (k.size() != dim) throw Error("class '" + k + "' does not have " + std::to_string(dim) + " bits");
    Rational q(v.get<std::string>());
    q.canonicalize();
    eta.mass_sq[ParityClass::from_bits(k)] = q;
    eta.total += q;
  }
  return eta;
}

inline Json to_json(const UniversalModel& m) {
  Json j;
  j["dimension"] = m.dimension;
  j["source"] = to_json(m.source);
  j["images"] = to_json(m.images);
  Json t = Json::array();
  for (const auto& x : m.torsion_invariants) t.push_back(to_json(x));
  j["torsion"] = t;
  j["relations"] = m.certificate.relations;
  j["relation_rank"] = m.certificate.relation_rank;
  return j;
}

inline Json to_json(const CaseParams& p) {
  Json j;
  j["epsilon"] = p.eps;
  j["delta"] = p.delta;
  j["tau"] = p.tau;
  j["max_iters"] = p.max_iters;
  return j;
}

inline Json to_json(const StepOutcome& s, std::size_t index) {
  Json j;
  j["step"] = index;
  j["case"] = to_string(s.case_taken);
  j["selector"] = s.selector.describe();
  j["size_before"] = s.size_before;
  j["size_after"] = s.size_after;
  j["dim"] = s.dim;
  j["pow8_before"] = to_json(s.pow8_before);
  j["pow8_after"] = to_json(s.pow8_after);
  j["k_before"] = s.k_before;
  j["k_after"] = s.k_after;
  j["density_ratio"] = to_json(s.density_ratio);
  j["eta_energy"] = s.eta_energy;
  j["bound"] = s.bound;
  j["subset"] = to_json(s.subset.points());
  return j;
}

/// Summary object for the whole run (no per-step data).
inline Json trace_summary_json(const IncrementTrace& t) {
  Json j;
  j["params"] = to_json(t.params);
  j["initial_size"] = t.initial.size();
  j["steps"] = t.steps.size();
  j["increments"] = t.increments();
  j["final_size"] = t.final_set.size();
  j["final_dim"] = t.final_dim;
  j["final_pow8"] = to_json(t.final_pow8);
  j["final_k"] = t.final_k;
  j["bound"] = t.bound_used;
  j["density_total"] = to_json(t.density_total);
  j["final_set"] = to_json(t.final_set);
  return j;
}

/// One StepOutcome per line.
inline std::string trace_jsonl(const IncrementTrace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) out += to_json(t.steps[i], i).dump() + "\n";
  return out;
}

inline std::string trace_csv(const IncrementTrace& t) {
  std::ostringstream out;
  out << "step,case,size,k,dim,density_ratio\n";
  out.precision(17);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out << i << ',' << to_string(s.case_taken) << ',' << s.size_before << ',' << s.k_before << ',' << s.dim << ','
        << s.density_ratio.get_str() << '\n';
  }
  return out.str();
}

inline Json to_json(const CheckResult& r) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["exact"] = r.exact;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  if (r.lhs_exact) j["lhs_exact"] = to_json(*r.lhs_exact);
  if (r.rhs_exact) j["rhs_exact"] = to_json(*r.rhs_exact);
  j["margin"] = r.margin;
  if (!r.witness.empty()) j["witness"] = r.witness;
  if (!r.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    j["parts"] = parts;
  }
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["passed"] = r.passed;
  j["worst_margin"] = r.worst_margin;
  j["exact"] = r.exact;
  if (!r.failures.empty()) {
    Json f = Json::array();
    for (const auto& x : r.failures) f.push_back(to_json(x));
    j["failures"] = f;
  }
  return j;
}

inline Json to_json(const CoverCertificate& c) {
  Json j;
  j["k"] = c.k;
  j["bound"] = to_json(c.bound);
  j["covered"] = c.covered;
  if (c.doubling) j["doubling"] = to_json(*c.doubling);
  if (c.doubling_bound) j["doubling_bound"] = to_json(*c.doubling_bound);
  j["translates"] = to_json(c.translates);
  return j;
}

inline Json to_json(const ResidueReport& r) {
  Json j;
  j["modulus"] = to_json(r.modulus);
  j["size"] = r.size;
  j["classes"] = r.classes;
  j["doubling"] = to_json(r.doubling);
  j["exponent"] = r.exponent;
  j["bound"] = to_json(r.bound);
  j["pass"] = r.pass;
  return j;
}

}  // namespace addcomb
