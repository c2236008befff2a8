#pragma once

// Exact integer and rational arithmetic used throughout the library.
//
// BigInt and Rational are thin aliases over GMP's C++ classes. Everything
// that claims to be "exact" in this library is computed in these types; floats
// only appear where a genuinely irrational quantity (a fractional power, a
// logarithm) has to be materialised.

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace addcomb {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline BigInt pow(const BigInt& base, unsigned long exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

inline Rational pow(const Rational& base, unsigned long exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  return out;
}

/// base^exponent for a possibly negative exponent.
inline Rational pow_signed(const Rational& base, long exponent) {
  if (exponent >= 0) return pow(base, static_cast<unsigned long>(exponent));
  if (base == 0) throw Error("pow_signed: zero to a negative power");
  Rational inv = 1 / base;
  return pow(inv, static_cast<unsigned long>(-exponent));
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

/// Floor division (rounds toward negative infinity), matching Python's //.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

/// Non-negative remainder of a modulo m (m > 0).
inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

/// Exact conversion of a finite double (doubles are dyadic rationals).
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error("exact_rational: non-finite value");
  Rational r(x);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& x) { return x.get_d(); }

/// log2 of a positive rational, accurate even when the value under/overflows a double.
inline double log2_of(const Rational& x) {
  if (x <= 0) throw Error("log2_of: non-positive argument");
  long exp_num = 0;
  long exp_den = 0;
  double mant_num = mpz_get_d_2exp(&exp_num, x.get_num_mpz_t());
  double mant_den = mpz_get_d_2exp(&exp_den, x.get_den_mpz_t());
  return std::log2(mant_num) - std::log2(mant_den) + static_cast<double>(exp_num - exp_den);
}

/// x^(1/k) for a positive rational, computed through log2 so that tiny ratios keep precision.
inline double root_of(const Rational& x, double k) {
  if (x == 0) return 0.0;
  return std::exp2(log2_of(x) / k);
}

inline std::string to_string(const BigInt& x) { return x.get_str(); }
inline std::string to_string(const Rational& x) { return x.get_str(); }

inline Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) throw Error("parse_rational: malformed rational '" + text + "'");
  if (r.get_den() == 0) throw Error("parse_rational: zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

inline BigInt parse_bigint(const std::string& text) {
  BigInt z;
  if (z.set_str(text, 10) != 0) throw Error("parse_bigint: malformed integer '" + text + "'");
  return z;
}

inline std::size_t hash_combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t hash_value(const BigInt& z) {
  const mpz_srcptr p = z.get_mpz_t();
  std::size_t h = static_cast<std::size_t>(p->_mp_size);
  const int limbs = p->_mp_size < 0 ? -p->_mp_size : p->_mp_size;
  for (int i = 0; i < limbs; ++i) h = hash_combine(h, static_cast<std::size_t>(p->_mp_d[i]));
  return h;
}

}  // namespace addcomb
