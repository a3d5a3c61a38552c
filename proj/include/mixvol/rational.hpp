#pragma once

// Exact rational scalars and vectors used throughout the library.

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixvol {

using Rational = mpq_class;
using Integer = mpz_class;
using Vector = std::vector<Rational>;
using Point = Vector;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed instance, unsupported dimension, failed precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical or LP failure at run time (nonconvergence, non-generic shifts, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(std::string_view text) {
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw ValidationError("cannot parse rational '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact conversion; every finite double is a dyadic rational.
inline Rational from_double(double x) {
  if (!std::isfinite(x)) throw NumericalError("non-finite value cannot be made rational");
  return Rational(x);
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Rational pow(const Rational& base, unsigned exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  return out;
}

inline Integer factorial(unsigned n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

/// n! / (a_1! ... a_k!) with n = sum of the parts.
inline Integer multinomial(const std::vector<int>& parts) {
  unsigned total = 0;
  Integer denom = 1;
  for (int a : parts) {
    if (a < 0) throw ValidationError("multinomial: negative part");
    total += static_cast<unsigned>(a);
    denom *= factorial(static_cast<unsigned>(a));
  }
  return factorial(total) / denom;
}

/// 2^e as an exact rational (e may be negative).
/// num / den in canonical form.
inline Rational ratio(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational pow2(int e) {
  Integer p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
  return e < 0 ? Rational(Integer(1), p) : Rational(p);
}

inline Rational dot(const Vector& a, const Vector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vector operator+(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector operator-(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector operator*(const Rational& s, const Vector& a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

inline Vector zeros(std::size_t n) { return Vector(n, Rational(0)); }

inline std::vector<double> to_doubles(const Vector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return out;
}

inline std::string to_string(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].get_str();
  }
  return s + ")";
}

}  // namespace mixvol
