#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "wmp/errors.hpp"

namespace wmp {

using Integer = mpz_class;

// Exact arbitrary-precision fraction. Always kept canonical: the numerator
// and denominator are coprime and the denominator is positive. This is the
// universal value type for probabilities, weights, thresholds and results;
// solver paths never touch floating point.
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(int n) : q_(n) {}                 // NOLINT: implicit by design
  Rational(long n) : q_(static_cast<long int>(n)) {}
  Rational(long long n) { q_ = make_integer(n); }
  Rational(const Integer& n) : q_(n) {}
  Rational(long long num, long long den) : Rational(make_integer(num), make_integer(den)) {}
  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }

  static std::optional<Rational> try_parse(const std::string& text);
  // Accepts "p" or "p/q" with optional leading '-'.
  static Rational parse(const std::string& text) {
    auto r = try_parse(text);
    if (!r) throw ValidationError("not a rational: '" + text + "'");
    return *r;
  }

  Integer numerator() const { return q_.get_num(); }
  Integer denominator() const { return q_.get_den(); }
  bool is_integer() const { return q_.get_den() == 1; }
  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }

  Rational abs() const { return Rational(mpq_class(::abs(q_))); }
  Integer floor() const {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  Integer ceil() const {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw ValidationError("rational division by zero");
    return Rational(mpq_class(a.q_ / b.q_));
  }
  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) >= 0; }

  // "p" or "p/q"; canonical, suitable as an exact machine-readable value.
  std::string str() const;
  // Display-only decimal rendering: `digits` significant digits, ties
  // rounded half-even. Never used in solver paths.
  std::string decimal(int digits = 12) const;
  double to_double() const { return q_.get_d(); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  explicit Rational(mpq_class q) : q_(std::move(q)) {}
  static Integer make_integer(long long v) {
    // mpz_class has no long long constructor on LP64-unfriendly paths; go
    // through a decimal string to stay portable.
    return Integer(std::to_string(v));
  }
  mpq_class q_;
};

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Checked narrowing for fast integer paths.
inline bool fits_long(const Integer& v) { return v.fits_slong_p(); }
inline long to_long(const Integer& v) {
  if (!fits_long(v)) throw SizeCapError("integer too large for the fast path");
  return v.get_si();
}

}  // namespace wmp
