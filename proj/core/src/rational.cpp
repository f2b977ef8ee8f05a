#include "wmp/rational.hpp"

#include <cctype>

namespace wmp {

std::optional<Rational> Rational::try_parse(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto is_int = [](const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_int(text, true)) return std::nullopt;
    return Rational(Integer(text));
  }
  std::string num = text.substr(0, slash);
  std::string den = text.substr(slash + 1);
  if (!is_int(num, true) || !is_int(den, false)) return std::nullopt;
  Integer d(den);
  if (d == 0) return std::nullopt;
  return Rational(Integer(num), d);
}

std::string Rational::str() const {
  if (is_integer()) return numerator().get_str();
  return numerator().get_str() + "/" + denominator().get_str();
}

namespace {

// Number of decimal digits of |v|, v != 0.
int digit_count(const Integer& v) {
  return static_cast<int>(mpz_sizeinbase(v.get_mpz_t(), 10));
}

Integer pow10(int e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

// q = round(a / b) with ties to even; a, b > 0.
Integer divide_half_even(const Integer& a, const Integer& b) {
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Integer twice = r * 2;
  if (twice > b || (twice == b && mpz_odd_p(q.get_mpz_t()))) q += 1;
  return q;
}

}  // namespace

std::string Rational::decimal(int digits) const {
  if (digits < 1) digits = 1;
  if (is_zero()) return "0";
  Integer a = ::abs(numerator());
  Integer b = denominator();
  // Exponent e with 10^e <= a/b < 10^(e+1).
  auto at_least_pow = [&](int ee) {
    return ee >= 0 ? a >= b * pow10(ee) : a * pow10(-ee) >= b;
  };
  int e = digit_count(a) - digit_count(b);
  while (at_least_pow(e + 1)) ++e;
  while (!at_least_pow(e)) --e;
  // scaled = round(a/b * 10^(digits-1-e)), giving exactly `digits` digits.
  int k = digits - 1 - e;
  Integer scaled = k >= 0 ? divide_half_even(a * pow10(k), b) : divide_half_even(a, b * pow10(-k));
  if (digit_count(scaled) > digits || scaled >= pow10(digits)) {
    // Rounding carried over (e.g. 999.96 -> 1000 at 4 digits).
    scaled = divide_half_even(scaled, Integer(10));
    ++e;
  }
  std::string mant = scaled.get_str();
  std::string sign = sgn(q_) < 0 ? "-" : "";
  std::string out;
  if (e >= digits || e < -6) {
    // Scientific form for extreme magnitudes.
    out = mant.substr(0, 1);
    std::string frac = mant.substr(1);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
    out += "e" + std::to_string(e);
  } else if (e >= 0) {
    out = mant.substr(0, e + 1);
    std::string frac = mant.substr(e + 1);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) out += "." + frac;
  } else {
    std::string frac(static_cast<size_t>(-e - 1), '0');
    frac += mant;
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out = "0." + frac;
  }
  return sign + out;
}

}  // namespace wmp
