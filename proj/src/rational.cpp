#include "abp/rational.hpp"

#include "abp/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace abp {

namespace {

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// cpp_int's string constructor treats a leading 0 as a C-style octal prefix;
// strip leading zeros (keeping the sign) so digit strings always read as
// decimal.
BigInt decimal_bigint(const std::string& s) {
  std::string sign;
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    if (s[0] == '-') sign = "-";
    i = 1;
  }
  while (i + 1 < s.size() && s[i] == '0') ++i;
  return BigInt(sign + s.substr(i));
}

Rational parse_decimal(const std::string& text) {
  // [sign] digits [. digits] [e[sign]digits]
  std::size_t pos = 0;
  bool neg = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    neg = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_digit = false, seen_dot = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  long exp10 = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool eneg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      eneg = text[pos] == '-';
      ++pos;
    }
    if (pos == text.size()) throw validation_error("bad rational literal: " + text);
    long e = 0;
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos])))
        throw validation_error("bad rational literal: " + text);
      e = e * 10 + (text[pos] - '0');
      if (e > 100000) throw validation_error("exponent out of range: " + text);
    }
    exp10 = eneg ? -e : e;
  }
  if (!seen_digit || pos != text.size())
    throw validation_error("bad rational literal: " + text);

  BigInt num = decimal_bigint(digits.empty() ? "0" : digits);
  BigInt den = 1;
  long net = exp10 - frac_digits;
  if (net >= 0) {
    for (long i = 0; i < net; ++i) num *= 10;
  } else {
    for (long i = 0; i < -net; ++i) den *= 10;
  }
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string p = text.substr(0, slash), q = text.substr(slash + 1);
    if (!is_integer_text(p) || !is_integer_text(q))
      throw validation_error("bad rational literal: " + text);
    BigInt num = decimal_bigint(p), den = decimal_bigint(q);
    if (den == 0) throw validation_error("zero denominator: " + text);
    return Rational(num, den);
  }
  if (is_integer_text(text)) return Rational(decimal_bigint(text));
  return parse_decimal(text);
}

std::string format_rational(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw validation_error("non-finite value");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  BigInt num = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rational r(num);
  BigInt two = 2;
  if (exp >= 0) {
    r *= Rational(boost::multiprecision::pow(two, exp));
  } else {
    r /= Rational(boost::multiprecision::pow(two, -exp));
  }
  return r;
}

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den, r = num % den;
  if (r != 0 && ((r < 0) != (den < 0))) --q;
  return q;
}

double Quad::value() const { return to_double(a) + to_double(b) * std::sqrt(2.0); }

int Quad::sign() const {
  int sa = a.sign(), sb = b.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare a^2 with 2 b^2; a + b*sqrt2 has the sign of the
  // larger magnitude term (never zero, since a/b = -+sqrt2 is impossible for
  // rationals unless both vanish).
  Rational a2 = a * a, b22 = 2 * b * b;
  if (a2 == b22) return 0;  // only when a == b == 0, handled above; kept defensively
  return a2 > b22 ? sa : sb;
}

Quad Quad::inverse() const {
  // 1/(a + b sqrt2) = (a - b sqrt2) / (a^2 - 2 b^2)
  Rational d = a * a - 2 * b * b;
  if (sign() == 0) throw validation_error("division by zero Quad");
  return Quad(a / d, -b / d);
}

std::string format_quad(const Quad& q) {
  if (q.is_rational()) return format_rational(q.a);
  return format_rational(q.a) + " + (" + format_rational(q.b) + ")*sqrt2";
}

BigInt quad_floor(const Quad& q) {
  if (q.b == 0) return floor_div(numerator(q.a), denominator(q.a));
  // Rational enclosure of sqrt2 from the Newton iteration x -> x/2 + 1/x,
  // which converges from above; lower bound via 2/x.
  Rational hi(3, 2);
  for (int i = 0; i < 8; ++i) hi = hi / 2 + Rational(1) / hi;  // error < 1e-300
  Rational lo = 2 / hi;
  Rational vlo = q.a + q.b * (q.b > 0 ? lo : hi);
  Rational vhi = q.a + q.b * (q.b > 0 ? hi : lo);
  BigInt flo = floor_div(numerator(vlo), denominator(vlo));
  BigInt fhi = floor_div(numerator(vhi), denominator(vhi));
  if (flo != fhi)
    throw validation_error("quad_floor: enclosure too wide (value extremely close to integer)");
  return flo;
}

}  // namespace abp
