#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace abp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", plain integers ("50", "-3") and decimal strings ("0.61", "2.5e-3")
// into an exact rational. Throws validation_error on malformed input or q == 0.
Rational parse_rational(const std::string& text);

// Canonical text form: "p" when the denominator is 1, else "p/q". Round-trips
// exactly through parse_rational.
std::string format_rational(const Rational& r);

double to_double(const Rational& r);

// Exact double -> rational conversion (every finite double is a dyadic rational).
Rational rational_from_double(double x);

// floor(num/den) for exact integers, correct for negative values.
BigInt floor_div(const BigInt& num, const BigInt& den);

// Elements of the field Q(sqrt 2): value = a + b*sqrt(2) with exact rational a, b.
// Used wherever risk budgets or bound factors involve sqrt(2) and a comparison
// must be exact (sign analysis plus squaring; no floating point).
struct Quad {
  Rational a;  // rational part
  Rational b;  // coefficient of sqrt(2)

  Quad() = default;
  Quad(Rational ra) : a(std::move(ra)) {}  // NOLINT: implicit by design
  Quad(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

  static Quad sqrt2() { return Quad(Rational(0), Rational(1)); }

  bool is_rational() const { return b == 0; }
  double value() const;

  // -1, 0, +1 for the sign of the real number a + b*sqrt(2).
  int sign() const;

  Quad operator+(const Quad& o) const { return Quad(a + o.a, b + o.b); }
  Quad operator-(const Quad& o) const { return Quad(a - o.a, b - o.b); }
  Quad operator*(const Quad& o) const {
    return Quad(a * o.a + 2 * b * o.b, a * o.b + b * o.a);
  }
  Quad inverse() const;  // throws on zero

  bool operator==(const Quad& o) const { return a == o.a && b == o.b; }
  bool operator!=(const Quad& o) const { return !(*this == o); }
  bool operator<(const Quad& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const Quad& o) const { return (*this - o).sign() <= 0; }
  bool operator>(const Quad& o) const { return (*this - o).sign() > 0; }
  bool operator>=(const Quad& o) const { return (*this - o).sign() >= 0; }
};

std::string format_quad(const Quad& q);

// Largest integer <= a + b*sqrt(2). Exact: when b != 0 the value is irrational,
// so a sufficiently precise rational enclosure of sqrt(2) pins the floor.
BigInt quad_floor(const Quad& q);

}  // namespace abp
