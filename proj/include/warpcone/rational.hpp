#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace warpcone {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using int128 = __int128;

inline BigInt numer(const Rational& x) { return boost::multiprecision::numerator(x); }
inline BigInt denom(const Rational& x) { return boost::multiprecision::denominator(x); }

BigInt floor(const Rational& x);
BigInt ceil(const Rational& x);
Rational abs(const Rational& x);

// Representative in [0, 1).
Rational mod1(const Rational& x);

// Arc distance on R/Z: min(|x-y| mod 1, 1 - |x-y| mod 1).
Rational circle_dist(const Rational& x, const Rational& y);

BigInt gcd(const BigInt& a, const BigInt& b);
BigInt lcm(const BigInt& a, const BigInt& b);

// Inverse of a modulo m in [0, m); throws ValidationError when gcd(a, m) != 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m);
BigInt mod(const BigInt& a, const BigInt& m);

// "p/q" or "p" for integers.
std::string to_string(const Rational& x);
std::string to_string(const BigInt& x);
std::string to_string(int128 x);

// Accepts "p/q", "p", "-p/q"; rejects anything else.
Rational parse_rational(std::string_view s);

bool fits_int64(const BigInt& x);
std::int64_t to_int64(const BigInt& x);
int128 to_int128(const BigInt& x);
BigInt from_int128(int128 x);

double to_double(const Rational& x);

using Point = std::vector<Rational>;

std::string point_label(const Point& p);

}  // namespace warpcone
