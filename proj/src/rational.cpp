#include "warpcone/rational.hpp"

#include <limits>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

void floor_div_qr(const BigInt& n, const BigInt& d, BigInt& q) {
  // d > 0 for normalized rationals
  q = n / d;
  if (n < 0 && q * d != n) q -= 1;
}

}  // namespace

BigInt floor(const Rational& x) {
  BigInt q;
  floor_div_qr(numer(x), denom(x), q);
  return q;
}

BigInt ceil(const Rational& x) { return -floor(-x); }

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational mod1(const Rational& x) { return x - Rational(floor(x)); }

Rational circle_dist(const Rational& x, const Rational& y) {
  Rational d = mod1(x - y);
  Rational e = 1 - d;
  return d < e ? d : e;
}

BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  BigInt g = gcd(a, b);
  BigInt r = (a / g) * b;
  return r < 0 ? BigInt(-r) : r;
}

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt old_r = mod(a, m), r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) {
    throw ValidationError(to_string(a) + " is not invertible modulo " + to_string(m));
  }
  return mod(old_s, m);
}

std::string to_string(const BigInt& x) { return x.str(); }

std::string to_string(const Rational& x) {
  if (denom(x) == 1) return numer(x).str();
  return numer(x).str() + "/" + denom(x).str();
}

std::string to_string(int128 x) { return from_int128(x).str(); }

Rational parse_rational(std::string_view s) {
  auto is_int = [](std::string_view t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  if (!is_int(num)) throw ValidationError("malformed rational '" + std::string(s) + "'");
  BigInt n(std::string(num[0] == '+' ? num.substr(1) : num));
  if (slash == std::string_view::npos) return Rational(n);
  std::string_view den = s.substr(slash + 1);
  if (!is_int(den) || den[0] == '-' || den[0] == '+') {
    throw ValidationError("malformed rational '" + std::string(s) + "'");
  }
  BigInt d{std::string(den)};
  if (d == 0) throw ValidationError("zero denominator in '" + std::string(s) + "'");
  return Rational(n, d);
}

bool fits_int64(const BigInt& x) {
  return x >= std::numeric_limits<std::int64_t>::min() &&
         x <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t to_int64(const BigInt& x) {
  if (!fits_int64(x)) throw CapacityError("integer " + x.str() + " exceeds 64 bits", 64);
  return x.convert_to<std::int64_t>();
}

int128 to_int128(const BigInt& x) {
  static const BigInt lim = BigInt(1) << 126;
  if (x >= lim || x <= -lim) throw CapacityError("integer " + x.str() + " exceeds 126 bits", 126);
  bool neg = x < 0;
  BigInt a = neg ? BigInt(-x) : x;
  auto hi = static_cast<std::uint64_t>((a >> 64).convert_to<std::uint64_t>());
  auto lo = static_cast<std::uint64_t>((a & BigInt(std::numeric_limits<std::uint64_t>::max()))
                                           .convert_to<std::uint64_t>());
  int128 r = (static_cast<int128>(hi) << 64) | static_cast<int128>(lo);
  return neg ? -r : r;
}

BigInt from_int128(int128 x) {
  bool neg = x < 0;
  unsigned __int128 a = neg ? static_cast<unsigned __int128>(-x) : static_cast<unsigned __int128>(x);
  BigInt r = BigInt(static_cast<std::uint64_t>(a >> 64));
  r <<= 64;
  r += BigInt(static_cast<std::uint64_t>(a));
  return neg ? BigInt(-r) : r;
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

std::string point_label(const Point& p) {
  if (p.size() == 1) return to_string(p[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += to_string(p[i]);
  }
  return s + ")";
}

}  // namespace warpcone
