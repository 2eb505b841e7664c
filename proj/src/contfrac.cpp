#include "warpcone/contfrac.hpp"

#include <algorithm>
#include <random>

#include <boost/multiprecision/miller_rabin.hpp>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

// |x - c| over the bracket, scaled by s.
Interval abs_image(const Interval& iv, const Rational& c, const Rational& s = 1) {
  Rational a = abs(iv.lo - c) * s, b = abs(iv.hi - c) * s;
  Interval out;
  out.hi = std::max(a, b);
  out.lo = (iv.lo <= c && c <= iv.hi) ? Rational(0) : std::min(a, b);
  out.open = iv.open;
  return out;
}

// Certified "value < bound" for a bracket produced by abs_image. On an open bracket the
// supremum is never attained, so equality at the endpoint still certifies.
enum class Verdict { Holds, Fails, Unknown };
Verdict strictly_below(const Interval& v, const Rational& bound) {
  if (v.open ? v.hi <= bound : v.hi < bound) return Verdict::Holds;
  if (v.lo >= bound) return Verdict::Fails;
  return Verdict::Unknown;
}

nlohmann::json big(const BigInt& x) { return to_string(x); }
nlohmann::json rat(const Rational& x) { return to_string(x); }

}  // namespace

Rational ContinuedFraction::truncation() const {
  if (a.empty()) throw ValidationError("empty continued fraction");
  auto c = convergents(*this, depth() - 1);
  return c.back().value();
}

Interval ContinuedFraction::value_interval() const {
  if (a.empty()) throw ValidationError("empty continued fraction");
  auto c = convergents(*this, depth() - 1);
  const Rational last = c.back().value();
  if (terminal) return {last, last, false};
  BigInt pp = 1, qp = 0;
  if (c.size() >= 2) {
    pp = c[c.size() - 2].p;
    qp = c[c.size() - 2].q;
  }
  const Rational med(c.back().p + pp, c.back().q + qp);
  return {std::min(last, med), std::max(last, med), true};
}

ContinuedFraction expand(const Rational& x) {
  ContinuedFraction cf;
  cf.terminal = true;
  Rational r = x;
  for (;;) {
    BigInt f = floor(r);
    cf.a.push_back(f);
    Rational rem = r - Rational(f);
    if (rem == 0) break;
    r = 1 / rem;
  }
  return cf;
}

ContinuedFraction truncated(std::vector<BigInt> a) {
  if (a.empty()) throw ValidationError("need at least one partial quotient");
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] < 1) throw ValidationError("partial quotients a_i must be >= 1 for i >= 1");
  return {std::move(a), false};
}

ContinuedFraction golden_cf(std::size_t depth) {
  std::vector<BigInt> a(depth, BigInt(1));
  if (!a.empty()) a[0] = 0;
  return truncated(std::move(a));
}

std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t upto) {
  if (upto >= cf.depth()) throw ValidationError("convergent index out of range");
  std::vector<Convergent> out;
  BigInt p2 = 0, q2 = 1, p1 = 1, q1 = 0;
  for (std::size_t i = 0; i <= upto; ++i) {
    BigInt p = cf.a[i] * p1 + p2, q = cf.a[i] * q1 + q2;
    out.push_back({i, p, q});
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
  }
  return out;
}

BoundCheck verify_approximation_bound(const ContinuedFraction& cf, std::size_t i) {
  if (i >= cf.depth()) throw ValidationError("convergent index out of range");
  BoundCheck out;
  if (cf.terminal && i + 1 == cf.depth()) {
    auto c = convergents(cf, i);
    const BigInt qprev = i ? c[i - 1].q : BigInt(0);
    // no q_{i+1}; use the smallest possible continuation a_{i+1} = 1
    out.bound = Rational(1) / Rational(c[i].q * (c[i].q + qprev));
    out.gap = {0, 0, false};
    out.slack = out.bound;
    out.holds = true;
    return out;
  }
  if (i + 1 >= cf.depth())
    throw UndecidableError("need q_{i+1}; expand the continued fraction deeper");
  auto c = convergents(cf, i + 1);
  out.bound = Rational(1) / Rational(c[i].q * c[i + 1].q);
  out.gap = abs_image(cf.value_interval(), c[i].value());
  out.slack = out.bound - out.gap.hi;
  switch (strictly_below(out.gap, out.bound)) {
    case Verdict::Holds: out.holds = true; break;
    case Verdict::Fails: out.holds = false; break;
    case Verdict::Unknown:
      throw UndecidableError("bracket too wide at depth " + std::to_string(cf.depth()) +
                             " to decide index " + std::to_string(i));
  }
  return out;
}

bool is_restricted_up_to_depth(const ContinuedFraction& cf, const BigInt& A) {
  for (std::size_t i = 1; i < cf.depth(); ++i)
    if (cf.a[i] > A) return false;
  return true;
}

Interval badly_approximable_margin(const ContinuedFraction& cf, std::size_t upto) {
  auto c = convergents(cf, upto);
  const Interval v = cf.value_interval();
  Interval out;
  for (std::size_t i = 0; i <= upto; ++i) {
    const Rational q2 = Rational(c[i].q * c[i].q);
    Interval g = abs_image(v, c[i].value(), q2);
    if (i == 0) {
      out.lo = g.lo;
      out.hi = g.hi;
    } else {
      out.lo = std::min(out.lo, g.lo);
      out.hi = std::min(out.hi, g.hi);
    }
  }
  out.open = false;
  return out;
}

LevelDecomposition level_decomposition(const ContinuedFraction& cf, const BigInt& A,
                                       const BigInt& t) {
  if (t < 1) throw ValidationError("level t must be a positive integer");
  if (A < 1) throw ValidationError("bound A must be >= 1");
  auto c = convergents(cf, cf.depth() - 1);
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].q * c[i].q <= t) pick = i;
  if (!pick || *pick + 1 >= c.size())
    throw UndecidableError("insufficient depth: need a convergent with q^2 > t");
  LevelDecomposition d;
  d.t = t;
  d.A = A;
  d.index = *pick;
  d.q = c[*pick].q;
  d.p = c[*pick].p;
  d.l = Rational(t) / Rational(d.q);
  d.bound = Rational(A + 1) / d.l;
  const Interval v = cf.value_interval();
  const Interval scaled{v.lo * Rational(d.q), v.hi * Rational(d.q), v.open};
  d.gap = abs_image(scaled, Rational(d.p));
  if (d.gap.hi <= d.bound) {
    d.certified = true;
  } else if (d.gap.lo > d.bound) {
    d.diagnosis = "|q alpha - p| > (A+1)/l: " + to_string(d.gap.lo) + " > " + to_string(d.bound);
  } else {
    d.diagnosis = "undecidable at depth " + std::to_string(cf.depth()) + ": |q alpha - p| in [" +
                  to_string(d.gap.lo) + ", " + to_string(d.gap.hi) + "] vs " + to_string(d.bound);
  }
  return d;
}

std::uint64_t largest_power_exponent(const BigInt& base, std::uint64_t bits) {
  if (base < 2) throw ValidationError("base must be >= 2");
  const BigInt cap = BigInt(1) << bits;
  std::uint64_t lo = 0, hi = bits + 1;  // base^lo <= cap < base^hi
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (boost::multiprecision::pow(base, static_cast<unsigned>(mid)) <= cap)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

HigherTori higher_tori_alpha(std::size_t m, const std::vector<BigInt>& b,
                             const std::vector<std::vector<std::int64_t>>& digits, std::size_t k,
                             std::uint64_t max_bits) {
  if (m == 0 || b.size() != m || digits.size() != m) throw ValidationError("need m bases and m digit rows");
  if (k == 0) throw ValidationError("depth k must be positive");
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 3 || !is_prime(b[i])) throw ValidationError("bases must be odd primes");
    if (i && b[i] < b[i - 1]) throw ValidationError("bases must be nondecreasing");
    if (digits[i].size() < k) throw ValidationError("need k digits per base");
    for (std::size_t n = 0; n < k; ++n)
      if (digits[i][n] < 1 || BigInt(digits[i][n]) >= b[i])
        throw ValidationError("digits must lie in 1..b_i-1");
  }
  // m^(2n) bits for n up to k+1 (the error bound uses 2k+2)
  std::vector<std::uint64_t> bits(k + 2, 0);
  for (std::size_t n = 1; n <= k + 1; ++n) {
    BigInt e = boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(2 * n));
    if (e > max_bits) throw CapacityError("2^(m^(2n)) exceeds the integer budget", max_bits);
    bits[n] = static_cast<std::uint64_t>(to_int64(e));
  }
  HigherTori h;
  h.m = m;
  h.k = k;
  h.b = b;
  h.D.assign(m, {});
  h.q = 1;
  for (std::size_t i = 0; i < m; ++i) {
    Rational beta = 0;
    for (std::size_t n = 1; n <= k; ++n) {
      const auto e = largest_power_exponent(b[i], bits[n]);
      BigInt D = boost::multiprecision::pow(b[i], static_cast<unsigned>(e));
      h.D[i].push_back(D);
      beta += Rational(BigInt(digits[i][n - 1]), D);
    }
    h.beta.push_back(beta);
    h.q *= h.D[i].back();
    h.error_bound.push_back(Rational(2 * b[i] * b[i], BigInt(1) << bits[k + 1]));
  }
  for (std::size_t i = 0; i < m; ++i) {
    Rational pi = h.beta[i] * Rational(h.q);
    if (denom(pi) != 1) throw Error("partial sum does not clear with q");
    h.p.push_back(numer(pi));
  }
  h.l = BigInt(1) << bits[k];
  return h;
}

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  std::mt19937 gen(12345);
  return boost::multiprecision::miller_rabin_test(n, 25, gen);
}

std::vector<std::pair<BigInt, unsigned>> factorize(const BigInt& n) {
  if (n < 1) throw ValidationError("factorize needs a positive integer");
  if (n > BigInt("100000000000000")) throw CapacityError("trial division limit", 100000000000000ull);
  std::int64_t x = to_int64(n);
  std::vector<std::pair<BigInt, unsigned>> out;
  for (std::int64_t d = 2; d * d <= x; ++d) {
    unsigned e = 0;
    while (x % d == 0) {
      x /= d;
      ++e;
    }
    if (e) out.emplace_back(BigInt(d), e);
  }
  if (x > 1) out.emplace_back(BigInt(x), 1);
  return out;
}

TechnicalReport verify_technical_conditions(const BigInt& q, const std::vector<BigInt>& p,
                                            const std::vector<Interval>& alpha, const Rational& l,
                                            const Rational& K,
                                            std::optional<std::vector<BigInt>> factors) {
  const std::size_t m = p.size();
  if (m == 0 || alpha.size() != m) throw ValidationError("need one angle bracket per p_i");
  if (q < 1 || l < 1 || K <= 0) throw ValidationError("need q >= 1, l >= 1, K > 0");
  TechnicalReport r;
  r.bound = K / l;
  r.q_le_l = Rational(q) <= l;
  std::vector<std::string> issues;
  for (const auto& pi : p)
    if (q > 1 && (pi < 1 || pi >= q)) issues.push_back("p_i outside 1..q-1");

  if (factors) {
    if (factors->size() != m) throw ValidationError("need m factors");
    BigInt prod = 1;
    for (std::size_t i = 0; i < m; ++i) {
      prod *= (*factors)[i];
      for (std::size_t j = 0; j < i; ++j)
        if (gcd((*factors)[i], (*factors)[j]) != 1) issues.push_back("factors are not coprime");
    }
    if (prod != q) issues.push_back("factors do not multiply to q");
    r.factors = *factors;
  } else {
    r.factors.assign(m, BigInt(1));
    for (auto& [prime, e] : factorize(q)) {
      const BigInt pe = boost::multiprecision::pow(prime, e);
      std::optional<std::size_t> home;
      bool clash = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (mod(p[i], prime) != 0) {
          if (home) clash = true;
          home = i;
        }
      }
      if (!home || clash) {
        issues.push_back("prime " + to_string(prime) + (home ? " is a unit for two p_i" : " divides every p_i"));
        continue;
      }
      r.factors[*home] *= pe;
    }
  }
  r.factors_le_l = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (Rational(r.factors[i]) > l) r.factors_le_l = false;
    BigInt others = 1;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) {
        others *= r.factors[j];
        if (mod(p[i], r.factors[j]) != 0)
          issues.push_back("p_" + std::to_string(i + 1) + " is nonzero mod l_" + std::to_string(j + 1));
      }
    const BigInt li = r.factors[i];
    BigInt pp = mod(p[i] / others, li);
    r.p_prime.push_back(pp);
    if (li > 1 && gcd(pp, li) != 1)
      issues.push_back("p_" + std::to_string(i + 1) + " does not generate Z/" + to_string(li) +
                       " (residue " + to_string(mod(p[i], li)) + ")");
  }
  if (!r.factors_le_l) issues.push_back("some l_i exceeds l");
  for (std::size_t i = 0; i < m; ++i) {
    const Interval s{alpha[i].lo * Rational(q), alpha[i].hi * Rational(q), alpha[i].open};
    Interval g = abs_image(s, Rational(p[i]));
    r.gaps.push_back(g);
    switch (strictly_below(g, r.bound)) {
      case Verdict::Holds: break;
      case Verdict::Fails:
        issues.push_back("|q alpha_" + std::to_string(i + 1) + " - p_" + std::to_string(i + 1) + "| >= K/l");
        break;
      case Verdict::Unknown:
        issues.push_back("|q alpha_" + std::to_string(i + 1) + " - p_" + std::to_string(i + 1) +
                         "| < K/l undecidable from the bracket");
        break;
    }
  }
  r.ok = issues.empty();
  for (std::size_t i = 0; i < issues.size(); ++i) r.diagnosis += (i ? "; " : "") + issues[i];
  return r;
}

nlohmann::json to_json(const ContinuedFraction& cf) {
  auto arr = nlohmann::json::array();
  for (const auto& x : cf.a) {
    if (fits_int64(x))
      arr.push_back(to_int64(x));
    else
      arr.push_back(to_string(x));
  }
  return arr;
}

ContinuedFraction cf_from_json(const nlohmann::json& j, bool terminal) {
  if (!j.is_array()) throw ValidationError("continued fraction must be an array");
  std::vector<BigInt> a;
  for (const auto& x : j) {
    if (x.is_number_integer())
      a.emplace_back(x.get<std::int64_t>());
    else if (x.is_string())
      a.emplace_back(x.get<std::string>());
    else
      throw ValidationError("partial quotients must be integers");
  }
  ContinuedFraction cf = truncated(std::move(a));
  cf.terminal = terminal;
  return cf;
}

nlohmann::json to_json(const Interval& iv) {
  return {{"lo", rat(iv.lo)}, {"hi", rat(iv.hi)}, {"open", iv.open}};
}

nlohmann::json to_json(const LevelDecomposition& d) {
  return {{"t", big(d.t)},         {"index", d.index},       {"q", big(d.q)},
          {"p", big(d.p)},         {"l", rat(d.l)},          {"A", big(d.A)},
          {"bound", rat(d.bound)}, {"gap", to_json(d.gap)}, {"certified", d.certified},
          {"diagnosis", d.diagnosis}};
}

nlohmann::json to_json(const HigherTori& h) {
  nlohmann::json j;
  j["m"] = h.m;
  j["k"] = h.k;
  j["q"] = big(h.q);
  j["l"] = big(h.l);
  for (std::size_t i = 0; i < h.m; ++i) {
    nlohmann::json row;
    row["b"] = big(h.b[i]);
    for (const auto& d : h.D[i]) row["D"].push_back(big(d));
    row["beta"] = rat(h.beta[i]);
    row["p"] = big(h.p[i]);
    row["error_bound"] = rat(h.error_bound[i]);
    j["coordinates"].push_back(row);
  }
  return j;
}

nlohmann::json to_json(const TechnicalReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["bound"] = rat(r.bound);
  j["q_le_l"] = r.q_le_l;
  j["factors_le_l"] = r.factors_le_l;
  for (const auto& f : r.factors) j["factors"].push_back(big(f));
  for (const auto& f : r.p_prime) j["p_prime"].push_back(big(f));
  for (const auto& g : r.gaps) j["gaps"].push_back(to_json(g));
  j["diagnosis"] = r.diagnosis;
  return j;
}

}  // namespace warpcone
