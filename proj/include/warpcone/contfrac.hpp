#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcone/rational.hpp"

namespace warpcone {

// Rational bracket; `open` means the endpoints themselves are excluded.
struct Interval {
  Rational lo, hi;
  bool open = false;
  bool contains(const Rational& x) const { return open ? (lo < x && x < hi) : (lo <= x && x <= hi); }
  Rational width() const { return hi - lo; }
};

// Leading partial quotients of a number. `terminal` marks the complete expansion of a
// rational; otherwise the value is an irrational continuing with some a_{depth} >= 1.
struct ContinuedFraction {
  std::vector<BigInt> a;
  bool terminal = false;

  std::size_t depth() const noexcept { return a.size(); }
  // Value of the truncation [a_0; ..., a_{depth-1}].
  Rational truncation() const;
  // Exact value for terminal expansions, else the open bracket between the last
  // convergent and the mediant with its predecessor.
  Interval value_interval() const;
};

// Euclidean expansion, last quotient >= 2 when depth > 1.
ContinuedFraction expand(const Rational& x);
// Leading quotients of an irrational; a_i >= 1 for i >= 1.
ContinuedFraction truncated(std::vector<BigInt> a);
ContinuedFraction golden_cf(std::size_t depth = 64);

struct Convergent {
  std::size_t index = 0;
  BigInt p, q;
  Rational value() const { return Rational(p, q); }
};
// Convergents 0..upto.
std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t upto);

struct BoundCheck {
  bool holds = false;
  Rational bound;  // 1 / (q_i q_{i+1})
  Interval gap;    // |alpha - p_i/q_i|
  Rational slack;  // bound - sup gap
};
// |alpha - p_i/q_i| < 1/(q_i q_{i+1}); UndecidableError if the bracket is too wide.
BoundCheck verify_approximation_bound(const ContinuedFraction& cf, std::size_t i);

bool is_restricted_up_to_depth(const ContinuedFraction& cf, const BigInt& A);

// min over i <= upto of q_i^2 |alpha - p_i/q_i|, as a bracket.
Interval badly_approximable_margin(const ContinuedFraction& cf, std::size_t upto);

struct LevelDecomposition {
  BigInt t;
  std::size_t index = 0;
  BigInt q, p;
  Rational l;
  BigInt A;
  Rational bound;  // (A+1)/l
  Interval gap;    // |q alpha - p|
  bool certified = false;
  std::string diagnosis;
};
// q = q_i with q_i^2 <= t < q_{i+1}^2, l = t/q.
LevelDecomposition level_decomposition(const ContinuedFraction& cf, const BigInt& A, const BigInt& t);

struct HigherTori {
  std::size_t m = 0, k = 0;
  std::vector<BigInt> b;
  std::vector<std::vector<BigInt>> D;  // D[i][n-1], n = 1..k
  std::vector<Rational> beta;          // partial sums at depth k
  BigInt q;                            // prod_i D[i][k-1]
  std::vector<BigInt> p;               // beta_i * q
  BigInt l;                            // 2^(m^(2k))
  std::vector<Rational> error_bound;   // 2 b_i^2 / 2^(m^(2k+2))
};
// digits[i][n-1] = N_{i,n}; needs at least k digits per i. D_{i,n} is the largest power
// of b_i not above 2^(m^(2n)), found by integer search. CapacityError past max_bits.
HigherTori higher_tori_alpha(std::size_t m, const std::vector<BigInt>& b,
                             const std::vector<std::vector<std::int64_t>>& digits, std::size_t k,
                             std::uint64_t max_bits = 1u << 22);
// Largest e with base^e <= 2^bits.
std::uint64_t largest_power_exponent(const BigInt& base, std::uint64_t bits);

struct TechnicalReport {
  bool ok = false;
  std::vector<BigInt> factors;   // l_i with q = prod l_i
  std::vector<BigInt> p_prime;   // p_i / prod_{j != i} l_j mod l_i
  std::vector<Interval> gaps;    // |q alpha_i - p_i|
  Rational bound;                // K / l
  bool q_le_l = false;
  bool factors_le_l = false;
  std::string diagnosis;
};
// Checks |q alpha_i - p_i| < K/l for all i and that Z/q splits as a sum of Z/l_i with
// p_i mapping to a generator of the i-th summand. The splitting is searched over the
// prime-power factorization of q unless given.
TechnicalReport verify_technical_conditions(const BigInt& q, const std::vector<BigInt>& p,
                                            const std::vector<Interval>& alpha,
                                            const Rational& l, const Rational& K,
                                            std::optional<std::vector<BigInt>> factors = std::nullopt);

// Prime-power factors of n by trial division; CapacityError for n past 10^18.
std::vector<std::pair<BigInt, unsigned>> factorize(const BigInt& n);
bool is_prime(const BigInt& n);

nlohmann::json to_json(const ContinuedFraction& cf);
ContinuedFraction cf_from_json(const nlohmann::json& j, bool terminal = false);
nlohmann::json to_json(const Interval& iv);
nlohmann::json to_json(const LevelDecomposition& d);
nlohmann::json to_json(const HigherTori& h);
nlohmann::json to_json(const TechnicalReport& r);

}  // namespace warpcone
