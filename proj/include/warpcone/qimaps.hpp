#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcone/actions.hpp"
#include "warpcone/contfrac.hpp"
#include "warpcone/metric.hpp"
#include "warpcone/warped.hpp"

namespace warpcone {

// A total map between finite metric spaces, given by target indices.
struct MetricMap {
  std::shared_ptr<const IndexedMetric> source, target;
  std::vector<std::size_t> assign;
};

template <class M>
std::shared_ptr<const IndexedMetric> share(M m) {
  return std::make_shared<const M>(std::move(m));
}

// g o f; f.target and g.source must be the same space.
MetricMap compose(const MetricMap& f, const MetricMap& g);

struct DistortionOptions {
  Rational A_max = 8;
  Rational A_step = Rational(1, 2);
  // Smallest grid A whose exact C stays within the budget; unset: smallest A with finite C.
  std::optional<Rational> C_budget;
  // Fix C instead and report the exact minimal A.
  std::optional<Rational> fixed_C;
  bool codensity = true;
  std::size_t buckets = 16;
  Exec exec = Exec::Parallel;
};

struct DistortionBucket {
  Rational lo, hi;    // source distance range
  Rational min, max;  // image distances seen in the range
};

struct DistortionReport {
  Rational C = 1, A = 0;
  std::optional<Rational> codensity;
  std::vector<DistortionBucket> buckets;
  // C as a function of A on the grid; nullopt where no finite C exists.
  std::vector<std::pair<Rational, std::optional<Rational>>> frontier;
  // binding pairs of source indices for the reported (C, A)
  std::pair<std::size_t, std::size_t> upper_pair{0, 0}, lower_pair{0, 0};
  std::size_t pairs = 0;
  bool fixed_point = false;

  // C for a given grid value of A (nullopt if not on the grid or infinite).
  std::optional<Rational> C_at(const Rational& A) const;
};

// Throws QuasiIsometryError when no grid A admits C within the budget.
DistortionReport measure_distortion(const MetricMap& f, const DistortionOptions& opt = {});
// Exact Rational scan, serial; same results.
DistortionReport measure_distortion_reference(const MetricMap& f, const DistortionOptions& opt = {});

nlohmann::json to_json(const DistortionReport& r);

// z -> (q z, r_1 z, ..., r_m z) into the l1 torus with scales (l, l_1, ..., l_m).
struct IotaMap {
  MetricMap map;
  FiniteNet target = FiniteNet::circle({Rational(0)});
  std::vector<BigInt> r;
  std::vector<BigInt> factors;
  BigInt q;
  bool equivariant = false;  // iota(g_i z) = iota(z) + e_i / l_i on the whole domain
};
Point iota_point(const Rational& z, const BigInt& q, const std::vector<BigInt>& r);
// `beta_sys` rotates by p_i/q; `source` is its level at t = l q on a circle domain.
// Throws ValidationError unless `cert` passed.
IotaMap build_iota(const TechnicalReport& cert, const BigInt& q, const std::vector<BigInt>& p,
                   const Rational& l, const ActionSystem& beta_sys, const WarpedLevel& source);

struct SubstitutionReport {
  MetricMap map;  // identity on points
  DistortionReport report;
  Rational C0;             // bi-Lipschitz constant (A = 0)
  Interval K_gap;          // l |q alpha_i - p_i|, worst coordinate
  bool K_certified = false;
  bool within_bound = false;  // C0 <= K + 1
  bool flagged = true;
};
// Throws DomainMismatchError when the levels differ in points or t.
SubstitutionReport substitute_angle(const WarpedLevel& alpha_level, const WarpedLevel& beta_level,
                                    const std::vector<Interval>& alpha,
                                    const std::vector<BigInt>& p, const BigInt& q,
                                    const Rational& l, const Rational& K,
                                    const DistortionOptions& opt = {});

struct QuotientResult {
  MetricMap map;
  FiniteNet quotient = FiniteNet::circle({Rational(0)});  // classes with the quotient distance (unscaled)
  std::vector<std::size_t> class_of;  // domain point -> class
  std::optional<ActionSystem> target_system;  // Gamma/F on the quotient
  DistortionReport report;            // C fixed to 1
  Rational orbit_diameter;            // max warped diameter of an F-orbit
  bool ok = false;                    // C = 1 and A <= orbit_diameter
};
// F is the finite factor `factor` of an abelian system; the domain must be invariant.
// Throws UnsupportedError when F does not act isometrically on the domain.
QuotientResult quotient_map(const ActionSystem& sys, std::size_t factor, const Rational& t,
                            const FiniteNet& domain, Exec exec = Exec::Parallel);

struct Cocycle {
  GroupSpec source_group = GroupSpec::finite_cyclic(1), target_group = GroupSpec::finite_cyclic(1);
  std::vector<Word> gammas;  // ball(R) of the source group
  std::size_t n = 0;         // domain size
  std::vector<Word> delta;   // delta[g * n + y]
  std::vector<bool> constant;  // per gamma, observed on domain
  std::optional<std::vector<Word>> homomorphism;  // when every row is constant
  std::vector<Word> kernel;                       // gammas with delta = e (when constant)
  bool identity_holds = false;                    // all composable triples in the ball

  const Word& at(std::size_t g, std::size_t y) const { return delta[g * n + y]; }
};
// f maps src_dom indices to dst_dom indices. delta(g, y) is searched in the target ball
// of radius R_target. Throws OrbitPreservationError when f(g y) is outside the target orbit
// of f(y), DegenerateActionError when the solution is not unique.
Cocycle extract_cocycle(const ActionSystem& src, const FiniteNet& src_dom, const ActionSystem& dst,
                        const FiniteNet& dst_dom, const std::vector<std::size_t>& f,
                        std::uint64_t R, std::uint64_t R_target);
// delta(g2, g1 y) delta(g1, y) = delta(g2 g1, y); g2 g1 must lie in the ball.
bool cocycle_identity_holds(const Cocycle& c, const ActionSystem& src, const FiniteNet& src_dom,
                            std::size_t g1, std::size_t g2, std::size_t y);
void write_cocycle_csv(const Cocycle& c, const FiniteNet& src_dom, std::ostream& out);

}  // namespace warpcone
