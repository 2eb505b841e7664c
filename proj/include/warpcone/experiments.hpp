#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcone/contfrac.hpp"
#include "warpcone/qimaps.hpp"
#include "warpcone/scaleinv.hpp"

namespace warpcone {

struct RunOptions {
  std::size_t depth = 64;             // continued-fraction depth for irrational angles
  std::size_t cap = kDefaultBallCap;  // group ball cap
  std::size_t workers = 1;            // levels evaluated concurrently
};

// A numeric check with its origin: "paper-bound" or "artifact-window".
struct Window {
  std::string level;
  std::string name;
  std::string measured;
  std::string bound;
  std::string source;
  bool pass = false;
};

struct ExperimentReport {
  std::string preset;
  nlohmann::json config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Window> windows;
  nlohmann::json certificates = nlohmann::json::object();

  bool passed() const;
  std::string csv() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& preset_names();
nlohmann::json default_config(const std::string& preset);
// Missing keys take their defaults; unknown keys and malformed values throw ConfigError,
// an empty level ladder throws ValidationError.
ExperimentReport run_preset(const std::string& preset, const nlohmann::json& config,
                            const RunOptions& opt = {});
// <dir>/<preset>.csv and <dir>/<preset>.json
void write_report(const ExperimentReport& r, const std::string& dir);

// ---------------------------------------------------------------- pipelines

// "golden", "p/q", {"cf": [a0, a1, ...]} or {"cf": [...], "terminal": true}
ContinuedFraction angle_from_json(const nlohmann::json& j, std::size_t depth);

struct ThmMainLevel {
  LevelDecomposition dec;
  std::size_t points = 0;
  Rational C0;                // substitution, bi-Lipschitz
  Interval K_gap;
  bool substitution_ok = false;
  DistortionReport composite;  // substitution then iota, C fixed
  std::optional<Rational> C_at_A0;
  std::size_t target_points = 0;
};
// Warped circle level t of the angle -> level of p/q -> l1 torus (l, q), with the torus
// target extended by its integer grid for the codensity.
ThmMainLevel thm_main_level(const ContinuedFraction& cf, const BigInt& A, const BigInt& t,
                            const Rational& K, const Rational& C, Exec exec,
                            std::size_t cap = kDefaultBallCap);

struct DihedralLevel {
  LevelDecomposition dec;
  std::size_t points = 0;
  bool decomposition_exact = false;  // d_<eps,r> = (d_<eps>)_<r> on all pairs
  QuotientResult quotient;           // by the reflection
  Rational C0;                       // alpha vs p/q dihedral levels, identity on points
};
DihedralLevel dihedral_level(const ContinuedFraction& cf, const BigInt& A, const BigInt& t,
                             Exec exec, std::size_t cap = kDefaultBallCap);

struct HigherToriRun {
  HigherTori ht;
  bool D_rule = false;  // D_{i,n} against repeated multiplication
  TechnicalReport cert;
  std::size_t orbit_points = 0;
  bool equivariant = false;
  DistortionReport iota;  // C fixed, no codensity
  std::optional<Rational> C_at_A0;
};
HigherToriRun higher_tori_run(std::size_t m, const std::vector<BigInt>& b,
                              const std::vector<std::vector<std::int64_t>>& digits, std::size_t k,
                              const Rational& K, std::uint64_t R_orbit, const Rational& C,
                              Exec exec, std::size_t cap = kDefaultBallCap);

struct FaithfulnessLevel {
  Rational alpha;
  Rational t;
  FaithfulnessReport report;
  bool witness_violates = false;  // (2, y), (-1, y) with y the first domain point
};
FaithfulnessLevel faithfulness_level(const Rational& alpha, const Rational& t,
                                     std::int64_t resolution, std::uint64_t probe, Exec exec);

struct UltrametricLevel {
  Rational t, R;
  ComponentDecomposition components;
  CoverSearch cover;
};
UltrametricLevel ultrametric_level(const std::vector<std::int64_t>& orders,
                                   const std::vector<Rational>& weights, const Rational& t,
                                   const Rational& R, Exec exec);

// Greedy v_N on the l1 torus with the given scales, at unit resolution.
struct TorusPacking {
  std::vector<Rational> scales;
  Rational N;
  std::size_t points = 0;
  std::size_t vN = 0;
  Rational normalized;  // v_N N^2 / area
};
TorusPacking torus_packing(const std::vector<Rational>& scales, const Rational& N, Exec exec);

}  // namespace warpcone
