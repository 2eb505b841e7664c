#include "warpcone/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "warpcone/errors.hpp"

namespace warpcone {

using nlohmann::json;

namespace {

std::string str(const Rational& x) { return to_string(x); }
std::string str(const BigInt& x) { return to_string(x); }
std::string str(bool b) { return b ? "true" : "false"; }
std::string str(std::size_t n) { return std::to_string(n); }

ActionSystem rotation_system(const Rational& alpha, const FiniteNet& dom) {
  ActionSystem sys(GroupSpec::free_abelian(1), dom, {GeneratorMap::rotation({alpha})});
  sys.verify_isometric(dom);
  return sys;
}

std::int64_t small(const BigInt& x, const char* what) {
  if (x <= 0 || x > BigInt(1) << 40) throw CapacityError(std::string(what) + " is out of range", 1ull << 40);
  return to_int64(x);
}

std::optional<Rational> bi_lipschitz(const MetricMap& f, Exec exec) {
  DistortionOptions o;
  o.A_max = 0;
  o.codensity = false;
  o.exec = exec;
  return measure_distortion(f, o).C_at(0);
}

// Runs fn(i, exec) for every level; results stay in level order.
template <class T>
std::vector<T> for_levels(std::size_t count, std::size_t workers, const std::function<T(std::size_t, Exec)>& fn) {
  std::vector<std::optional<T>> out(count);
  std::vector<std::exception_ptr> err(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i, Exec::Parallel);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < count;) {
          try {
            out[i] = fn(i, Exec::Serial);
          } catch (...) {
            err[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : err)
      if (e) std::rethrow_exception(e);
  }
  std::vector<T> res;
  for (auto& o : out) res.push_back(std::move(*o));
  return res;
}

// ---------------------------------------------------------------- config access

class Params {
 public:
  Params(const std::string& preset, const json& user) : preset_(preset), j_(default_config(preset)) {
    if (user.is_null()) return;
    if (!user.is_object()) throw ConfigError(preset + ": config must be a JSON object");
    for (auto it = user.begin(); it != user.end(); ++it) {
      if (!j_.contains(it.key())) throw ConfigError(preset + ": unknown key \"" + it.key() + "\"");
      j_[it.key()] = it.value();
    }
  }
  const json& all() const { return j_; }
  const json& raw(const std::string& k) const { return j_.at(k); }

  Rational rational(const std::string& k) const { return rational_of(raw(k), k); }
  std::vector<Rational> rationals(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "expected an array");
    std::vector<Rational> out;
    for (auto& x : v) out.push_back(rational_of(x, k));
    return out;
  }
  std::uint64_t count(const std::string& k) const { return count_of(raw(k), k); }
  std::vector<std::uint64_t> counts(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "expected an array");
    std::vector<std::uint64_t> out;
    for (auto& x : v) out.push_back(count_of(x, k));
    return out;
  }

  Rational rational_of(const json& v, const std::string& k) const {
    try {
      if (v.is_number_integer()) return Rational(v.get<long long>());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const ValidationError& e) {
      fail(k, e.what());
    }
    fail(k, "expected an integer or a \"p/q\" string, got " + v.dump());
  }
  std::uint64_t count_of(const json& v, const std::string& k) const {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      fail(k, "expected a nonnegative integer, got " + v.dump());
    return v.get<std::uint64_t>();
  }
  [[noreturn]] void fail(const std::string& k, const std::string& why) const {
    throw ConfigError(preset_ + ": " + k + ": " + why);
  }

 private:
  std::string preset_;
  json j_;
};

// Positive, strictly increasing, nonempty.
void check_ladder(const std::vector<Rational>& v, const std::string& what) {
  if (v.empty()) throw ValidationError(what + " is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0) throw ValidationError(what + " must be positive");
    if (i && v[i] <= v[i - 1]) throw ValidationError(what + " must be increasing");
  }
}

std::vector<BigInt> integer_levels(const std::vector<Rational>& v, const std::string& what) {
  std::vector<BigInt> out;
  for (auto& x : v) {
    if (denom(x) != 1) throw ValidationError(what + " must be integers");
    out.push_back(numer(x));
  }
  return out;
}

// Levels from "levels", or t = q_i^2 from "indices" when "levels" is null.
std::vector<BigInt> square_ladder(const Params& P, const ContinuedFraction& cf) {
  std::vector<Rational> lv;
  if (!P.raw("levels").is_null()) {
    lv = P.rationals("levels");
  } else {
    auto idx = P.counts("indices");
    if (idx.empty()) throw ValidationError("level ladder is empty");
    std::size_t top = *std::max_element(idx.begin(), idx.end());
    if (top + 1 >= cf.depth()) throw ConfigError("indices exceed the continued-fraction depth");
    auto cv = convergents(cf, top);
    for (auto i : idx) lv.emplace_back(cv[i].q * cv[i].q);
  }
  check_ladder(lv, "level ladder");
  return integer_levels(lv, "levels");
}

void add(ExperimentReport& r, std::string level, std::string name, std::string measured, std::string bound,
         bool proven, bool pass) {
  r.windows.push_back({std::move(level), std::move(name), std::move(measured), std::move(bound),
                       proven ? "paper-bound" : "artifact-window", pass});
}

std::string opt_str(const std::optional<Rational>& x) { return x ? str(*x) : "inf"; }

// ---------------------------------------------------------------- presets

ExperimentReport run_thm_main(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  const auto cf = angle_from_json(P.raw("angle"), opt.depth);
  const BigInt A = numer(P.rational("A"));
  const Rational K = P.rational("K"), Cw = P.rational("C_window"), Aw = P.rational("A_window"),
                 Dw = P.rational("codensity_window");
  const auto ladder = square_ladder(P, cf);
  r.columns = {"t", "index", "q", "p", "l", "points", "C0", "K_gap_hi", "C", "A", "codensity", "C_at_A0"};
  auto res = for_levels<ThmMainLevel>(ladder.size(), opt.workers, [&](std::size_t i, Exec e) {
    return thm_main_level(cf, A, ladder[i], K, Cw, e, opt.cap);
  });
  for (const auto& L : res) {
    const std::string lv = "t=" + str(L.dec.t);
    r.rows.push_back({str(L.dec.t), str(L.dec.index), str(L.dec.q), str(L.dec.p), str(L.dec.l), str(L.points),
                      str(L.C0), str(L.K_gap.hi), str(L.composite.C), str(L.composite.A),
                      opt_str(L.composite.codensity), opt_str(L.C_at_A0)});
    add(r, lv, "level decomposition |q alpha - p| < (A+1)/l", str(L.dec.gap.hi), str(L.dec.bound), true,
        L.dec.certified);
    add(r, lv, "substitution bi-Lipschitz C0 <= K+1", str(L.C0), str(K + 1), true, L.substitution_ok);
    add(r, lv, "composite A at C=" + str(Cw), str(L.composite.A), "<= " + str(Aw), false, L.composite.A <= Aw);
    const bool dense = L.composite.codensity && *L.composite.codensity <= Dw;
    add(r, lv, "composite codensity", opt_str(L.composite.codensity), "<= " + str(Dw), false, dense);
    r.certificates["t=" + str(L.dec.t)] = {{"decomposition", to_json(L.dec)}, {"composite", to_json(L.composite)}};
  }
  return r;
}

ExperimentReport run_unbalanced(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  std::vector<std::vector<Rational>> tori;
  const json& tj = P.raw("tori");
  if (!tj.is_array()) P.fail("tori", "expected an array of scale pairs");
  for (auto& s : tj) {
    if (!s.is_array() || s.size() != 2) P.fail("tori", "expected scale pairs");
    tori.push_back({P.rational_of(s[0], "tori"), P.rational_of(s[1], "tori")});
  }
  std::vector<std::string> kind(tori.size(), "configured");
  std::vector<Rational> ratio(tori.size(), Rational(-1));
  if (!P.raw("angle").is_null()) {
    const auto cf = angle_from_json(P.raw("angle"), opt.depth);
    auto idx = P.counts("indices");
    std::size_t top = idx.empty() ? 0 : *std::max_element(idx.begin(), idx.end());
    if (top + 2 >= cf.depth()) throw ConfigError("indices exceed the continued-fraction depth");
    auto cv = convergents(cf, top + 1);
    for (auto i : idx) {
      const Rational a(cv[i + 1].q), b(cv[i].q);
      // unbalanced level and the square torus of the same diameter
      tori.push_back({a, b});
      kind.push_back("unbalanced i=" + std::to_string(i));
      ratio.push_back(b / a);
      tori.push_back({a, a});
      kind.push_back("square i=" + std::to_string(i));
      ratio.push_back(b / a);
    }
  }
  if (tori.empty()) throw ValidationError("level ladder is empty");
  const auto Ns = P.rationals("N");
  check_ladder(Ns, "N");
  const auto win = P.rationals("window");
  if (win.size() != 2 || win[0] > win[1]) P.fail("window", "expected [lo, hi]");
  r.columns = {"kind", "a", "b", "N", "points", "v_N", "v_N*N^2/area", "q_i*q_i+1/t_i^2"};
  struct Job {
    std::size_t torus;
    Rational N;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < tori.size(); ++k)
    for (auto& N : Ns) jobs.push_back({k, N});
  auto res = for_levels<TorusPacking>(jobs.size(), opt.workers, [&](std::size_t i, Exec e) {
    return torus_packing(tori[jobs[i].torus], jobs[i].N, e);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& T = res[i];
    const std::size_t k = jobs[i].torus;
    r.rows.push_back({kind[k], str(T.scales[0]), str(T.scales[1]), str(T.N), str(T.points), str(T.vN),
                      str(T.normalized), ratio[k] < 0 ? "" : str(ratio[k])});
    if (std::min(T.scales[0], T.scales[1]) >= 4 * T.N) {
      const std::string lv = kind[k] + " (" + str(T.scales[0]) + "," + str(T.scales[1]) + ") N=" + str(T.N);
      add(r, lv, "v_N N^2/area", str(T.normalized), "[" + str(win[0]) + ", " + str(win[1]) + "]", false,
          win[0] <= T.normalized && T.normalized <= win[1]);
    }
  }
  return r;
}

ExperimentReport run_dihedral(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  const auto cf = angle_from_json(P.raw("angle"), opt.depth);
  const BigInt A = numer(P.rational("A"));
  const auto ladder = square_ladder(P, cf);
  r.columns = {"t", "q", "p", "l", "points", "decomposition_exact", "C", "A", "orbit_diameter", "C0"};
  auto res = for_levels<DihedralLevel>(ladder.size(), opt.workers, [&](std::size_t i, Exec e) {
    return dihedral_level(cf, A, ladder[i], e, opt.cap);
  });
  for (const auto& L : res) {
    const std::string lv = "t=" + str(L.dec.t);
    const auto& Q = L.quotient;
    r.rows.push_back({str(L.dec.t), str(L.dec.q), str(L.dec.p), str(L.dec.l), str(L.points),
                      str(L.decomposition_exact), str(Q.report.C), str(Q.report.A), str(Q.orbit_diameter),
                      str(L.C0)});
    add(r, lv, "d_<eps,r> = (d_<eps>)_<r>", str(L.decomposition_exact), "true", true, L.decomposition_exact);
    add(r, lv, "quotient C", str(Q.report.C), "= 1", true, Q.report.C == 1);
    add(r, lv, "quotient A", str(Q.report.A), "<= " + str(Q.orbit_diameter), true,
        Q.report.A <= Q.orbit_diameter);
    r.certificates[lv] = {{"decomposition", to_json(L.dec)}, {"quotient", to_json(Q.report)}};
  }
  return r;
}

ExperimentReport run_higher_tori(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  const json& inst = P.raw("instances");
  if (!inst.is_array()) P.fail("instances", "expected an array");
  if (inst.empty()) throw ValidationError("level ladder is empty");
  struct Spec {
    std::size_t m, k;
    std::vector<BigInt> b;
    std::vector<std::vector<std::int64_t>> digits;
    Rational K, C;
    std::uint64_t R;
  };
  std::vector<Spec> specs;
  for (auto& x : inst) {
    if (!x.is_object()) P.fail("instances", "expected objects");
    try {
      Spec s;
      s.m = x.at("m").get<std::size_t>();
      s.k = x.at("k").get<std::size_t>();
      for (auto& v : x.at("b")) s.b.emplace_back(v.get<std::int64_t>());
      s.digits = x.at("digits").get<std::vector<std::vector<std::int64_t>>>();
      s.K = P.rational_of(x.at("K"), "instances.K");
      s.C = x.contains("C_window") ? P.rational_of(x.at("C_window"), "instances.C_window") : 3 * (s.K + 1);
      s.R = x.at("R_orbit").get<std::uint64_t>();
      specs.push_back(std::move(s));
    } catch (const json::exception& e) {
      P.fail("instances", e.what());
    }
  }
  const Rational Aw = P.rational("A_window");
  r.columns = {"m", "k", "b", "q", "l", "technical_ok", "orbit_points", "equivariant", "C", "A", "C_at_A0"};
  auto res = for_levels<HigherToriRun>(specs.size(), opt.workers, [&](std::size_t i, Exec e) {
    const auto& s = specs[i];
    return higher_tori_run(s.m, s.b, s.digits, s.k, s.K, s.R, s.C, e, opt.cap);
  });
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& H = res[i];
    std::string bs;
    for (auto& v : H.ht.b) bs += (bs.empty() ? "" : " ") + str(v);
    const std::string lv = "m=" + str(H.ht.m) + " k=" + str(H.ht.k) + " b=(" + bs + ")";
    r.rows.push_back({str(H.ht.m), str(H.ht.k), bs, str(H.ht.q), str(H.ht.l), str(H.cert.ok), str(H.orbit_points),
                      str(H.equivariant), str(H.iota.C), str(H.iota.A), H.cert.ok ? opt_str(H.C_at_A0) : ""});
    add(r, lv, "D_{i,n} largest power of b_i bounded by 2^(m^(2n))", str(H.D_rule), "true", true, H.D_rule);
    add(r, lv, "technical conditions with K=" + str(specs[i].K), str(H.cert.ok), "true", true, H.cert.ok);
    if (H.cert.ok)
      add(r, lv, "iota A at C=" + str(specs[i].C), str(H.iota.A), "<= " + str(Aw), false, H.iota.A <= Aw);
    json c = {{"construction", to_json(H.ht)}, {"technical", to_json(H.cert)}};
    if (H.cert.ok) c["iota"] = to_json(H.iota);
    r.certificates[lv] = c;
  }
  return r;
}

ExperimentReport run_faithfulness(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  const json& cases = P.raw("cases");
  if (!cases.is_array()) P.fail("cases", "expected an array");
  struct Job {
    Rational alpha, t;
    std::int64_t res;
    std::uint64_t probe;
    std::optional<std::uint64_t> below, at_least;
  };
  std::vector<Job> jobs;
  for (auto& c : cases) {
    if (!c.is_object()) P.fail("cases", "expected objects");
    Rational alpha;
    const json& a = c.value("angle", json());
    if (a.is_object() && a.contains("golden_convergent_min_q")) {
      const BigInt min_q(P.count_of(a.at("golden_convergent_min_q"), "cases.angle"));
      auto cf = golden_cf(opt.depth);
      auto cv = convergents(cf, cf.depth() - 1);
      auto it = std::find_if(cv.begin(), cv.end(), [&](const Convergent& x) { return x.q >= min_q; });
      if (it == cv.end()) throw ConfigError("no golden convergent reaches the requested q; raise --depth");
      alpha = it->value();
    } else {
      alpha = P.rational_of(a, "cases.angle");
    }
    alpha = mod1(alpha);
    const std::int64_t q = small(denom(alpha), "angle denominator");
    const std::int64_t res = c.contains("resolution") ? static_cast<std::int64_t>(P.count_of(c["resolution"], "cases.resolution")) : q;
    if (res <= 0 || res % q) throw ValidationError("resolution must be a positive multiple of the angle denominator");
    const std::uint64_t probe = P.count_of(c.value("probe", json(3)), "cases.probe");
    if (probe < 2) throw ValidationError("probe radius must be at least 2");
    std::vector<Rational> lv;
    if (!c.contains("levels") || !c["levels"].is_array()) P.fail("cases.levels", "expected an array");
    for (auto& t : c["levels"]) lv.push_back(t == "q" ? Rational(q) : P.rational_of(t, "cases.levels"));
    check_ladder(lv, "level ladder");
    for (auto& t : lv) {
      Job j{alpha, t, res, probe, {}, {}};
      if (c.contains("radius_below")) j.below = P.count_of(c["radius_below"], "cases.radius_below");
      if (c.contains("radius_at_least")) j.at_least = P.count_of(c["radius_at_least"], "cases.radius_at_least");
      jobs.push_back(j);
    }
  }
  if (jobs.empty()) throw ValidationError("level ladder is empty");
  r.columns = {"alpha", "t", "points", "probe", "radius", "witness_a", "witness_b", "violation_level"};
  auto res = for_levels<FaithfulnessLevel>(jobs.size(), opt.workers, [&](std::size_t i, Exec e) {
    return faithfulness_level(jobs[i].alpha, jobs[i].t, jobs[i].res, jobs[i].probe, e);
  });
  auto cp = [](const std::optional<CoveringPoint>& p, const FiniteNet& dom) -> std::string {
    if (!p) return "";
    return "(" + to_string(p->gamma, GroupSpec::free_abelian(1)) + ";" + dom.label(p->y) + ")";
  };
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& F = res[i];
    const auto& J = jobs[i];
    const FiniteNet dom = circle_net(J.res);
    const std::string lv = "alpha=" + str(F.alpha) + " t=" + str(F.t);
    r.rows.push_back({str(F.alpha), str(F.t), str(dom.size()), std::to_string(F.report.probe),
                      std::to_string(F.report.radius), cp(F.report.witness_a, dom), cp(F.report.witness_b, dom),
                      F.report.witness_a ? str(F.report.violation_level) : ""});
    if (J.below) {
      add(r, lv, "faithfulness radius", std::to_string(F.report.radius), "< " + std::to_string(*J.below), true,
          F.report.radius < *J.below);
      add(r, lv, "(2,y),(-1,y) violates faithfulness", str(F.witness_violates), "true", true, F.witness_violates);
    }
    if (J.at_least)
      add(r, lv, "faithfulness radius", std::to_string(F.report.radius), ">= " + std::to_string(*J.at_least), false,
          F.report.radius >= *J.at_least);
  }
  return r;
}

ExperimentReport run_ultrametric(const Params& P, const RunOptions& opt) {
  ExperimentReport r;
  const auto counts = P.counts("orders");
  std::vector<std::int64_t> orders(counts.begin(), counts.end());
  const auto weights = P.rationals("weights");
  const auto levels = P.rationals("levels");
  check_ladder(levels, "level ladder");
  const auto factors = P.rationals("R_factors");
  check_ladder(factors, "R_factors");
  struct Job {
    Rational t, R;
  };
  std::vector<Job> jobs;
  for (auto& t : levels)
    for (auto& f : factors) jobs.push_back({t, f * t});
  r.columns = {"t", "R", "components", "max_diameter", "cover_S", "cover_found"};
  auto res = for_levels<UltrametricLevel>(jobs.size(), opt.workers, [&](std::size_t i, Exec e) {
    return ultrametric_level(orders, weights, jobs[i].t, jobs[i].R, e);
  });
  for (const auto& U : res) {
    const std::string lv = "t=" + str(U.t) + " R=" + str(U.R);
    const Rational D = U.components.max_diameter();
    r.rows.push_back({str(U.t), str(U.R), str(U.components.parts.size()), str(D), str(U.cover.best.S),
                      str(U.cover.found)});
    add(r, lv, "max R-component diameter", str(D), "< " + str(U.R), true, D < U.R);
    add(r, lv, "d=0 cover S", str(U.cover.best.S), "< " + str(U.R), false, U.cover.found && U.cover.best.S < U.R);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------- report

bool ExperimentReport::passed() const {
  return std::all_of(windows.begin(), windows.end(), [](const Window& w) { return w.pass; });
}

std::string ExperimentReport::csv() const {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << field(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << field(row[i]);
    out << '\n';
  }
  return out.str();
}

json ExperimentReport::to_json() const {
  json w = json::array();
  for (const auto& x : windows)
    w.push_back({{"level", x.level}, {"name", x.name}, {"measured", x.measured}, {"bound", x.bound},
                 {"source", x.source}, {"pass", x.pass}});
  return {{"preset", preset}, {"config", config}, {"windows", w}, {"certificates", certificates}, {"pass", passed()}};
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"thm-main",     "unbalanced",       "dihedral",
                                              "higher-tori",  "faithfulness",     "ultrametric-asdim"};
  return names;
}

json default_config(const std::string& preset) {
  if (preset == "thm-main")
    return {{"angle", "golden"}, {"A", 1}, {"K", 1}, {"indices", {3, 4, 5, 6, 7, 8}}, {"levels", nullptr},
            {"C_window", 6}, {"A_window", 1}, {"codensity_window", 1}};
  if (preset == "unbalanced")
    return {{"tori", {{16, 160}, {32, 320}, {64, 640}}},
            {"N", {1, 2, 4}},
            {"window", {"1/8", 8}},
            {"angle", {{"cf", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}}},
            {"indices", {2, 3}}};
  if (preset == "dihedral") return {{"angle", "golden"}, {"A", 1}, {"indices", {3, 4, 5, 6}}, {"levels", nullptr}};
  if (preset == "higher-tori")
    return {{"instances",
             {{{"m", 2}, {"b", {3, 5}}, {"k", 2}, {"digits", {{1, 1}, {1, 1}}}, {"K", 50}, {"R_orbit", 70}},
              {{"m", 3}, {"b", {3, 5, 7}}, {"k", 1}, {"digits", {{1}, {1}, {1}}}, {"K", 98}, {"R_orbit", 12}}}},
            {"A_window", 2}};
  if (preset == "faithfulness")
    return {{"cases",
             {{{"angle", "1/3"}, {"levels", {10, 100, 1000}}, {"resolution", 30}, {"probe", 3}, {"radius_below", 2}},
              {{"angle", {{"golden_convergent_min_q", 4181}}},
               {"levels", {"q"}},
               {"probe", 5},
               {"radius_at_least", 5}}}}};
  if (preset == "ultrametric-asdim")
    return {{"orders", {2, 4, 8}},
            {"weights", {"1/3", "1/9", "1/27"}},
            {"levels", {1, 3, 9, 27, 81, 243, 729}},
            {"R_factors", {"1/100", "1/54", "1/27", "1/20", "1/18", "1/9", "1/6", "1/4", "1/3", "1/2", 1, 2}}};
  throw ConfigError("unknown preset \"" + preset + "\"");
}

ExperimentReport run_preset(const std::string& preset, const json& config, const RunOptions& opt) {
  Params P(preset, config);
  ExperimentReport r;
  try {
    if (preset == "thm-main") r = run_thm_main(P, opt);
    else if (preset == "unbalanced") r = run_unbalanced(P, opt);
    else if (preset == "dihedral") r = run_dihedral(P, opt);
    else if (preset == "higher-tori") r = run_higher_tori(P, opt);
    else if (preset == "faithfulness") r = run_faithfulness(P, opt);
    else r = run_ultrametric(P, opt);
  } catch (const json::exception& e) {
    throw ConfigError(preset + ": " + e.what());
  }
  r.preset = preset;
  r.config = P.all();
  return r;
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / r.preset;
  std::ofstream csv(base.string() + ".csv", std::ios::binary);
  csv << r.csv();
  std::ofstream js(base.string() + ".json", std::ios::binary);
  js << r.to_json().dump(2) << '\n';
  if (!csv || !js) throw ConfigError("cannot write the report under " + dir);
}

// ---------------------------------------------------------------- pipelines

ContinuedFraction angle_from_json(const json& j, std::size_t depth) {
  if (j.is_string()) {
    if (j.get<std::string>() == "golden") return golden_cf(depth);
    try {
      return expand(parse_rational(j.get<std::string>()));
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("angle: ") + e.what());
    }
  }
  if (j.is_object() && j.contains("cf") && j["cf"].is_array()) {
    std::vector<BigInt> a;
    for (auto& v : j["cf"]) {
      if (!v.is_number_integer()) throw ConfigError("angle: partial quotients must be integers");
      a.emplace_back(v.get<std::int64_t>());
    }
    try {
      if (j.value("terminal", false)) return expand(truncated(a).truncation());
      return truncated(std::move(a));
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("angle: ") + e.what());
    }
  }
  throw ConfigError("angle: expected \"golden\", \"p/q\" or {\"cf\": [...]}");
}

ThmMainLevel thm_main_level(const ContinuedFraction& cf, const BigInt& A, const BigInt& t, const Rational& K,
                            const Rational& C, Exec exec, std::size_t cap) {
  ThmMainLevel out;
  out.dec = level_decomposition(cf, A, t);
  const BigInt& q = out.dec.q;
  const BigInt& p = out.dec.p;
  const Rational& l = out.dec.l;
  FiniteNet dom = circle_net(small(q * ceil(l), "domain size"));
  out.points = dom.size();
  const Rational beta(p, q);
  auto sa = rotation_system(cf.truncation(), dom);
  auto sb = rotation_system(beta, dom);
  auto la = warped_closed_form_level(sa, Rational(t), dom, cap);
  auto lb = warped_closed_form_level(sb, Rational(t), dom, cap);
  const std::vector<Interval> alpha{cf.value_interval()};
  DistortionOptions so;
  so.exec = exec;
  auto sub = substitute_angle(la, lb, alpha, {p}, q, l, K, so);
  out.C0 = sub.C0;
  out.K_gap = sub.K_gap;
  out.substitution_ok = !sub.flagged;

  auto cert = verify_technical_conditions(q, {p}, alpha, l, K);
  auto io = build_iota(cert, q, {p}, l, sb, lb);
  // integer grid of the torus next to the image
  std::set<Point> pts(io.target.points().begin(), io.target.points().end());
  const auto& sc = io.target.scales();
  const std::int64_t g0 = small(ceil(sc[0]), "grid"), g1 = small(ceil(sc[1]), "grid");
  for (std::int64_t a = 0; a < g0; ++a)
    for (std::int64_t b = 0; b < g1; ++b) pts.insert({Rational(a, g0), Rational(b, g1)});
  FiniteNet target = FiniteNet::torus({pts.begin(), pts.end()}, sc, TorusNorm::L1);
  out.target_points = target.size();
  MetricMap f = compose(sub.map, io.map);
  MetricMap g{f.source, share(target), {}};
  for (auto a : f.assign) g.assign.push_back(*target.index_of(io.target.point(a)));
  DistortionOptions o;
  o.fixed_C = C;
  o.exec = exec;
  out.composite = measure_distortion(g, o);
  out.C_at_A0 = bi_lipschitz(g, exec);
  return out;
}

DihedralLevel dihedral_level(const ContinuedFraction& cf, const BigInt& A, const BigInt& t, Exec exec,
                             std::size_t cap) {
  DihedralLevel out;
  out.dec = level_decomposition(cf, A, t);
  const Rational beta(out.dec.p, out.dec.q);
  FiniteNet dom = circle_net(small(out.dec.q * ceil(out.dec.l), "domain size"));
  out.points = dom.size();
  const Rational T(t);
  const auto marking = DihedralMarking::RotationReflection;
  ActionSystem D(GroupSpec::infinite_dihedral(marking), dom,
                 {GeneratorMap::rotation({beta}), GeneratorMap::reflection({Rational(0)})});
  D.verify_isometric(dom);
  auto full = warped_closed_form_level(D, T, dom, cap);

  auto E = rotation_system(beta, dom);
  auto le = warped_closed_form_level(E, T, dom, cap);
  std::vector<std::string> labels;
  std::vector<std::size_t> flip;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    labels.push_back(dom.label(i));
    flip.push_back(*dom.index_of({mod1(-dom.point(i)[0])}));
  }
  FiniteNet enet = FiniteNet::explicit_matrix(labels, le.table(exec));
  ActionSystem R(GroupSpec::finite_cyclic(2), enet, {GeneratorMap::permutation(flip)});
  R.verify_isometric(enet);
  auto ler = warped_closed_form_level(R, 1, enet, cap);
  out.decomposition_exact = full.table(exec) == ler.table(exec);
  out.quotient = quotient_map(R, 0, 1, enet, exec);

  ActionSystem Da(GroupSpec::infinite_dihedral(marking), dom,
                  {GeneratorMap::rotation({cf.truncation()}), GeneratorMap::reflection({Rational(0)})});
  Da.verify_isometric(dom);
  auto la = warped_closed_form_level(Da, T, dom, cap);
  MetricMap id{share(la), share(full), {}};
  for (std::size_t i = 0; i < dom.size(); ++i) id.assign.push_back(i);
  DistortionOptions o;
  o.codensity = false;
  o.exec = exec;
  auto rep = measure_distortion(id, o);
  out.C0 = rep.C_at(0).value_or(Rational(-1));
  return out;
}

HigherToriRun higher_tori_run(std::size_t m, const std::vector<BigInt>& b,
                              const std::vector<std::vector<std::int64_t>>& digits, std::size_t k,
                              const Rational& K, std::uint64_t R_orbit, const Rational& C, Exec exec,
                              std::size_t cap) {
  HigherToriRun out;
  out.ht = higher_tori_alpha(m, b, digits, k);
  out.D_rule = true;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t n = 1; n <= k; ++n) {
      std::uint64_t bits = 1;
      for (std::size_t e = 0; e < 2 * n; ++e) bits *= m;
      const BigInt lim = BigInt(1) << bits;
      BigInt P = 1;
      while (P * b[i] <= lim) P *= b[i];
      if (out.ht.D[i][n - 1] != P) out.D_rule = false;
    }
  std::vector<Interval> alpha;
  for (std::size_t i = 0; i < m; ++i)
    alpha.push_back({out.ht.beta[i] - out.ht.error_bound[i], out.ht.beta[i] + out.ht.error_bound[i]});
  const Rational l(out.ht.l);
  out.cert = verify_technical_conditions(out.ht.q, out.ht.p, alpha, l, K);
  if (!out.cert.ok) return out;

  FiniteNet space = circle_net(1);
  std::vector<GeneratorMap> maps;
  for (std::size_t i = 0; i < m; ++i) maps.push_back(GeneratorMap::rotation({Rational(out.ht.p[i], out.ht.q)}));
  ActionSystem sys(GroupSpec::free_abelian(m), space, maps);
  sys.verify_isometric(space);
  auto level = orbit_net_level(sys, l * Rational(out.ht.q), {{Rational(0)}}, R_orbit, cap);
  out.orbit_points = level.size();
  auto io = build_iota(out.cert, out.ht.q, out.ht.p, l, sys, level);
  out.equivariant = io.equivariant;
  DistortionOptions o;
  o.fixed_C = C;
  o.codensity = false;
  o.exec = exec;
  out.iota = measure_distortion(io.map, o);
  out.C_at_A0 = bi_lipschitz(io.map, exec);
  return out;
}

FaithfulnessLevel faithfulness_level(const Rational& alpha, const Rational& t, std::int64_t resolution,
                                     std::uint64_t probe, Exec exec) {
  FaithfulnessLevel out{alpha, t, {}, false};
  FiniteNet dom = circle_net(resolution);
  auto sys = rotation_system(alpha, dom);
  auto lv = warped_closed_form_level(sys, t, dom);
  auto cov = covering_level(sys, t, dom, probe);
  out.report = faithfulness_radius(cov, lv, probe, exec);
  out.witness_violates = is_faithfulness_violation(cov, lv, {Word{{2}}, 0}, {Word{{-1}}, 0});
  return out;
}

UltrametricLevel ultrametric_level(const std::vector<std::int64_t>& orders, const std::vector<Rational>& weights,
                                   const Rational& t, const Rational& R, Exec exec) {
  FiniteNet net = scale(ultrametric_chain(orders, weights), t);
  UltrametricLevel out{t, R, r_components(net, R, exec), {}};
  out.cover = asdim_cover_search(net, R, 0, 10, R);
  return out;
}

TorusPacking torus_packing(const std::vector<Rational>& scales, const Rational& N, Exec exec) {
  std::vector<TorusFactor> f;
  Rational area = 1;
  for (auto& s : scales) {
    if (s <= 0) throw ValidationError("torus scales must be positive");
    f.push_back({circle_net(small(ceil(s), "torus resolution")), s});
    area *= s;
  }
  FiniteNet net = torus_product(f);
  auto v = vn_invariant(net, N, 0, exec);
  TorusPacking out{scales, N, net.size(), v.greedy.size(), {}};
  out.normalized = Rational(static_cast<long>(out.vN)) * N * N / area;
  return out;
}

}  // namespace warpcone
