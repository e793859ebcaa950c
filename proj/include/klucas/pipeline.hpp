#pragma once

// End-to-end run: base search, the n <= k case, bound chain per k, small-k
// reductions, verification under the reduced caps, and the k > 500 branch.
// Everything lands in one canonical JSON bundle that can be resumed.

#include <gmpxx.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "klucas/algebraic.hpp"
#include "klucas/certificate.hpp"
#include "klucas/error.hpp"
#include "klucas/linforms.hpp"
#include "klucas/parallel.hpp"
#include "klucas/reduction.hpp"
#include "klucas/search.hpp"

namespace klucas {

using Json = nlohmann::json;

inline constexpr const char* kBundleSchema = "klucas.bundle/1";

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages = {"base_search",       "case_n_le_k",  "bound_chain",
                                                  "small_k_reduction", "verification", "large_k"};
  return stages;
}

struct PipelineConfig {
  long precision = kDefaultPrecision;  // digits for the recorded root enclosures
  int k_min = 3;
  int k_small_max = 50;
  long mp_bound = 500;
  long large_k_floor = 500;
  std::string lattice_c = "auto";  // or a decimal constant such as 5e150

  void validate() const {
    if (precision < kMinPrecision) throw UsageError("precision must be at least " + std::to_string(kMinPrecision));
    if (k_min < 3) throw UsageError("k_min must be at least 3");
    if (k_small_max < k_min) throw UsageError("k_max must be at least k_min");
    if (k_small_max > large_k_floor) throw UsageError("k_max must not exceed the large-k floor");
    if (large_k_floor < 500) throw UsageError("the large-k floor must be at least 500");
    if (mp_bound < 1) throw UsageError("mp bound must be positive");
    if (lattice_c != "auto") {
      mpq_class c;
      try {
        c = parse_rational(lattice_c);
      } catch (const DomainError&) {
        throw UsageError("lattice constant must be 'auto' or a positive integer");
      }
      if (c.get_den() != 1 || c <= 0) throw UsageError("lattice constant must be 'auto' or a positive integer");
    }
  }

  Json to_json() const {
    return {{"precision", precision}, {"k_min", k_min},         {"k_max", k_small_max},
            {"mp_bound", mp_bound},   {"large_k_floor", large_k_floor}, {"lattice_c", lattice_c}};
  }

  static PipelineConfig from_json(const Json& j) {
    PipelineConfig c;
    c.precision = j.at("precision").get<long>();
    c.k_min = j.at("k_min").get<int>();
    c.k_small_max = j.at("k_max").get<int>();
    c.mp_bound = j.at("mp_bound").get<long>();
    c.large_k_floor = j.at("large_k_floor").get<long>();
    c.lattice_c = j.at("lattice_c").get<std::string>();
    return c;
  }
};

// ---------------------------------------------------------------------------
// JSON helpers

inline Json to_json(const SolutionRecord& s) {
  return {{"k", s.k},           {"n", s.n},           {"m", s.m},          {"p", s.p}, {"d", s.d},
          {"l_n", s.l_n.get_str()}, {"l_m", s.l_m.get_str()}, {"l_p", s.l_p.get_str()}};
}

inline Json solutions_json(const std::vector<SolutionRecord>& sols) {
  Json a = Json::array();
  for (const auto& s : sols) a.push_back(to_json(s));
  return a;
}

/// The solutions in [k_min, k_max] listed by the main theorem (k >= 3):
/// L_4 = 12 for k >= 4 and L_5 = 22 for k = 4.
inline std::set<std::tuple<int, long, long, long>> theorem_solutions(int k_min, int k_max) {
  std::set<std::tuple<int, long, long, long>> out;
  for (int k = std::max(k_min, 4); k <= k_max; ++k) out.insert({k, 4, 1, 0});
  if (k_min <= 4 && k_max >= 4) out.insert({4, 5, 0, 0});
  return out;
}

inline std::set<std::tuple<int, long, long, long>> solution_keys(const Json& sols) {
  std::set<std::tuple<int, long, long, long>> out;
  for (const auto& s : sols) {
    out.insert({s.at("k").get<int>(), s.at("n").get<long>(), s.at("m").get<long>(), s.at("p").get<long>()});
  }
  return out;
}

inline Json certificates_json(const std::vector<BoundCertificate>& certs, const std::string& scope) {
  Json a = Json::array();
  for (const auto& c : certs) {
    Json j = to_json(c);
    j["scope"] = scope;
    a.push_back(std::move(j));
  }
  return a;
}

inline std::string integer_str(long v) { return std::to_string(v); }

/// Certificate for an integer bound "X < value".
inline BoundCertificate integer_certificate(std::string name, std::string statement, long value, std::string paper,
                                            std::vector<std::string> chain = {}) {
  return make_certificate(std::move(name), std::move(statement), Interval::exact(value, kBoundBits), std::move(paper),
                          std::move(chain));
}

/// Power of ten written as 1eN when C is one, otherwise in full.
inline std::string constant_str(const mpz_class& C) {
  std::string s = C.get_str();
  if (s.size() > 1 && s[0] == '1' && s.find_first_not_of('0', 1) == std::string::npos) {
    return "1e" + std::to_string(s.size() - 1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// stages

namespace detail {

inline Json stage_base_search(const PipelineConfig& cfg) {
  SearchSpec spec;
  spec.k_min = cfg.k_min;
  spec.k_max = cfg.k_small_max;
  spec.mp_bound = cfg.mp_bound;
  SearchStats stats;
  auto sols = search(spec, &stats);
  Json j;
  j["solutions"] = solutions_json(sols);
  j["stats"] = {{"candidates", stats.candidates},
                {"pruned_digits", stats.pruned_digits},
                {"pruned_modular", stats.pruned_modular},
                {"exact_checks", stats.exact_checks}};
  j["match"] = solution_keys(j["solutions"]) == theorem_solutions(cfg.k_min, cfg.k_small_max);
  return j;
}

inline Json stage_case_n_le_k(const PipelineConfig& cfg) {
  auto bf = verify_case_n_le_k(1000, 1000);
  Json pairs = Json::array();
  for (const auto& [a, d] : bf) pairs.push_back({a, d});
  long regime = count_power_regime_solutions(cfg.k_small_max);
  Json j;
  j["brute_force"] = {{"a_max", 1000}, {"d_max", 1000}, {"solutions", pairs}};
  j["power_regime_solutions"] = regime;
  j["k_max"] = cfg.k_small_max;
  j["ok"] = bf.empty() && regime == 0;
  return j;
}

inline Json stage_bound_chain_k(const PipelineConfig& cfg, int k) {
  RootContext rc = make_root_context(k, cfg.precision);
  auto certs = derive_bound_chain(static_cast<long>(k));
  Json j;
  j["k"] = k;
  j["alpha"] = rc.alpha.str(40);
  j["fk_alpha"] = rc.fk_alpha.str(40);
  j["log_alpha"] = rc.log_alpha.str(40);
  j["precision"] = cfg.precision;
  j["n_bound"] = final_n_bound(Interval::exact(k, kBoundBits)).upper_str(12);
  j["certificates"] = certificates_json(certs, "k=" + std::to_string(k));
  return j;
}

inline Json stage_small_k(const PipelineConfig& cfg, int k) {
  Interval N = final_n_bound(Interval::exact(k, kBoundBits));
  AmaxReduction amax = cf_amax_reduction(k, N);
  mpz_class C = cfg.lattice_c == "auto" ? mpz_class(0) : parse_rational(cfg.lattice_c).get_num();
  A1Sweep sweep = lll_a1_sweep(k, N, amax.np_max, C);

  std::vector<BoundCertificate> certs;
  auto c1 = integer_certificate("cf_amax_n_minus_p", "n - p < X", amax.np_max + 1, "181");
  c1.inputs = {{"k", std::to_string(k)},
               {"N", N.upper_str(12)},
               {"index", std::to_string(amax.index)},
               {"a_max", amax.a_max.get_str()},
               {"legendre_side", amax.legendre_side.upper_str(12)},
               {"plain_side", amax.plain_side.upper_str(12)},
               {"threshold", std::to_string(amax.threshold)}};
  c1.notes.push_back("branch constants 106 (a_max + 2) and 212; 106 needs alpha^(n-p) >= 210");
  certs.push_back(c1);
  auto c2 = integer_certificate("m_bound", "m < X", amax.np_max + 2, "183", {"cf_amax_n_minus_p"});
  c2.inputs["k"] = std::to_string(k);
  c2.notes.push_back("m < n - p + 2 from m + p - 2 < n");
  certs.push_back(c2);
  auto c3 = make_certificate("lll_a1_n_minus_1", "n - 1 <= X", sweep.H_max, "343", {"m_bound"});
  c3.inputs = {{"k", std::to_string(k)},
               {"C", constant_str(sweep.C)},
               {"X", N.upper_str(12)},
               {"lattices", std::to_string(sweep.lattices)},
               {"retries", std::to_string(sweep.retries)},
               {"worst_n_minus_p", std::to_string(sweep.worst_j)},
               {"worst_m", std::to_string(sweep.worst_m)},
               {"delta_min", sweep.delta_min.lower_str(12)},
               {"c3", "28"},
               {"c4", "log alpha"}};
  c3.notes.push_back("S = 2 X^2, T = (1 + 2X + 1)/2 for coefficients (n - 1, d, 1)");
  certs.push_back(c3);
  check_chain(certs);

  Json j;
  j["k"] = k;
  j["np_max"] = amax.np_max;
  j["n_cap"] = sweep.n_cap;
  j["small_n"] = sweep.small_n;
  j["certificates"] = certificates_json(certs, "k=" + std::to_string(k));
  return j;
}

inline Json stage_verification(const PipelineConfig& cfg, const Json& small_k) {
  VerifySpec spec;
  spec.k_min = cfg.k_min;
  spec.k_max = cfg.k_small_max;
  spec.n_min = 4;
  for (const auto& e : small_k.at("per_k")) spec.n_cap[e.at("k").get<int>()] = e.at("n_cap").get<long>();
  long top = 0;
  for (const auto& [k, cap] : spec.n_cap) top = std::max(top, cap);
  spec.n_max = top;
  VerifyReport rep = verify_theorem(spec);
  Json caps = Json::array();
  for (const auto& [k, cap] : spec.n_cap) caps.push_back({{"k", k}, {"n_cap", cap}});
  Json j;
  j["n_caps"] = caps;
  j["solutions"] = solutions_json(rep.solutions);
  j["pairs"] = rep.pairs;
  j["pruned_digit_bound"] = rep.pruned_digit_bound;
  j["pruned_divisibility"] = rep.pruned_divisibility;
  j["pruned_lookup"] = rep.pruned_lookup;
  j["match"] = solution_keys(j["solutions"]) == theorem_solutions(cfg.k_min, cfg.k_small_max);
  return j;
}

inline BoundCertificate mark(BoundCertificate c, Verdict v, const std::string& note) {
  c.verdict = v;
  c.notes.push_back(note);
  return c;
}

inline Json stage_large_k(const PipelineConfig& cfg) {
  const Bits bits = kBoundBits;
  std::vector<BoundCertificate> certs;
  LemmaPResult lp = derive_lemma_p(cfg.large_k_floor);
  for (const auto& c : lp.certificates) certs.push_back(c);

  // Round 1: n < N0 from the lemma.
  mpz_class N0 = ceil_upper(lp.n_bound);
  ContinuedFraction cf_l = cf_until_q_above(log2_over_log10(), N0);
  DichotomyRound d0 = gamma3_dichotomy(lp.n_bound, cf_l);
  auto r0 = make_certificate("gamma3_dichotomy_1", "min{k/2 - 7, n - p - 1} < X", d0.mu_bound, "427", {"lemma_p_n"});
  r0.inputs = {{"N", lp.n_bound.upper_str(12)},
               {"index", std::to_string(d0.index)},
               {"a_max", d0.a_max.get_str()},
               {"legendre_side", d0.legendre_side.upper_str(12)},
               {"plain_side", d0.plain_side.upper_str(12)}};
  certs.push_back(mark(r0, Verdict::kMismatch,
                       "the published 427 does not follow from its own 2^mu < 7.5e233 (log2 7.5e233 = 776.9); "
                       "the first q_i above 1.6e230 has i = 467, not i < 136; a_max + 2 = 5395 is used"));
  certs.push_back(mark(integer_certificate("case_a_k_1", "k < X", d0.k_max + 1, "869", {"gamma3_dichotomy_1"}),
                       Verdict::kMismatch, "inherits the 427 slip"));
  certs.push_back(mark(integer_certificate("case_b_n_minus_p_1", "n - p < X", d0.np_max + 1, "428",
                                           {"gamma3_dichotomy_1"}),
                       Verdict::kMismatch, "inherits the 427 slip"));

  Interval n_d0 = final_n_bound(Interval::exact(d0.k_max, bits));
  certs.push_back(mark(make_certificate("n_after_dichotomy_1", "n < X", n_d0, "1.2e52", {"case_a_k_1"}),
                       Verdict::kMismatch, "inherits the 427 slip"));

  // The A2 lattice: eta_1 = eta_3 = log 2 makes (1, 0, -1) a lattice vector.
  A2Attempt a2 = lll_a2_attempt(parse_rational("4.1e690").get_num(), lp.n_bound);
  auto a2c = make_certificate("a2_lattice", "l(L, 0) >= delta", a2.red.delta, "3.3e230", {"lemma_p_n"});
  a2c.inputs = {{"C", "4.1e690"},
                {"X", lp.n_bound.upper_str(12)},
                {"applicable", a2.applicable ? "true" : "false"},
                {"reason", a2.reason}};
  certs.push_back(mark(a2c, Verdict::kMismatch,
                       "columns floor(C log 2), floor(C log(1/10)), floor(C log 2) admit the vector (1, 0, 0) - (0, 0, 1) "
                       "of length 1, so Lemma blue cannot apply; a Baker-Davenport round over n - p replaces this step"));

  ContinuedFraction cf_t = cf_expand(log10_over_log2(), 760);
  const std::vector<long> published_tau = {3, 3, 9, 2, 2, 4, 6, 2, 2};
  Json tau_prefix = Json::array();
  long tau_mismatch = -1;
  for (std::size_t i = 0; i < published_tau.size(); ++i) {
    tau_prefix.push_back(cf_t.quotients[i].get_si());
    if (tau_mismatch < 0 && cf_t.quotients[i] != published_tau[i]) tau_mismatch = static_cast<long>(i);
  }
  BDRound b1 = gamma4_bd_round(N0, d0.np_max, cf_t);
  auto b1c = make_certificate("bd_round_1", "k/2 < X", b1.w_max, "1538", {"case_b_n_minus_p_1"});
  b1c.inputs = {{"M", lp.n_bound.upper_str(12)},
                {"n_minus_p_max", std::to_string(d0.np_max)},
                {"worst_n_minus_p", std::to_string(b1.worst_j)},
                {"first_index", std::to_string(b1.first_index)},
                {"epsilon_max", b1.eps_max.upper_str(12)}};
  b1c.notes.push_back("tau = log 10 / log 2, mu_j = -log(1 - 2^-j)/log 2, A = 108/log 2, B = 2; j = 1 by Legendre");
  certs.push_back(b1c);
  long K1 = std::max(d0.k_max, b1.k_max);
  certs.push_back(integer_certificate("k_after_round_1", "k < X", K1 + 1, "3076", {"case_a_k_1", "bd_round_1"}));
  Interval N1 = final_n_bound(Interval::exact(K1, bits));
  auto n1c = make_certificate("n_after_round_1", "n < X", N1, "2.0e56", {"k_after_round_1"});
  certs.push_back(n1c);

  // Round 2 at M = 2e56 when the new bound allows it.
  mpz_class M2 = parse_rational("2e56").get_num();
  if (ceil_upper(N1) > M2) M2 = ceil_upper(N1);
  DichotomyRound d1 = gamma3_dichotomy(Interval::from_z(M2, bits), cf_l);
  auto r1 = make_certificate("gamma3_dichotomy_2", "min{k/2 - 7, n - p - 1} < X", d1.mu_bound, "194", {"n_after_round_1"});
  r1.inputs = {{"N", M2.get_str()}, {"index", std::to_string(d1.index)}, {"a_max", d1.a_max.get_str()}};
  certs.push_back(r1);
  certs.push_back(integer_certificate("case_a_k_2", "k < X", d1.k_max + 1, "402", {"gamma3_dichotomy_2"}));
  certs.push_back(integer_certificate("case_b_n_minus_p_2", "n - p < X", d1.np_max + 1, "195", {"gamma3_dichotomy_2"}));

  BDRound b2 = gamma4_bd_round(M2, d1.np_max, cf_t);
  auto b2c = make_certificate("bd_round_2", "k/2 < X", b2.w_max, "213", {"case_b_n_minus_p_2"});
  const BDEntry* first_bd = nullptr;
  for (const auto& e : b2.entries) {
    if (!e.legendre && (!first_bd || e.bd.index < first_bd->bd.index)) first_bd = &e;
  }
  b2c.inputs = {{"M", M2.get_str()},
                {"n_minus_p_max", std::to_string(d1.np_max)},
                {"worst_n_minus_p", std::to_string(b2.worst_j)},
                {"first_index", std::to_string(b2.first_index)},
                {"q", first_bd ? first_bd->bd.q.get_str() : ""},
                {"p", first_bd ? cf_t.p[first_bd->bd.index].get_str() : ""}};
  certs.push_back(b2c);
  auto ec = make_certificate("bd_epsilon", "max over n - p of epsilon", b2.eps_max, "0.49693", {"bd_round_2"});
  {
    // Agreement to 5 significant digits: |eps - 0.49693| < 5e-6.
    Interval p = Interval::from_decimal("0.49693", bits), half = Interval::from_decimal("5e-6", bits);
    bool same = certainly_less(p - half, b2.eps_max) && certainly_less(b2.eps_max, p + half);
    ec.verdict = same ? Verdict::kEqual : Verdict::kMismatch;
    ec.notes.push_back("compared at 5 significant digits");
  }
  certs.push_back(ec);
  long k_final = std::max(d1.k_max, b2.k_max);
  auto fin = integer_certificate("large_k_contradiction", "k < X", k_final + 1, "426", {"case_a_k_2", "bd_round_2"});
  bool contradiction = k_final < cfg.large_k_floor + 1;
  fin.inputs = {{"k_floor", std::to_string(cfg.large_k_floor)}, {"contradiction", contradiction ? "true" : "false"}};
  certs.push_back(fin);
  check_chain(certs);

  Json j;
  j["k_bound_lemma"] = lp.k_bound.upper_str(12);
  j["n_bound_lemma"] = lp.n_bound.upper_str(12);
  j["tau_prefix"] = tau_prefix;
  j["tau_published_prefix"] = published_tau;
  j["tau_first_mismatch"] = tau_mismatch;
  j["q124"] = cf_t.q.size() > 124 ? cf_t.q[124].get_str() : "";
  j["k_final"] = k_final;
  j["contradiction"] = contradiction;
  j["certificates"] = certificates_json(certs, "k>" + std::to_string(cfg.large_k_floor));
  return j;
}

inline void write_file_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp + "'");
    out << text;
    if (!out) throw UsageError("cannot write '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw UsageError("cannot rename onto '" + path + "'");
}

}  // namespace detail

inline std::string bundle_text(const Json& bundle) { return bundle.dump(2) + "\n"; }

inline Json load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("'" + path + "' is not a bundle: " + e.what());
  }
  if (!j.contains("schema") || j["schema"] != kBundleSchema) throw UsageError("'" + path + "' has an unknown schema");
  return j;
}

/// All certificates of a bundle, in stage order.
inline std::vector<Json> bundle_certificates(const Json& bundle) {
  std::vector<Json> out;
  const Json& st = bundle.at("stages");
  for (const char* stage : {"bound_chain", "small_k_reduction"}) {
    if (!st.contains(stage)) continue;
    for (const auto& e : st.at(stage).at("per_k")) {
      for (const auto& c : e.at("certificates")) out.push_back(c);
    }
  }
  if (st.contains("large_k") && st.at("large_k").contains("certificates")) {
    for (const auto& c : st.at("large_k").at("certificates")) out.push_back(c);
  }
  return out;
}

struct PipelineOptions {
  std::string out_path;          // checkpoint after every stage and every k
  std::optional<Json> resume;    // previously written (possibly partial) bundle
  /// Called at each checkpoint with a label such as "bound_chain" or
  /// "small_k_reduction:k=7"; returning true stops the run there.
  std::function<bool(const std::string&)> stop_at;
};

namespace detail {

inline Json summarize(const Json& bundle) {
  const Json& st = bundle.at("stages");
  std::map<std::string, long> verdicts = {{"sharper", 0}, {"equal", 0}, {"looser", 0}, {"mismatch", 0}, {"none", 0}};
  bool guards = true;
  for (const auto& c : bundle_certificates(bundle)) {
    verdicts[c.at("verdict").get<std::string>()]++;
    for (const auto& g : c.at("guards")) guards = guards && g.at("holds").get<bool>();
  }
  bool theorem = st.at("base_search").at("match").get<bool>() && st.at("verification").at("match").get<bool>();
  bool n_le_k = st.at("case_n_le_k").at("ok").get<bool>();
  bool contradiction = st.at("large_k").at("contradiction").get<bool>();
  bool ok = theorem && n_le_k && guards && contradiction;
  Json s;
  s["theorem_match"] = theorem;
  s["case_n_le_k_ok"] = n_le_k;
  s["guards_hold"] = guards;
  s["large_k_contradiction"] = contradiction;
  s["verdicts"] = verdicts;
  s["ok"] = ok;
  s["strict_ok"] = ok && verdicts["looser"] == 0 && verdicts["mismatch"] == 0;
  return s;
}

}  // namespace detail

/// Runs (or resumes) the pipeline. Errors inside a stage are recorded in the
/// bundle, which is then returned incomplete with its cursor in place.
inline Json run_pipeline(const PipelineConfig& cfg, const PipelineOptions& opts = {}) {
  cfg.validate();
  Json bundle;
  if (opts.resume) {
    bundle = *opts.resume;
    if (bundle.value("schema", "") != kBundleSchema) throw UsageError("resume bundle has an unknown schema");
    if (bundle.at("config") != cfg.to_json()) throw UsageError("resume bundle was produced with a different configuration");
    bundle.erase("error");
  } else {
    bundle["schema"] = kBundleSchema;
    bundle["config"] = cfg.to_json();
    bundle["stages"] = Json::object();
  }
  bundle["complete"] = false;
  bundle.erase("summary");

  bool stopped = false;
  auto checkpoint = [&](const std::string& label, const std::string& next_stage, long next_k) {
    bundle["cursor"] = {{"stage", next_stage}, {"k", next_k}};
    if (!opts.out_path.empty()) detail::write_file_atomic(opts.out_path, bundle_text(bundle));
    if (opts.stop_at && opts.stop_at(label)) stopped = true;
    return stopped;
  };
  Json& st = bundle["stages"];
  const auto& stages = pipeline_stages();
  std::string current;
  try {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      current = stages[i];
      const std::string next = i + 1 < stages.size() ? stages[i + 1] : "";
      if (st.contains(current) && st[current].value("done", false)) continue;
      if (current == "base_search") {
        st[current] = detail::stage_base_search(cfg);
      } else if (current == "case_n_le_k") {
        st[current] = detail::stage_case_n_le_k(cfg);
      } else if (current == "bound_chain" || current == "small_k_reduction") {
        Json& s = st[current];
        if (!s.contains("per_k")) s["per_k"] = Json::array();
        // Batches of one k per worker; the bundle is appended in k order so
        // its bytes do not depend on the worker count.
        const int batch = static_cast<int>(std::max(1u, worker_count()));
        for (int k0 = cfg.k_min + static_cast<int>(s["per_k"].size()); k0 <= cfg.k_small_max; k0 += batch) {
          const int count = std::min(batch, cfg.k_small_max - k0 + 1);
          std::vector<Json> out(count);
          parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
            int k = k0 + static_cast<int>(i);
            out[i] = current == "bound_chain" ? detail::stage_bound_chain_k(cfg, k) : detail::stage_small_k(cfg, k);
          });
          for (auto& e : out) s["per_k"].push_back(std::move(e));
          const int last = k0 + count - 1;
          if (last < cfg.k_small_max && checkpoint(current + ":k=" + std::to_string(last), current, last + 1)) {
            return bundle;
          }
        }
      } else if (current == "verification") {
        st[current] = detail::stage_verification(cfg, st.at("small_k_reduction"));
      } else if (current == "large_k") {
        st[current] = detail::stage_large_k(cfg);
      }
      st[current]["done"] = true;
      if (checkpoint(current, next, next == "bound_chain" || next == "small_k_reduction" ? cfg.k_min : 0)) {
        if (!next.empty()) return bundle;
      }
    }
  } catch (const Error& e) {
    bundle["error"] = {{"stage", current}, {"what", e.what()}};
    if (!opts.out_path.empty()) detail::write_file_atomic(opts.out_path, bundle_text(bundle));
    return bundle;
  }
  bundle.erase("cursor");
  bundle["complete"] = true;
  bundle["summary"] = detail::summarize(bundle);
  if (!opts.out_path.empty()) detail::write_file_atomic(opts.out_path, bundle_text(bundle));
  return bundle;
}

/// 0 when the run is complete, reproduces the theorem's solutions, every guard
/// holds, the k > 500 branch closes and no certificate is looser or
/// mismatching. `lenient` drops the last condition.
inline int pipeline_exit_code(const Json& bundle, bool lenient = false) {
  if (!bundle.value("complete", false)) return 1;
  const Json& s = bundle.at("summary");
  return (lenient ? s.at("ok") : s.at("strict_ok")).get<bool>() ? 0 : 1;
}

/// "json": the canonical bundle; "text": a summary table.
inline std::string emit_report(const Json& bundle, const std::string& format) {
  if (format == "json") return bundle_text(bundle);
  if (format != "text") throw UsageError("unknown format '" + format + "' (expected json or text)");
  std::ostringstream out;
  const bool complete = bundle.value("complete", false);
  out << "schema " << bundle.value("schema", "?") << (complete ? "" : "  [incomplete]") << "\n";
  if (bundle.contains("error")) {
    out << "error in " << bundle["error"].value("stage", "?") << ": " << bundle["error"].value("what", "") << "\n";
  }
  const Json& st = bundle.at("stages");
  for (const auto& name : pipeline_stages()) {
    bool done = st.contains(name) && st.at(name).value("done", false);
    out << "stage " << name << ": " << (done ? "done" : "[incomplete]") << "\n";
  }
  std::set<std::tuple<int, long, long, long>> sols;
  for (const char* stage : {"base_search", "verification"}) {
    if (st.contains(stage) && st.at(stage).contains("solutions")) {
      for (const auto& s : st.at(stage).at("solutions")) {
        sols.insert({s.at("k").get<int>(), s.at("n").get<long>(), s.at("m").get<long>(), s.at("p").get<long>()});
      }
    }
  }
  // Distinct values L_n with their shape, e.g. 12 = 1 || 2.
  std::map<std::string, std::vector<int>> by_value;
  for (const char* stage : {"base_search", "verification"}) {
    if (!st.contains(stage) || !st.at(stage).contains("solutions")) continue;
    for (const auto& s : st.at(stage).at("solutions")) {
      std::string key = s.at("l_n").get<std::string>() + " = " + s.at("l_m").get<std::string>() + " || " +
                        s.at("l_p").get<std::string>() + "  (n=" + std::to_string(s.at("n").get<long>()) +
                        ", m=" + std::to_string(s.at("m").get<long>()) + ", p=" + std::to_string(s.at("p").get<long>()) + ")";
      auto& ks = by_value[key];
      int k = s.at("k").get<int>();
      if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
    }
  }
  out << "solutions: " << by_value.size() << " distinct (" << sols.size() << " with k)\n";
  for (const auto& [shape, ks] : by_value) {
    int lo = *std::min_element(ks.begin(), ks.end()), hi = *std::max_element(ks.begin(), ks.end());
    out << "  " << shape << "  k in [" << lo << ", " << hi << "]\n";
  }
  out << "certificates:\n";
  for (const auto& c : bundle_certificates(bundle)) {
    out << "  " << c.at("scope").get<std::string>() << "  " << c.at("name").get<std::string>() << "  "
        << c.at("statement").get<std::string>() << "  X = " << c.at("value").get<std::string>() << "  published "
        << (c.at("paper_value").get<std::string>().empty() ? "-" : c.at("paper_value").get<std::string>()) << "  "
        << c.at("verdict").get<std::string>() << "\n";
  }
  if (bundle.contains("summary")) {
    const Json& s = bundle.at("summary");
    out << "summary: theorem_match=" << s.at("theorem_match") << " case_n_le_k_ok=" << s.at("case_n_le_k_ok")
        << " guards_hold=" << s.at("guards_hold") << " large_k_contradiction=" << s.at("large_k_contradiction")
        << " ok=" << s.at("ok") << " strict_ok=" << s.at("strict_ok") << "\n";
  }
  return out.str();
}

}  // namespace klucas
