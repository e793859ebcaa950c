// klucas: command line front end for the k-Lucas concatenation toolkit.
//
// Exit codes: 0 success, 1 pipeline verdict not clean, 2 usage, 3 computation error.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "klucas/klucas.hpp"

namespace {

using klucas::Json;

constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

mpz_class parse_integer(const std::string& text, const std::string& what) {
  mpq_class q;
  try {
    q = klucas::parse_rational(text);
  } catch (const klucas::Error&) {
    throw klucas::UsageError(what + " must be an integer, got '" + text + "'");
  }
  if (q.get_den() != 1) throw klucas::UsageError(what + " must be an integer, got '" + text + "'");
  return q.get_num();
}

Json certs_json(const std::vector<klucas::BoundCertificate>& certs) {
  Json a = Json::array();
  for (const auto& c : certs) a.push_back(klucas::to_json(c));
  return a;
}

void print_cert_table(const std::vector<klucas::BoundCertificate>& certs) {
  for (const auto& c : certs) {
    std::cout << c.name << "  " << c.statement << "  X = " << c.value << "  published "
              << (c.paper_value.empty() ? "-" : c.paper_value) << "  " << klucas::to_string(c.verdict)
              << (c.guards_hold() ? "" : "  [guard fails]") << "\n";
  }
}

// --- seq ------------------------------------------------------------------

struct SeqArgs {
  int k = 3;
  long from = 0, to = 20;
  bool json = false;
};

int run_seq(const SeqArgs& a) {
  if (a.from > a.to) throw klucas::UsageError("--from must not exceed --to");
  klucas::KLucasContext ctx(a.k);
  auto terms = ctx.term_range(a.from, a.to);
  if (a.json) {
    Json arr = Json::array();
    for (long n = a.from; n <= a.to; ++n) arr.push_back({{"n", n}, {"value", terms[n - a.from].get_str()}});
    print_json({{"k", a.k}, {"terms", arr}});
  } else {
    for (long n = a.from; n <= a.to; ++n) std::cout << n << " " << terms[n - a.from].get_str() << "\n";
  }
  return 0;
}

// --- root -----------------------------------------------------------------

struct RootArgs {
  int k = 3;
  long digits = 50;
  bool json = false;
};

int run_root(const RootArgs& a) {
  auto rc = klucas::make_root_context(a.k, a.digits);
  const int sig = static_cast<int>(a.digits);
  Json j = {{"k", a.k},
            {"digits", a.digits},
            {"alpha_lower", rc.alpha.lower_str(sig)},
            {"alpha_upper", rc.alpha.upper_str(sig)},
            {"fk_alpha", rc.fk_alpha.str(std::min(sig, 40))},
            {"log_alpha", rc.log_alpha.str(std::min(sig, 40))}};
  if (a.json) {
    print_json(j);
  } else {
    std::cout << "alpha in [" << j["alpha_lower"].get<std::string>() << ", " << j["alpha_upper"].get<std::string>()
              << "]\nf_k(alpha) ~ " << j["fk_alpha"].get<std::string>() << "\nlog alpha ~ "
              << j["log_alpha"].get<std::string>() << "\n";
  }
  return 0;
}

// --- search ---------------------------------------------------------------

struct SearchArgs {
  int k_min = 3, k_max = 10;
  long mp_max = 100;
  bool no_window = false;
  std::string resume;
  bool json = false;
};

int run_search(const SearchArgs& a) {
  if (a.k_max < a.k_min) throw klucas::UsageError("--k-max must be at least --k-min");
  // The resume file is a JSON-lines log: solution lines and one {"k_done": k} per finished k.
  std::set<int> done;
  if (!a.resume.empty()) {
    std::ifstream in(a.resume);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::exception&) {
        throw klucas::UsageError("'" + a.resume + "' is not a search log");
      }
      if (j.contains("k_done")) done.insert(j["k_done"].get<int>());
    }
  }
  std::ofstream log;
  if (!a.resume.empty()) log.open(a.resume, std::ios::app);
  for (int k = a.k_min; k <= a.k_max; ++k) {
    if (done.count(k)) continue;
    klucas::SearchSpec spec;
    spec.k_min = spec.k_max = k;
    spec.mp_bound = a.mp_max;
    spec.enforce_window = !a.no_window;
    klucas::SearchStats stats;
    auto sols = klucas::search(spec, &stats);
    std::ostringstream chunk;
    for (const auto& s : sols) {
      if (a.json) {
        chunk << klucas::to_json(s).dump() << "\n";
      } else {
        chunk << "k=" << s.k << " n=" << s.n << " m=" << s.m << " p=" << s.p << "  " << s.l_n.get_str() << " = "
              << s.l_m.get_str() << " || " << s.l_p.get_str() << "\n";
      }
    }
    std::cout << chunk.str() << std::flush;
    if (log.is_open()) {
      for (const auto& s : sols) log << klucas::to_json(s).dump() << "\n";
      log << Json{{"k_done", k}, {"candidates", stats.candidates}}.dump() << "\n" << std::flush;
    }
  }
  return 0;
}

// --- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string k = "3";
  bool lemma_p = false;
  bool json = false;
};

int run_bounds(const BoundsArgs& a) {
  std::vector<klucas::BoundCertificate> certs;
  if (a.lemma_p) {
    long floor_k = parse_integer(a.k, "--k").get_si();
    certs = klucas::derive_lemma_p(floor_k).certificates;
  } else {
    mpz_class k = parse_integer(a.k, "--k");
    certs = klucas::derive_bound_chain(klucas::Interval::from_z(k, klucas::kBoundBits));
  }
  if (a.json) {
    print_json({{"k", a.k}, {"certificates", certs_json(certs)}});
  } else {
    print_cert_table(certs);
  }
  return 0;
}

// --- reduce ---------------------------------------------------------------

struct BdArgs {
  std::string gamma, mu, A, B, M;
};

int run_reduce_bd(const BdArgs& a) {
  mpz_class M = parse_integer(a.M, "--M");
  if (M < 1) throw klucas::UsageError("--M must be positive");
  mpz_class bound = M * 6 * klucas::pow10(30);
  // M ||gamma q|| with q near bound needs gamma to about log2(M bound) bits.
  const klucas::Bits bits = static_cast<klucas::Bits>(2 * mpz_sizeinbase(bound.get_mpz_t(), 2)) + klucas::kBoundBits;
  klucas::RealExpr gamma(a.gamma), mu(a.mu), A(a.A), B(a.B);
  klucas::ReductionProblem rp{gamma.eval(bits), mu.eval(bits), A.eval(bits), B.eval(bits), M};
  rp.validate();
  auto cf = klucas::cf_until_q_above(gamma.fn(), bound);
  auto res = klucas::baker_davenport(rp, cf);
  Json tried = Json::array();
  for (const auto& t : res.tried) tried.push_back({{"index", t.index}, {"epsilon", t.epsilon.str(12)}});
  Json j = {{"success", res.success}, {"tried", tried}};
  if (res.success) {
    j["index"] = res.index;
    j["q"] = res.q.get_str();
    j["p"] = cf.p[res.index].get_str();
    j["epsilon_lower"] = res.epsilon.lower_str(12);
    j["epsilon_upper"] = res.epsilon.upper_str(12);
    j["w_bound"] = res.w_bound.upper_str(12);
    j["statement"] = "w < " + res.w_bound.upper_str(12);
  }
  print_json(j);
  return res.success ? 0 : kExitError;
}

struct LllArgs {
  std::string instance = "a1";
  long k = 3;
  std::string C = "auto";
  std::string X;
  long np = 1, m = 0;
};

Json lattice_json(const klucas::IntBasis& b) {
  Json cols = Json::array();
  for (const auto& col : b) {
    Json c = Json::array();
    for (const auto& v : col) c.push_back(v.get_str());
    cols.push_back(c);
  }
  return cols;
}

int run_reduce_lll(const LllArgs& a) {
  const klucas::Bits bits = klucas::kBoundBits;
  if (a.instance == "a1") {
    klucas::Interval X = a.X.empty() ? klucas::final_n_bound(klucas::Interval::exact(a.k, bits))
                                     : klucas::Interval::from_decimal(a.X, bits);
    mpz_class C = a.C == "auto" ? klucas::auto_lattice_constant(X) : parse_integer(a.C, "--C");
    auto inst = klucas::lll_a1_instance(a.k, a.np, a.m, C, X);
    Json j = {{"instance", "a1"},
              {"k", a.k},
              {"n_minus_p", a.np},
              {"m", a.m},
              {"C", klucas::constant_str(C)},
              {"X", X.upper_str(12)},
              {"reduced_basis", lattice_json(inst.reduced)},
              {"delta", inst.red.delta.lower_str(12)},
              {"c1", inst.red.c1.upper_str(12)},
              {"S", inst.S.upper_str(12)},
              {"T", inst.T.upper_str(12)},
              {"applicable", inst.applicable}};
    if (inst.applicable) {
      j["H"] = inst.H.upper_str(12);
      j["statement"] = "n - 1 <= " + inst.H.upper_str(12);
    } else {
      j["reason"] = inst.reason;
    }
    print_json(j);
    return inst.applicable ? 0 : kExitError;
  }
  if (a.instance == "a2") {
    klucas::Interval X = a.X.empty() ? klucas::derive_lemma_p(500).n_bound : klucas::Interval::from_decimal(a.X, bits);
    mpz_class C = a.C == "auto" ? klucas::auto_lattice_constant(X) : parse_integer(a.C, "--C");
    auto at = klucas::lll_a2_attempt(C, X);
    Json j = {{"instance", "a2"},
              {"C", klucas::constant_str(C)},
              {"X", X.upper_str(12)},
              {"reduced_basis", lattice_json(at.reduced)},
              {"delta", at.red.delta.lower_str(12)},
              {"S", at.S.upper_str(12)},
              {"T", at.T.upper_str(12)},
              {"applicable", at.applicable}};
    if (at.applicable) {
      j["H"] = at.H.upper_str(12);
      j["statement"] = "k/2 < " + at.H.upper_str(12);
    } else {
      j["reason"] = at.reason;
    }
    print_json(j);
    return at.applicable ? 0 : kExitError;
  }
  throw klucas::UsageError("--instance must be a1 or a2");
}

struct BlueArgs {
  std::string delta, S, T, C, c3, c4;
};

int run_reduce_blue(const BlueArgs& a) {
  const klucas::Bits bits = klucas::kBoundBits;
  auto ev = [&](const std::string& s) { return klucas::RealExpr(s).eval(bits); };
  klucas::Interval H = klucas::lemma_blue(ev(a.delta), ev(a.S), ev(a.T), ev(a.C), ev(a.c3), ev(a.c4));
  print_json({{"H", H.upper_str(12)}, {"floor_H", klucas::floor_upper(H).get_str()}});
  return 0;
}

struct CfArgs {
  std::string expr;
  std::size_t count = 10;
};

int run_reduce_cf(const CfArgs& a) {
  klucas::RealExpr e(a.expr);
  auto cf = klucas::cf_expand(e.fn(), a.count);
  Json q = Json::array(), conv = Json::array();
  for (std::size_t i = 0; i < cf.size(); ++i) {
    q.push_back(cf.quotients[i].get_str());
    conv.push_back({{"p", cf.p[i].get_str()}, {"q", cf.q[i].get_str()}});
  }
  print_json({{"expr", a.expr}, {"quotients", q}, {"convergents", conv}});
  return 0;
}

// --- pipeline -------------------------------------------------------------

struct PipelineArgs {
  klucas::PipelineConfig cfg;
  std::string out, resume, format = "json";
  bool lenient = false;
};

int run_pipeline_cmd(const PipelineArgs& a) {
  if (a.format != "json" && a.format != "text") throw klucas::UsageError("--format must be json or text");
  klucas::PipelineOptions opts;
  opts.out_path = a.out;
  if (!a.resume.empty()) opts.resume = klucas::load_bundle(a.resume);
  Json bundle = klucas::run_pipeline(a.cfg, opts);
  std::cout << klucas::emit_report(bundle, a.format);
  if (bundle.contains("error")) return kExitError;
  return klucas::pipeline_exit_code(bundle, a.lenient);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-generalized Lucas concatenation toolkit"};
  app.require_subcommand(1);

  SeqArgs seq;
  auto* c_seq = app.add_subcommand("seq", "terms L_n for n in [from, to]");
  c_seq->add_option("--k", seq.k, "order k >= 2")->required();
  c_seq->add_option("--from", seq.from, "first index (>= 2 - k)");
  c_seq->add_option("--to", seq.to, "last index");
  c_seq->add_flag("--json", seq.json);

  RootArgs root;
  auto* c_root = app.add_subcommand("root", "certified dominant root");
  c_root->add_option("--k", root.k)->required();
  c_root->add_option("--digits", root.digits, "decimal digits (>= 50)");
  c_root->add_flag("--json", root.json);

  SearchArgs srch;
  auto* c_search = app.add_subcommand("search", "exhaustive search with m, p <= mp-max");
  c_search->add_option("--k-min", srch.k_min);
  c_search->add_option("--k-max", srch.k_max);
  c_search->add_option("--mp-max", srch.mp_max);
  c_search->add_flag("--no-window", srch.no_window, "try every n, not only m + p - 2 < n < m + p + 8");
  c_search->add_option("--resume", srch.resume, "JSON-lines log; finished k are skipped, new ones appended");
  c_search->add_flag("--json", srch.json, "one JSON object per solution");

  BoundsArgs bnd;
  auto* c_bounds = app.add_subcommand("bounds", "bound chain certificates for one k");
  c_bounds->add_option("--k", bnd.k, "order k (any integer >= 3); with --lemma-p the floor k_0 >= 500")->required();
  c_bounds->add_flag("--lemma-p", bnd.lemma_p, "the k > k_0 lemma instead");
  c_bounds->add_flag("--json", bnd.json);

  auto* c_reduce = app.add_subcommand("reduce", "reduction tools");
  c_reduce->require_subcommand(1);
  BdArgs bd;
  auto* c_bd = c_reduce->add_subcommand("bd", "Baker-Davenport for |u gamma - v + mu| < A B^-w, u <= M");
  c_bd->add_option("--gamma", bd.gamma)->required();
  c_bd->add_option("--mu", bd.mu)->required();
  c_bd->add_option("--A", bd.A)->required();
  c_bd->add_option("--B", bd.B)->required();
  c_bd->add_option("--M", bd.M)->required();
  LllArgs lll;
  auto* c_lll = c_reduce->add_subcommand("lll", "one de Weger lattice: a1 (k small) or a2 (k large)");
  c_lll->add_option("--instance", lll.instance)->check(CLI::IsMember({"a1", "a2"}));
  c_lll->add_option("--k", lll.k);
  c_lll->add_option("--C", lll.C, "lattice constant, e.g. 5e150, or auto");
  c_lll->add_option("--X", lll.X, "coefficient bound (default: the n bound)");
  c_lll->add_option("--np", lll.np, "n - p (a1)");
  c_lll->add_option("--m", lll.m, "m (a1)");
  BlueArgs blue;
  auto* c_blue = c_reduce->add_subcommand("blue", "H from delta, S, T, C, c3, c4");
  for (auto [name, field] : {std::pair{"--delta", &blue.delta}, {"--S", &blue.S}, {"--T", &blue.T}, {"--C", &blue.C},
                             {"--c3", &blue.c3}, {"--c4", &blue.c4}}) {
    c_blue->add_option(name, *field)->required();
  }
  CfArgs cf;
  auto* c_cf = c_reduce->add_subcommand("cf", "certified continued fraction");
  c_cf->add_option("--expr", cf.expr, "e.g. log(2)/log(10) or log(alpha(3))/log(10)")->required();
  c_cf->add_option("--count", cf.count);

  PipelineArgs pl;
  auto* c_pl = app.add_subcommand("pipeline", "end-to-end run producing one bundle");
  c_pl->add_option("--precision", pl.cfg.precision, "decimal digits for root enclosures");
  c_pl->add_option("--k-min", pl.cfg.k_min);
  c_pl->add_option("--k-max", pl.cfg.k_small_max, "top of the small-k range");
  c_pl->add_option("--mp-max", pl.cfg.mp_bound);
  c_pl->add_option("--lattice-c", pl.cfg.lattice_c, "A1 lattice constant or auto");
  c_pl->add_option("--out", pl.out, "bundle path, rewritten at every checkpoint");
  c_pl->add_option("--resume", pl.resume, "bundle to continue from");
  c_pl->add_option("--format", pl.format)->check(CLI::IsMember({"json", "text"}));
  c_pl->add_flag("--lenient", pl.lenient, "exit 0 despite looser or mismatching certificates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_seq->parsed()) return run_seq(seq);
    if (c_root->parsed()) return run_root(root);
    if (c_search->parsed()) return run_search(srch);
    if (c_bounds->parsed()) return run_bounds(bnd);
    if (c_bd->parsed()) return run_reduce_bd(bd);
    if (c_lll->parsed()) return run_reduce_lll(lll);
    if (c_blue->parsed()) return run_reduce_blue(blue);
    if (c_cf->parsed()) return run_reduce_cf(cf);
    if (c_pl->parsed()) return run_pipeline_cmd(pl);
  } catch (const klucas::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const klucas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
