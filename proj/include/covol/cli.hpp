#pragma once

// Command-line front end. One structured report per run: a flat human table on
// stdout and, with --json PATH, the machine report (ordered keys, numbers as
// exact integers, {num, den} rationals or {mid, radius} balls).

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "appendix.hpp"
#include "census.hpp"
#include "covolume.hpp"
#include "field_cache.hpp"
#include "fields.hpp"
#include "lie_data.hpp"
#include "numeric.hpp"

namespace covol::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kPrecondition = 2,
  kUndecidable = 3,
  kUsage = 64,
  kDataError = 65,
};

// JSON encoders

inline json ball(const PrecisionValue& v, int digits) {
  auto d = v.decimal(digits);
  return json{{"mid", d.mid}, {"radius", d.rad}};
}

inline json rational(const mpq_class& q) { return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

inline json integer(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

/// Exact rational from "123", "-7/2", "1e14", "0.5" or "2^40".
inline mpq_class parse_rational(const std::string& text) {
  auto fail = [&] { return PreconditionError("not an exact number: '" + text + "'"); };
  if (text.empty()) throw fail();
  if (auto caret = text.find('^'); caret != std::string::npos) {
    mpq_class base = parse_rational(text.substr(0, caret));
    long e = 0;
    if (!detail::parse_canonical_long(text.substr(caret + 1), e) || e < 0 || e > 100000) throw fail();
    mpq_class r = 1;
    for (long i = 0; i < e; ++i) r *= base;
    return r;
  }
  if (text.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) throw fail();
    q.canonicalize();
    return q;
  }
  std::string mant = text;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mant = text.substr(0, e);
    std::string es = text.substr(e + 1);
    if (!es.empty() && es[0] == '+') es = es.substr(1);
    if (!detail::parse_canonical_long(es, exp10) || std::labs(exp10) > 100000) throw fail();
  }
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  mpz_class m;
  if (mant.empty() || mant == "-" || m.set_str(mant, 10) != 0) throw fail();
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  mpq_class q = exp10 >= 0 ? mpq_class(m * p) : mpq_class(m, p);
  q.canonicalize();
  return q;
}

// Human table: one "key  value" line per leaf; balls print as mid +/- radius.
inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    if (j.size() == 2 && j.contains("mid") && j.contains("radius")) {
      rows.emplace_back(prefix, j["mid"].get<std::string>() + " +/- " + j["radius"].get<std::string>());
      return;
    }
    if (j.size() == 2 && j.contains("num") && j.contains("den")) {
      std::string den = j["den"].get<std::string>();
      rows.emplace_back(prefix, j["num"].get<std::string>() + (den == "1" ? "" : "/" + den));
      return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    return;
  }
  if (j.is_array()) {
    if (j.size() > 24) {
      rows.emplace_back(prefix, "[" + std::to_string(j.size()) + " entries]");
      return;
    }
    bool scalars = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
    if (scalars) {
      std::string s;
      for (const auto& e : j) s += (s.empty() ? "" : " ") + (e.is_string() ? e.get<std::string>() : e.dump());
      rows.emplace_back(prefix, "[" + s + "]");
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
    return;
  }
  rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

inline void print_table(std::ostream& out, const json& result) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(result, "", rows);
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& r : rows) out << std::left << std::setw(static_cast<int>(w) + 2) << r.first << r.second << "\n";
}

// Options shared by several subcommands

struct TypeOpts {
  std::string family = "A";
  int rank = 2;
  int twist = 1;
  std::optional<int> s;
  long disc = 0;
  std::optional<std::string> ext_disc;

  void add(CLI::App* sub, bool with_field) {
    sub->add_option("--family", family, "A B C D E6 E7 E8 F4 G2")->required();
    sub->add_option("--rank", rank, "absolute rank")->required();
    sub->add_option("--twist", twist, "[l:k]; 1 for inner forms");
    sub->add_option("--s", s, "s for outer forms that need it");
    if (with_field) {
      sub->add_option("--disc", disc, "discriminant of k; 0 or 1 denotes Q");
      sub->add_option("--ext-disc", ext_disc, "|D_l| for outer forms");
    }
  }
  GroupData group() const { return group_data(parse_family(family), rank, twist, s); }
  BaseField base() const { return BaseField::from_disc(disc); }
  ExtensionPair pair(Precision prec) const {
    if (twist == 1) return ExtensionPair::inner(base(), prec);
    if (!ext_disc) throw PreconditionError("outer forms need --ext-disc");
    mpq_class dl = parse_rational(*ext_disc);
    if (dl.get_den() != 1) throw PreconditionError("--ext-disc must be an integer");
    return ExtensionPair::by_discriminant(base(), dl.get_num(), twist, prec);
  }
};

inline json group_json(const GroupData& g) {
  json j;
  j["name"] = g.name();
  j["family"] = to_string(g.family);
  j["rank"] = g.rank;
  j["twist"] = g.twist_degree;
  j["dim"] = g.dim;
  j["exponents"] = g.exponents;
  j["n"] = g.n;
  j["eps"] = g.eps;
  j["eps_prime"] = g.eps_prime;
  j["eps_dprime"] = g.eps_dprime;
  j["s"] = g.s;
  j["s_prime"] = rational(g.s_prime);
  return j;
}

inline json volume_json(const VolumeBreakdown& vb, int digits) {
  json factors = json::array();
  for (const auto& f : vb.factors) {
    json e;
    e["name"] = f.name;
    e["rational"] = rational(f.rational);
    e["transcendental_expr"] = f.transcendental_expr;
    e["transcendental"] = ball(f.transcendental, digits);
    e["value"] = ball(f.value, digits);
    factors.push_back(e);
  }
  json j;
  j["factors"] = factors;
  j["total"] = ball(vb.total, digits);
  j["audit"] = vb.audit();
  return j;
}

inline json census_json(const CensusBound& b, int digits) {
  json j;
  j["x"] = ball(b.x, digits);
  j["log2_x"] = ball(b.log2_x, digits);
  j["mode"] = to_string(b.mode);
  j["fields_bound"] = ball(b.fields_bound, digits);
  j["forms_bound"] = ball(b.forms_bound, digits);
  j["parahoric_bound"] = ball(b.parahoric_bound, digits);
  j["classes_bound"] = ball(b.classes_bound, digits);
  j["log2_total"] = ball(b.log2_total, digits);
  j["total_exponent"] = ball(b.total_exponent, digits);
  if (b.beta) j["beta"] = ball(*b.beta, digits);
  if (b.num_k_exact_quadratic) j["num_k_exact_quadratic"] = *b.num_k_exact_quadratic;
  j["degree_cap"] = b.degree_cap;
  return j;
}

inline json constants_json(const std::map<std::string, PrecisionValue>& c, int digits) {
  json j = json::object();
  for (const auto& [k, v] : c) j[k] = ball(v, digits);
  return j;
}

// Run state

struct Run {
  Precision prec{30};
  json config = json::object();
  json result = json::object();
  int status = kOk;
  int digits() const { return static_cast<int>(std::min<long>(prec.digits, 40)); }
};

/// Command echo for the report. Flags that only change how the work is
/// scheduled or where it is written are dropped so that reports compare equal.
inline json command_echo(const std::vector<std::string>& args) {
  json j = json::array();
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--json" || a == "--shards" || a == "--cache") {
      ++i;
      continue;
    }
    if (a.rfind("--json=", 0) == 0 || a.rfind("--shards=", 0) == 0 || a.rfind("--cache=", 0) == 0) continue;
    j.push_back(a);
  }
  return j;
}

inline std::optional<Precision> precision_from_env() {
  const char* v = std::getenv("COVOLUME_PRECISION");
  if (!v || !*v) return std::nullopt;
  long p = 0;
  if (!detail::parse_canonical_long(v, p) || p < 10 || p > 100000) throw CLI::ValidationError("COVOLUME_PRECISION", "must be an integer in [10, 100000]");
  return Precision{p};
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covolumes and counting of arithmetic subgroups of semisimple groups.\n"
               "Use --disc 0 (or 1) for the rational field Q."};
  app.name("covolume");
  app.require_subcommand(1);
  std::optional<std::string> json_path;
  std::optional<long> precision;
  app.add_option("--json", json_path, "write the machine report to PATH");
  app.add_option("--precision", precision, "working precision in decimal digits (default: COVOLUME_PRECISION or 30)")
      ->check(CLI::Range(10L, 100000L));
  app.fallthrough();

  Run run;
  std::function<void()> action;

  // lie show
  auto* lie = app.add_subcommand("lie", "root data of a type");
  lie->require_subcommand(1);
  auto* lie_show = lie->add_subcommand("show", "invariants of a type");
  std::string show_family;
  int show_rank = 0, show_twist = 1;
  std::optional<int> show_s;
  lie_show->add_option("family", show_family)->required();
  lie_show->add_option("rank", show_rank)->required();
  lie_show->add_option("--twist", show_twist);
  lie_show->add_option("--s", show_s);
  lie_show->callback([&] {
    action = [&] {
      auto g = group_data(parse_family(show_family), show_rank, show_twist, show_s);
      run.result["type"] = group_json(g);
      run.result["dimension_check"] = verify_dimension(g);
      json poly = json::array();
      for (const auto& c : order_polynomial(g.family, g.rank, g.twist_degree)) poly.push_back(integer(c));
      run.result["order_polynomial"] = poly;
      if (g.twist_degree == 1) {
        json orders;
        for (long q : {2L, 3L, 4L, 5L}) orders[std::to_string(q)] = finite_group_order(g.family, g.rank, 1, q).get_str();
        run.result["finite_orders"] = orders;
      }
    };
  });

  // fields
  auto* fields = app.add_subcommand("fields", "quadratic fields");
  fields->require_subcommand(1);
  auto* fields_enum = fields->add_subcommand("enum", "enumerate fundamental discriminants |D| <= X");
  long max_disc = 0;
  int shards = 1;
  bool with_h = false;
  std::optional<std::string> cache_path;
  fields_enum->add_option("--max-disc", max_disc)->required()->check(CLI::Range(1L, 100000000L));
  fields_enum->add_option("--cache", cache_path, "write the field cache to PATH");
  fields_enum->add_option("--shards", shards)->check(CLI::Range(1, 256));
  fields_enum->add_flag("--class-numbers", with_h, "fill h for imaginary fields");
  fields_enum->callback([&] {
    action = [&] {
      auto ks = enumerate_fields(max_disc, shards, with_h);
      const std::string text = serialize_cache(ks);
      if (cache_path) write_file(*cache_path, text);
      run.result["max_disc"] = max_disc;
      run.result["records"] = ks.size();
      json recs = json::array();
      for (const auto& k : ks) recs.push_back(serialize_record(k));
      run.result["fields"] = recs;
    };
  });
  auto* fields_verify = fields->add_subcommand("verify-cache", "parse and re-serialize a field cache");
  std::string verify_path;
  bool verify_h = false;
  fields_verify->add_option("--cache", verify_path)->required();
  fields_verify->add_flag("--class-numbers", verify_h, "also recompute class numbers");
  fields_verify->callback([&] {
    action = [&] {
      const std::string text = read_file(verify_path);
      auto ks = parse_cache(text, verify_h);
      const bool same = serialize_cache(ks) == text;
      run.result["records"] = ks.size();
      run.result["byte_identical"] = same;
      if (!same) run.status = kDataError;
    };
  });

  // ideals count
  auto* ideals = app.add_subcommand("ideals", "squarefree ideals");
  ideals->require_subcommand(1);
  auto* ideals_count = ideals->add_subcommand("count", "Q_k(x)");
  long ideal_disc = 0, ideal_limit = 0;
  bool ideal_oracle = false;
  ideals_count->add_option("--disc", ideal_disc, "0 or 1 for Q")->required();
  ideals_count->add_option("--limit", ideal_limit)->required()->check(CLI::Range(0L, 100000000L));
  ideals_count->add_flag("--oracle", ideal_oracle, "compare with brute force");
  ideals_count->callback([&] {
    action = [&] {
      auto k = BaseField::from_disc(ideal_disc);
      auto n = squarefree_ideal_count(k, ideal_limit);
      run.result["disc"] = k.disc();
      run.result["limit"] = ideal_limit;
      run.result["count"] = n;
      run.result["bound"] = ball(squarefree_count_bound(k, ideal_limit, run.prec), run.digits());
      if (ideal_oracle) {
        auto o = squarefree_ideal_count_oracle(k, ideal_limit);
        run.result["oracle"] = o;
        run.result["agree"] = o == n;
        if (o != n) run.status = kCheckFailed;
      }
    };
  });

  // covolume
  auto* cov = app.add_subcommand("covolume", "principal covolume with all places hyperspecial");
  TypeOpts cov_t;
  cov_t.add(cov, true);
  cov->callback([&] {
    action = [&] {
      auto g = cov_t.group();
      auto pair = cov_t.pair(run.prec);
      run.result["type"] = g.name();
      run.result["k_disc"] = pair.k.disc();
      run.result["l_abs_disc"] = integer(pair.ext_disc);
      run.result["volume"] = volume_json(covolume(g, pair, run.prec), run.digits());
    };
  });

  // bound
  auto* bound = app.add_subcommand("bound", "explicit bounds");
  bound->require_subcommand(1);
  auto* b_lower = bound->add_subcommand("b-lower", "B(G/k) and its comparison with D_k^delta1 D_{l/k}^delta2");
  TypeOpts bl_t;
  bl_t.add(b_lower, true);
  std::optional<long> scan;
  b_lower->add_option("--scan", scan, "also list exceptional imaginary quadratic k with |D| <= N (l = k)");
  b_lower->callback([&] {
    action = [&] {
      auto g = bl_t.group();
      auto r = b_lower_bound(g, bl_t.pair(run.prec), run.prec);
      run.result["type"] = g.name();
      run.result["B"] = ball(r.B, run.digits());
      run.result["half_B"] = ball(r.half_B, run.digits());
      run.result["case"] = r.threshold_check.which.label;
      run.result["delta1"] = rational(r.threshold_check.which.delta1);
      run.result["delta2"] = rational(r.threshold_check.which.delta2);
      run.result["threshold"] = ball(r.threshold_check.threshold, run.digits());
      run.result["holds"] = r.threshold_check.holds;
      if (scan) {
        auto ex = lower_bound_exceptions(g, *scan, run.prec);
        run.result["scan"] = json{{"max_abs_disc", ex.max_abs_disc}, {"checked", ex.checked},
                                  {"exceptions", ex.exceptions}, {"prefix", ex.prefix}};
      }
    };
  });
  auto* b_index = bound->add_subcommand("index", "upper bound on [Gamma : Lambda]");
  TypeOpts ix_t;
  ix_t.add(b_index, true);
  int num_S = 0, num_T = 0;
  std::vector<int> xi;
  b_index->add_option("--num-s", num_S);
  b_index->add_option("--num-t", num_T);
  b_index->add_option("--xi", xi, "#Xi_v for each place in T");
  b_index->callback([&] {
    action = [&] {
      auto g = ix_t.group();
      auto r = index_upper_bound(g, ix_t.pair(run.prec), num_S, num_T, xi, run.prec);
      run.result["type"] = g.name();
      run.result["value"] = ball(r.value, run.digits());
      if (r.exact) run.result["exact"] = integer(*r.exact);
    };
  });
  auto* b_class = bound->add_subcommand("class-number", "class number bound (1/mu0) n^eps mu(Lambda)");
  TypeOpts cn_t;
  cn_t.add(b_class, true);
  std::string mu0_text = "1e-5";
  b_class->add_option("--mu0", mu0_text);
  b_class->callback([&] {
    action = [&] {
      auto g = cn_t.group();
      auto pair = cn_t.pair(run.prec);
      const mpq_class mu0 = parse_rational(mu0_text);
      run.config["mu0"] = rational(mu0);
      run.result["type"] = g.name();
      run.result["bound"] = ball(class_number_bound(g, pair, euler_product(g, pair, run.prec), mu0), run.digits());
    };
  });

  // census
  auto* census = app.add_subcommand("census", "counting maximal subgroups by covolume");
  census->require_subcommand(1);
  std::string x_text;
  std::string mode_text = "non-uniform";
  std::string c1_text = "1/2";
  std::string cmu0_text = "1e-5";
  bool beta_constant = false;
  int census_S = 1;
  auto census_opts = [&](CLI::App* sub, bool x_required) {
    auto* o = sub->add_option("--x", x_text, "covolume bound: integer, decimal, a/b or 2^k");
    if (x_required) o->required();
    sub->add_option("--mode", mode_text)->check(CLI::IsMember({"uniform", "non-uniform"}));
    sub->add_option("--c1", c1_text, "mu >= c1 D_k^delta1 D_{l/k}^delta2");
    sub->add_option("--mu0", cmu0_text);
    sub->add_option("--num-s", census_S);
    sub->add_flag("--beta-constant", beta_constant, "take beta = C6 (conjectural)");
  };
  auto census_cfg = [&] {
    CensusConfig cfg;
    cfg.c1 = parse_rational(c1_text);
    cfg.mu0 = parse_rational(cmu0_text);
    cfg.beta_constant = beta_constant;
    cfg.prec = run.prec;
    run.config["c1"] = rational(cfg.c1);
    run.config["mu0"] = rational(cfg.mu0);
    run.config["beta_constant"] = cfg.beta_constant;
    return cfg;
  };
  auto mode = [&] { return mode_text == "uniform" ? CensusMode::uniform : CensusMode::non_uniform; };
  auto x_value = [&] { return PrecisionValue::from_rational(parse_rational(x_text), run.prec); };

  auto* c_upper = census->add_subcommand("upper", "upper bound on the number of maximal subgroups");
  TypeOpts cu_t;
  cu_t.add(c_upper, false);
  census_opts(c_upper, true);
  c_upper->callback([&] {
    action = [&] {
      auto cfg = census_cfg();
      auto b = upper_bound_total(x_value(), cu_t.group(), census_S, mode(), cfg);
      run.config["constants"] = constants_json(b.constants, run.digits());
      run.result = census_json(b, run.digits());
    };
  });
  auto* c_lower = census->add_subcommand("lower", "principal subgroups with a single non-hyperspecial place");
  TypeOpts cl_t;
  cl_t.add(c_lower, true);
  census_opts(c_lower, true);
  std::optional<std::string> base_c1;
  c_lower->add_option("--base", base_c1, "exact base covolume; default: computed");
  c_lower->callback([&] {
    action = [&] {
      auto g = cl_t.group();
      auto k = cl_t.base();
      run.result["type"] = g.name();
      run.result["k_disc"] = k.disc();
      if (base_c1) {
        const mpq_class ratio = parse_rational(x_text) / parse_rational(*base_c1);
        run.result["count"] = lower_bound_census_ratio(ratio, k, g);
      } else {
        auto c1 = base_covolume(g, k, run.prec);
        run.result["base_covolume"] = ball(c1, run.digits());
        run.result["count"] = lower_bound_census(x_value(), k, g, c1);
      }
    };
  });
  auto* c_pig = census->add_subcommand("pigeonhole", "signature classes of quadratic fields |D| <= X");
  TypeOpts cp_t;
  cp_t.add(c_pig, false);
  c_pig->add_option("--x", x_text)->required();
  c_pig->callback([&] {
    action = [&] {
      mpq_class X = parse_rational(x_text);
      if (X.get_den() != 1 || !X.get_num().fits_slong_p()) throw PreconditionError("--x must be an integer here");
      auto r = pigeonhole_equivalence(X.get_num().get_si(), cp_t.group(), run.prec);
      run.result["X"] = r.X;
      run.result["N"] = r.N;
      json cells = json::array();
      for (const auto& [sig, ds] : r.cells) cells.push_back(json{{"r1", sig.first}, {"r2", sig.second}, {"discs", ds}});
      run.result["cells"] = cells;
      run.result["max_cell"] = json{{"r1", r.max_cell.first}, {"r2", r.max_cell.second}};
      run.result["c_degree"] = ball(r.c_degree, run.digits());
      run.result["c1"] = ball(r.c1, run.digits());
      run.result["c2"] = ball(r.c2, run.digits());
      run.result["delta"] = ball(r.delta, run.digits());
      json members = json::array();
      bool all = true;
      for (const auto& m : r.members) {
        members.push_back(json{{"disc", m.disc}, {"covolume", ball(m.covolume, run.digits())},
                               {"bound", ball(m.bound, run.digits())}, {"holds", m.holds}});
        all = all && m.holds;
      }
      run.result["members"] = members;
      run.result["all_hold"] = all;
    };
  });
  auto* c_grid = census->add_subcommand("grid", "upper bounds on x = 2^from .. 2^to");
  TypeOpts cg_t;
  cg_t.add(c_grid, false);
  census_opts(c_grid, false);
  long g_from = 10, g_to = 40, g_step = 2;
  c_grid->add_option("--from", g_from)->check(CLI::Range(10L, 100000L));
  c_grid->add_option("--to", g_to)->check(CLI::Range(10L, 100000L));
  c_grid->add_option("--step", g_step)->check(CLI::Range(1L, 100000L));
  c_grid->add_option("--shards", shards)->check(CLI::Range(1, 256));
  c_grid->callback([&] {
    action = [&] {
      std::vector<long> es;
      for (long e = g_from; e <= g_to; e += g_step) es.push_back(e);
      auto cfg = census_cfg();
      auto rows = census_grid(es, cg_t.group(), census_S, mode(), shards, cfg);
      json arr = json::array();
      for (const auto& b : rows) arr.push_back(census_json(b, run.digits()));
      if (!rows.empty()) run.config["constants"] = constants_json(rows.front().constants, run.digits());
      run.result["grid"] = arr;
    };
  });

  // appendix verify
  auto* apx = app.add_subcommand("appendix", "field-counting certificates");
  apx->require_subcommand(1);
  auto* apx_verify = apx->add_subcommand("verify", "reduced bases, trace matrices and y-search");
  std::optional<std::string> poly_file;
  std::string apx_c1 = "2";
  long quad_max = 0;
  apx_verify->add_option("--poly-file", poly_file, "monic polynomials, leading coefficient first");
  apx_verify->add_option("--c1", apx_c1);
  apx_verify->add_option("--quadratic-max", quad_max, "also certify all quadratic fields with |D| <= N")
      ->check(CLI::Range(0L, 1000000L));
  apx_verify->callback([&] {
    action = [&] {
      using namespace appendix;
      const mpq_class C1 = parse_rational(apx_c1);
      if (C1 <= 0) throw PreconditionError("--c1 must be positive");
      if (!poly_file && quad_max == 0) throw PreconditionError("nothing to verify: give --poly-file or --quadratic-max");
      run.config["C1"] = rational(C1);
      const int dg = run.digits();
      json fields_out = json::array();
      long passed = 0, total = 0;
      if (poly_file) {
        for (const auto& f : read_corpus(*poly_file)) {
          auto K = FieldByPolynomial::from_polynomial(f, run.prec);
          auto c = certify_field(K, C1, run.prec);
          json e;
          e["polynomial"] = c.label;
          e["degree"] = c.degree;
          e["disc"] = integer(c.disc);
          e["signature"] = json{K.r1, K.r2};
          e["maximal"] = c.maximal;
          json norms = json::array();
          for (const auto& n : c.basis.norms) norms.push_back(ball(n, dg));
          json basis = json::array();
          for (const auto& row : c.basis.transform) basis.push_back(row);
          e["basis"] = basis;
          e["norms"] = norms;
          e["ties"] = c.basis.ties;
          e["product_ratio"] = ball(c.basis.product_ratio, dg);
          e["ordered"] = c.basis.ordered;
          e["product_ok"] = c.basis.product_ok;
          e["index_ok"] = c.basis.index_ok;
          e["at_least_one"] = c.basis.all_at_least_one;
          e["trace_matches"] = c.trace.matches;
          e["trace_multiplicative"] = c.trace.multiplicative;
          if (c.y) {
            e["params"] = json{{"s", c.params->s}, {"l", c.params->l}, {"r", c.params->r}};
            e["y_coefficients"] = c.y->coefficients;
            e["y_tried"] = c.y->tried;
            e["y_norm"] = ball(c.y->norm, dg);
            e["y_bound"] = ball(c.y->bound, dg);
            e["y_bound_ok"] = c.y->bound_ok;
            e["span_ranks"] = json{c.y->span.rank_S, c.y->span.rank_doubled};
            e["y_trace_matches"] = c.trace_y->matches;
          }
          e["ok"] = c.ok;
          fields_out.push_back(e);
          ++total;
          passed += c.ok;
        }
      }
      json quad = json::object();
      if (quad_max > 0) {
        long qn = 0, qok = 0;
        json failures = json::array();
        for (const auto& k : enumerate_fundamental_discriminants(quad_max)) {
          auto c = certify_field(FieldByPolynomial::quadratic(k.disc), C1, run.prec);
          ++qn;
          if (c.ok) ++qok;
          else failures.push_back(k.disc);
        }
        quad = json{{"max_abs_disc", quad_max}, {"fields", qn}, {"passed", qok}, {"failures", failures}};
        total += qn;
        passed += qok;
      }
      run.result["fields"] = fields_out;
      if (quad_max > 0) run.result["quadratic"] = quad;
      run.result["total"] = total;
      run.result["passed"] = passed;
      if (passed != total) run.status = kCheckFailed;
    };
  });

  std::vector<std::string> argv_s{"covolume"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    run.prec = precision ? Precision{*precision} : precision_from_env().value_or(Precision{30});
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!action) throw CLI::ValidationError("subcommand", "incomplete command");
    action();
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const CacheFormatError& e) {
    err << "cache error: " << e.what() << "\n";
    return kDataError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const UndecidableError& e) {
    err << "undecidable after precision escalation: " << e.what() << "\n";
    return kUndecidable;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json report;
  report["command"] = command_echo(args);
  json config;
  config["precision"] = run.prec.digits;
  for (auto it = run.config.begin(); it != run.config.end(); ++it) config[it.key()] = it.value();
  report["config"] = config;
  report["result"] = run.result;
  report["status"] = run.status;
  if (json_path) write_file(*json_path, report.dump(2) + "\n");

  print_table(out, run.result);
  out << "status  " << run.status << "\n";
  out << "time    " << std::fixed << std::setprecision(3) << secs << " s\n";
  return run.status;
}

}  // namespace covol::cli
