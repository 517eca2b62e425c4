#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nearflow/json_io.hpp"
#include "nearflow/law_check.hpp"
#include "nearflow/mc_checks.hpp"
#include "nearflow/one_way.hpp"
#include "nearflow/sampling.hpp"

namespace nearflow::cli {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<Rational> parse_rationals(const std::string& csv) {
  std::vector<Rational> out;
  for (const auto& tok : split(csv, ',')) out.push_back(Rational::parse(tok));
  return out;
}

/// '@file' indirection for large JSON payloads.
inline std::string read_payload(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw ParseError("cannot read file: " + arg.substr(1));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& arg) {
  try {
    return json::parse(read_payload(arg));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad JSON payload: ") + e.what());
  }
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

struct Options {
  std::string algebra = "qh";
  std::size_t dim = 1;
  std::string generator;
  std::string family;
  std::string params;
  std::string generator_params;
  std::string times;
  std::string quadruples;
  std::string triples;
  int s_probes = 5;
  int u_probes = 3;
  std::string t_probe = "1/2";
  std::string format = "json";
  std::string kind = "bounded";
  std::string moment = "linear";
  std::string alpha = "0", rho = "0", a = "0", b = "0";
  std::string process = "brownian";
  std::string grid = "1,2,4";
  std::string check = "all";
  std::string dump;
  long paths = 200000;
  std::uint64_t seed = 1;
  double k_sigma = 3.0;
  unsigned workers = 1;
  long samples = 100;
};

namespace detail {

template <typename D, typename FromJson, typename ToJson>
int run_two_way(const Options& opt, const D& dna, FromJson elem_from_json, ToJson elem_to_json,
                const std::string& command, std::ostream& out) {
  using Elem = typename D::Elem;

  auto load_family = [&]() -> FlowFamily<D> {
    if (!opt.generator.empty())
      return FlowFamily<D>::from_generator(elem_from_json(parse_json(opt.generator)));
    if (opt.family.empty()) throw ParseError("need --generator or --family");
    const json j = parse_json(opt.family);
    std::map<TimeTriple, Elem> table;
    for (const auto& entry : j.at("entries")) {
      table.emplace(make_time_triple(rational_from_json(entry.at("r")), rational_from_json(entry.at("s")),
                                     rational_from_json(entry.at("u"))),
                    elem_from_json(entry.at("elem")));
    }
    Rational lower(0);
    if (j.contains("lower_bound")) lower = rational_from_json(j.at("lower_bound"));
    return FlowFamily<D>::from_table(std::move(table), lower);
  };

  auto parse_quads = [&]() {
    std::vector<TimeQuad> quads;
    if (opt.quadruples.empty()) return quads;
    for (const auto& grp : split(opt.quadruples, ';')) {
      auto t = parse_rationals(grp);
      if (t.size() != 4) throw ParseError("quadruples need four times r,s,t,u");
      quads.push_back(make_time_quad(t[0], t[1], t[2], t[3]));
    }
    return quads;
  };

  if (command == "flow-eval") {
    const Elem h = elem_from_json(parse_json(opt.generator));
    json results = json::array();
    const auto groups = split(opt.times, ';');
    for (const auto& grp : groups) {
      auto t = parse_rationals(grp);
      if (t.size() != 3) throw ParseError("two-way flow times need three entries r,s,u");
      results.push_back(elem_to_json(flow_element(dna, h, make_time_triple(t[0], t[1], t[2]))));
    }
    emit(out, groups.size() == 1 ? results[0] : results);
    return 0;
  }

  if (command == "flow-verify") {
    const auto verdict = verify_two_way_flow(dna, load_family(), parse_quads(), opt.s_probes);
    emit(out, to_json(verdict, elem_to_json));
    return verdict.all_pass() ? 0 : 2;
  }

  if (command == "gen-check") {
    const Elem h = elem_from_json(parse_json(opt.generator));
    std::vector<TimeTriple> triples;
    for (const auto& grp : split(opt.triples, ';')) {
      if (grp.empty()) continue;
      auto t = parse_rationals(grp);
      if (t.size() != 3) throw ParseError("triples need three times r,s,u");
      triples.push_back(make_time_triple(t[0], t[1], t[2]));
    }
    const auto quads = parse_quads();
    for (const auto& q : quads) {
      if (q.r.sign() > 0) {
        triples.push_back({q.r, q.s, q.u});
        triples.push_back({q.r, q.t, q.u});
        triples.push_back({q.r, q.s, q.t});
      }
      triples.push_back({q.s, q.t, q.u});
    }
    if (triples.empty()) throw ParseError("gen-check needs --triples or --quadruples");

    FlowVerdict<Elem> verdict = is_flow_generator(dna, h, triples, opt.u_probes);
    if (!quads.empty()) {
      const auto family_verdict =
          verify_two_way_flow(dna, FlowFamily<D>::from_generator(h), quads, opt.s_probes);
      for (const auto& c : family_verdict.checks) verdict.checks.push_back(c);
    }
    emit(out, to_json(verdict, elem_to_json));
    return verdict.all_pass() ? 0 : 2;
  }

  if (command == "gen-recover") {
    const auto family = load_family();
    emit(out, elem_to_json(recover_generator(dna, family, Rational::parse(opt.t_probe))));
    return 0;
  }

  throw ParseError("unknown two-way command: " + command);
}

inline int run_affine_flow_eval(const Options& opt, std::ostream& out) {
  const json j = parse_json(opt.generator);
  const AffineElem raw = affine_from_json(j);
  const AffineGenerator gen = make_affine_generator(raw.alpha, raw.vec);
  json results = json::array();
  const auto groups = split(opt.times, ';');
  for (const auto& grp : groups) {
    auto t = parse_rationals(grp);
    if (t.size() != 2) throw ParseError("one-way flow times need two entries s,t");
    results.push_back(to_json(aff_one_way_flow(gen, t[0], t[1])));
  }
  emit(out, groups.size() == 1 ? results[0] : results);
  return 0;
}

}  // namespace detail

inline int run_laws_check(const Options& opt, std::ostream& out) {
  Sampler sampler(opt.seed);
  const long n = opt.samples;
  json report;
  bool pass = false;
  if (opt.algebra == "affine") {
    AffineAlgebra alg(opt.dim);
    std::vector<AffineElem> xs;
    for (long i = 0; i < n; ++i) xs.push_back(sampler.affine_elem(opt.dim));
    auto rep = check_laws(alg, std::span<const AffineElem>(xs), opt.workers);
    pass = rep.all_pass();
    report = to_json(rep, [](const AffineElem& e) { return to_json(e); });
  } else if (opt.algebra == "endo") {
    EndoPairDna dna(opt.dim);
    std::vector<EndoPair> xs;
    for (long i = 0; i < n; ++i) xs.push_back(sampler.endo_pair(opt.dim));
    auto rep = check_laws(dna, std::span<const EndoPair>(xs), opt.workers);
    pass = rep.all_pass();
    report = to_json(rep, [](const EndoPair& e) { return to_json(e); });
  } else if (opt.algebra == "qh") {
    QhDna dna;
    std::vector<QhElem> xs;
    for (long i = 0; i < n; ++i) xs.push_back(sampler.qh_elem());
    auto rep = check_laws(dna, std::span<const QhElem>(xs), opt.workers);
    pass = rep.all_pass();
    report = to_json(rep, [](const QhElem& e) { return to_json(e); });
  } else {
    throw ParseError("unknown algebra: " + opt.algebra);
  }
  emit(out, report);
  return pass ? 0 : 2;
}

inline int run_coeff_command(const Options& opt, const std::string& command, std::ostream& out) {
  auto triple_groups = [&]() {
    std::vector<std::array<Rational, 3>> groups;
    for (const auto& grp : split(opt.times, ';')) {
      auto t = parse_rationals(grp);
      if (t.size() != 3) throw ParseError("times need three entries r,s,u");
      groups.push_back({t[0], t[1], t[2]});
    }
    return groups;
  };

  const bool csv = opt.format == "csv";
  std::ostringstream csv_out;
  json rows = json::array();

  if (command == "harness-coeffs" && opt.moment == "second") {
    const HarnessKind kind = opt.kind == "bounded" ? HarnessKind::bounded : HarnessKind::unbounded;
    csv_out << "s,t,a_ts,b_ts,c_ts\n";
    for (const auto& grp : split(opt.times, ';')) {
      auto t = parse_rationals(grp);
      if (t.size() != 2) throw ParseError("second-moment times need two entries s,t");
      const auto c = second_moment_coeffs(kind, Rational::parse(opt.a), Rational::parse(opt.b), t[1], t[0]);
      csv_out << t[0] << "," << t[1] << "," << c.a_ts << "," << c.b_ts << "," << c.c_ts << "\n";
      rows.push_back(json{{"s", t[0].str()},
                          {"t", t[1].str()},
                          {"a_ts", c.a_ts.str()},
                          {"b_ts", c.b_ts.str()},
                          {"c_ts", c.c_ts.str()}});
    }
  } else if (command == "harness-coeffs") {
    const HarnessKind kind = opt.kind == "bounded" ? HarnessKind::bounded : HarnessKind::unbounded;
    csv_out << "r,s,u,a,b,A_ru,B_ru\n";
    for (const auto& t : triple_groups()) {
      const auto c = linear_harness_coeffs(kind, Rational::parse(opt.alpha), Rational::parse(opt.rho), t[0],
                                           t[1], t[2]);
      csv_out << t[0] << "," << t[1] << "," << t[2] << "," << c.a << "," << c.b << "," << c.A_ru << ","
              << c.B_ru << "\n";
      rows.push_back(json{{"r", t[0].str()},
                          {"s", t[1].str()},
                          {"u", t[2].str()},
                          {"a", c.a.str()},
                          {"b", c.b.str()},
                          {"A_ru", c.A_ru.str()},
                          {"B_ru", c.B_ru.str()}});
    }
  } else if (command == "qh-coeffs") {
    GeneratorParams6 g = opt.generator_params.empty()
                             ? params_to_generator(qh_params_from_json(parse_json(opt.params))).first
                             : generator_params_from_json(parse_json(opt.generator_params));
    csv_out << "r,s,u,A,B,C,D,E,F,a,b\n";
    for (const auto& t : triple_groups()) {
      const auto c = qh_regression_coeffs(g, t[0], t[1], t[2]);
      csv_out << t[0] << "," << t[1] << "," << t[2] << "," << c.A << "," << c.B << "," << c.C << "," << c.D
              << "," << c.E << "," << c.F << "," << c.a << "," << c.b << "\n";
      json row{{"r", t[0].str()}, {"s", t[1].str()}, {"u", t[2].str()}};
      row.update(to_json(c));
      rows.push_back(row);
    }
  } else if (command == "variance-coeffs") {
    const QhParams p = qh_params_from_json(parse_json(opt.params));
    csv_out << "r,s,u,xr2,xrxu,xu2,xr,xu,one\n";
    for (const auto& t : triple_groups()) {
      const auto v = variance_coeffs(p, t[0], t[1], t[2]);
      csv_out << t[0] << "," << t[1] << "," << t[2] << "," << v.xr2 << "," << v.xrxu << "," << v.xu2 << ","
              << v.xr << "," << v.xu << "," << v.one << "\n";
      json row{{"r", t[0].str()}, {"s", t[1].str()}, {"u", t[2].str()}};
      row.update(to_json(v));
      rows.push_back(row);
    }
  } else {
    throw ParseError("unknown coefficient command: " + command);
  }

  if (csv) {
    out << csv_out.str();
  } else {
    emit(out, rows);
  }
  return 0;
}

inline SimConfig sim_config_from(const Options& opt) {
  SimConfig cfg;
  if (opt.process == "brownian") {
    cfg.kind = ProcessKind::brownian;
  } else if (opt.process == "sign") {
    cfg.kind = ProcessKind::sign_q_minus_1;
  } else if (opt.process == "scaled-rademacher") {
    cfg.kind = ProcessKind::scaled;
    cfg.y_law = YLaw::rademacher;
  } else if (opt.process == "scaled-gaussian") {
    cfg.kind = ProcessKind::scaled;
    cfg.y_law = YLaw::gaussian;
  } else {
    throw ParseError("unknown process: " + opt.process);
  }
  for (const auto& r : parse_rationals(opt.grid)) cfg.grid.push_back(r.to_double());
  cfg.paths = opt.paths;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  return cfg;
}

inline int run_simulate(const Options& opt, std::ostream& out) {
  const SimConfig cfg = sim_config_from(opt);
  const PathMatrix m = simulate(cfg);

  if (!opt.dump.empty()) {
    json header{{"process", opt.process},
                {"grid", cfg.grid},
                {"n_paths", m.n_paths},
                {"seed", cfg.seed},
                {"layout", "column-major float64"}};
    std::ofstream hdr(opt.dump + ".json");
    hdr << header.dump(2) << "\n";
    std::ofstream bin(opt.dump + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  }

  json moments = json::array();
  for (std::size_t j = 0; j < m.grid.size(); ++j) {
    const auto m1 = sample_moment(m, j, 1);
    const auto m2 = sample_moment(m, j, 2);
    moments.push_back(json{{"t", m.grid[j]}, {"mean", m1.mean}, {"second_moment", m2.mean}});
  }
  emit(out, json{{"process", opt.process},
                 {"grid", cfg.grid},
                 {"n_paths", m.n_paths},
                 {"seed", cfg.seed},
                 {"moments", moments}});
  return 0;
}

inline int run_mc_validate(const Options& opt, std::ostream& out) {
  std::vector<mc_checks::Outcome> outcomes;
  if (opt.check == "all") {
    outcomes = mc_checks::run_all(opt.paths, opt.seed, opt.k_sigma, opt.workers);
  } else if (opt.check == "brownian-linear") {
    outcomes.push_back(mc_checks::brownian_linear(opt.paths, opt.seed, opt.k_sigma, opt.workers));
  } else if (opt.check == "brownian-onesided") {
    outcomes.push_back(mc_checks::brownian_onesided(opt.paths, opt.seed, opt.k_sigma, opt.workers));
  } else if (opt.check == "sign-cov") {
    outcomes.push_back(mc_checks::sign_covariance(opt.paths, opt.seed, opt.k_sigma, opt.workers));
  } else if (opt.check == "sign-rank") {
    outcomes.push_back(mc_checks::sign_rank(opt.paths, opt.seed, opt.k_sigma, opt.workers));
  } else if (opt.check == "scaled-nonuniq") {
    outcomes.push_back(mc_checks::scaled_nonuniqueness(opt.paths, opt.seed, opt.k_sigma, opt.workers));
  } else {
    throw ParseError("unknown check: " + opt.check);
  }

  bool all = true;
  json checks = json::array();
  for (const auto& o : outcomes) {
    all = all && o.pass;
    json rows = json::array();
    for (const auto& r : o.rows) {
      rows.push_back(json{{"name", r.name},
                          {"estimate", r.estimate},
                          {"theory", r.theory},
                          {"se", r.se},
                          {"z", r.z},
                          {"pass", r.pass}});
    }
    checks.push_back(json{{"check", o.name}, {"pass", o.pass}, {"rows", rows}});
  }
  emit(out, json{{"pass", all}, {"paths", opt.paths}, {"seed", opt.seed}, {"k_sigma", opt.k_sigma},
                 {"checks", checks}});
  return all ? 0 : 2;
}

inline int dispatch(const Options& opt, const std::string& command, std::ostream& out) {
  if (command == "laws-check") return run_laws_check(opt, out);
  if (command == "harness-coeffs" || command == "qh-coeffs" || command == "variance-coeffs")
    return run_coeff_command(opt, command, out);
  if (command == "simulate") return run_simulate(opt, out);
  if (command == "mc-validate") return run_mc_validate(opt, out);

  // Flow commands need a concrete algebra.
  if (opt.algebra == "affine") {
    if (command == "flow-eval") return detail::run_affine_flow_eval(opt, out);
    throw ParseError("command " + command + " needs a double near algebra (--algebra endo|qh)");
  }
  if (opt.algebra == "endo") {
    EndoPairDna dna(opt.dim);
    return detail::run_two_way(opt, dna, [](const json& j) { return endo_pair_from_json(j); },
                               [](const EndoPair& e) { return to_json(e); }, command, out);
  }
  if (opt.algebra == "qh") {
    QhDna dna;
    if (command == "gen-check" && !opt.generator.empty()) {
      // Necessary-condition prefilter on the lower coordinates.
      const QhElem h = qh_from_json(parse_json(opt.generator));
      if (auto w = qh_generator_prefilter(h)) {
        FlowVerdict<QhElem> verdict;
        FlowCheck<QhElem> pre{"prefilter"};
        pre.fail({w->r, w->s},
                 "lower coordinates violate the scalar admissibility bounds: b(r, s) = 0 at the "
                 "reported times (need g2 in [-1, 0] and g1 + g2 >= 0)");
        verdict.checks.push_back(pre);
        emit(out, to_json(verdict, [](const QhElem& e) { return to_json(e); }));
        return 2;
      }
    }
    return detail::run_two_way(opt, dna, [](const json& j) { return qh_from_json(j); },
                               [](const QhElem& e) { return to_json(e); }, command, out);
  }
  throw ParseError("unknown algebra: " + opt.algebra);
}

/// Entry point shared by main() and the tests. Exit codes: 0 success or all
/// checks verified, 1 usage error, 2 verification failed (verdict on stdout),
/// 3 domain or invertibility error.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"near-algebra flows: exact verification and Monte Carlo validation"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--algebra", opt.algebra, "affine | endo | qh");
    sub->add_option("--dim", opt.dim, "dimension for affine/endo algebras");
    return sub;
  };

  auto* laws = add_common(app.add_subcommand("laws-check", "sweep the algebra laws over random samples"));
  laws->add_option("--samples", opt.samples);
  laws->add_option("--seed", opt.seed);
  laws->add_option("--workers", opt.workers);

  auto* feval = add_common(app.add_subcommand("flow-eval", "evaluate a generator-backed flow"));
  feval->add_option("--generator", opt.generator)->required();
  feval->add_option("--times", opt.times)->required();

  auto* fverify = add_common(app.add_subcommand("flow-verify", "verify the two-way flow equations"));
  fverify->add_option("--generator", opt.generator);
  fverify->add_option("--family", opt.family);
  fverify->add_option("--quadruples", opt.quadruples)->required();
  fverify->add_option("--s-probes", opt.s_probes);

  auto* gcheck = add_common(app.add_subcommand("gen-check", "test the flow-generator conditions"));
  gcheck->add_option("--generator", opt.generator)->required();
  gcheck->add_option("--triples", opt.triples);
  gcheck->add_option("--quadruples", opt.quadruples);
  gcheck->add_option("--u-probes", opt.u_probes);
  gcheck->add_option("--s-probes", opt.s_probes);

  auto* grecover = add_common(app.add_subcommand("gen-recover", "recover the generator from a family"));
  grecover->add_option("--generator", opt.generator);
  grecover->add_option("--family", opt.family);
  grecover->add_option("--t-probe", opt.t_probe);

  auto* hc = app.add_subcommand("harness-coeffs", "linear or one-sided second-moment coefficients");
  hc->add_option("--kind", opt.kind, "bounded | unbounded");
  hc->add_option("--moment", opt.moment, "linear | second");
  hc->add_option("--alpha", opt.alpha);
  hc->add_option("--rho", opt.rho);
  hc->add_option("--a", opt.a);
  hc->add_option("--b", opt.b);
  hc->add_option("--times", opt.times)->required();
  hc->add_option("--format", opt.format, "json | csv");

  auto* qc = app.add_subcommand("qh-coeffs", "quadratic-harness regression coefficients");
  qc->add_option("--params", opt.params);
  qc->add_option("--generator-params", opt.generator_params);
  qc->add_option("--times", opt.times)->required();
  qc->add_option("--format", opt.format);

  auto* vc = app.add_subcommand("variance-coeffs", "conditional-variance coefficients");
  vc->add_option("--params", opt.params)->required();
  vc->add_option("--times", opt.times)->required();
  vc->add_option("--format", opt.format);

  auto* sim = app.add_subcommand("simulate", "simulate a process and report sample moments");
  sim->add_option("--process", opt.process, "brownian | sign | scaled-rademacher | scaled-gaussian");
  sim->add_option("--grid", opt.grid);
  sim->add_option("--paths", opt.paths);
  sim->add_option("--seed", opt.seed);
  sim->add_option("--workers", opt.workers);
  sim->add_option("--dump", opt.dump, "write <base>.json header and <base>.bin column-major doubles");

  auto* mcv = app.add_subcommand("mc-validate", "Monte Carlo validation of the coefficient formulas");
  mcv->add_option("--check", opt.check,
                  "all | brownian-linear | brownian-onesided | sign-cov | sign-rank | scaled-nonuniq");
  mcv->add_option("--paths", opt.paths);
  mcv->add_option("--seed", opt.seed);
  mcv->add_option("--k-sigma", opt.k_sigma);
  mcv->add_option("--workers", opt.workers);

  std::vector<const char*> argv;
  argv.push_back("nearflow");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream ss;
    const int code = app.exit(e, ss, ss);
    (code == 0 ? out : err) << ss.str();
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(opt, command, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    emit(out, json{{"error", e.what()}});
    return 3;
  }
}

}  // namespace nearflow::cli
