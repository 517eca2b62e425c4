#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "nearflow/affine.hpp"
#include "nearflow/endo_pair.hpp"
#include "nearflow/flow_engine.hpp"
#include "nearflow/harness_coeffs.hpp"
#include "nearflow/law_check.hpp"
#include "nearflow/process_lab.hpp"
#include "nearflow/qh.hpp"

namespace nearflow {

using json = nlohmann::ordered_json;

// Rationals cross every JSON surface as canonical strings "n/d" (or "n").

inline json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw ParseError("expected a rational string, got: " + j.dump());
}

inline json to_json(const AffineElem& e) {
  json vec = json::array();
  for (const auto& v : e.vec) vec.push_back(v.str());
  return json{{"alpha", e.alpha.str()}, {"vec", vec}};
}

inline AffineElem affine_from_json(const json& j) {
  AffineElem e;
  e.alpha = rational_from_json(j.at("alpha"));
  for (const auto& v : j.at("vec")) e.vec.push_back(rational_from_json(v));
  return e;
}

inline json to_json(const RMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

inline RMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be a nonempty array of rows");
  const std::size_t n = j.size();
  RMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw ParseError("matrix JSON must be square");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = rational_from_json(j[i][k]);
  }
  return m;
}

inline json to_json(const EndoPair& e) { return json{{"a1", to_json(e.a1)}, {"a2", to_json(e.a2)}}; }

inline EndoPair endo_pair_from_json(const json& j) {
  EndoPair e{matrix_from_json(j.at("a1")), matrix_from_json(j.at("a2"))};
  if (e.a1.dim() != e.a2.dim()) throw ParseError("a1 and a2 must have equal dimension");
  return e;
}

inline json to_json(const QhElem& e) {
  json x = json::array(), u = json::array();
  for (const auto& v : e.x) x.push_back(v.str());
  for (const auto& v : e.u) u.push_back(v.str());
  return json{{"x", x}, {"u", u}};
}

inline QhElem qh_from_json(const json& j) {
  const auto& x = j.at("x");
  const auto& u = j.at("u");
  if (x.size() != 6 || u.size() != 2) throw ParseError("qh element needs 6 upper and 2 lower coordinates");
  QhElem e;
  for (int i = 0; i < 6; ++i) e.x[i] = rational_from_json(x[i]);
  for (int i = 0; i < 2; ++i) e.u[i] = rational_from_json(u[i]);
  return e;
}

inline json to_json(const QhParams& p) {
  return json{{"theta", p.theta.str()}, {"eta", p.eta.str()}, {"sigma", p.sigma.str()},
              {"tau", p.tau.str()},     {"gamma", p.gamma.str()}, {"chi", p.chi}};
}

inline QhParams qh_params_from_json(const json& j) {
  int chi;
  const auto& jc = j.at("chi");
  if (jc.is_number_integer()) {
    chi = jc.get<int>();
  } else {
    const Rational c = rational_from_json(jc);
    if (c == Rational(0)) chi = 0;
    else if (c == Rational(1)) chi = 1;
    else throw InvalidParams("chi must be 0 or 1");
  }
  return make_qh_params(rational_from_json(j.at("theta")), rational_from_json(j.at("eta")),
                        rational_from_json(j.at("sigma")), rational_from_json(j.at("tau")),
                        rational_from_json(j.at("gamma")), chi);
}

inline json to_json(const GeneratorParams6& g) {
  return json{{"alpha", g.alpha.str()}, {"beta", g.beta.str()}, {"rho", g.rho.str()},
              {"h4", g.h4.str()},       {"h5", g.h5.str()},     {"h6", g.h6.str()}};
}

inline GeneratorParams6 generator_params_from_json(const json& j) {
  return make_generator_params(rational_from_json(j.at("alpha")), rational_from_json(j.at("beta")),
                               rational_from_json(j.at("rho")), rational_from_json(j.at("h4")),
                               rational_from_json(j.at("h5")), rational_from_json(j.at("h6")));
}

inline json to_json(const QuadCoeffTable& t) {
  return json{{"A", t.A.str()}, {"B", t.B.str()}, {"C", t.C.str()}, {"D", t.D.str()},
              {"E", t.E.str()}, {"F", t.F.str()}, {"a", t.a.str()}, {"b", t.b.str()}};
}

inline json to_json(const VarCoeffTable& v) {
  return json{{"xr2", v.xr2.str()}, {"xrxu", v.xrxu.str()}, {"xu2", v.xu2.str()},
              {"xr", v.xr.str()},   {"xu", v.xu.str()},     {"one", v.one.str()}};
}

template <typename Elem, typename ElemToJson>
json to_json(const LawReport<Elem>& report, ElemToJson elem_to_json) {
  json laws = json::array();
  for (const auto& l : report.laws) {
    json entry{{"law", l.law}, {"pass", l.pass}};
    if (l.witness) {
      json w{{"law", l.witness->law}};
      json idx = json::array();
      for (auto i : l.witness->indices) idx.push_back(i);
      w["indices"] = idx;
      json ops = json::array();
      for (const auto& e : l.witness->operands) ops.push_back(elem_to_json(e));
      w["operands"] = ops;
      if (l.witness->scalar) w["scalar"] = l.witness->scalar->str();
      w["lhs"] = elem_to_json(l.witness->lhs);
      w["rhs"] = elem_to_json(l.witness->rhs);
      entry["witness"] = w;
    }
    laws.push_back(entry);
  }
  return json{{"all_pass", report.all_pass()}, {"laws", laws}};
}

template <typename Elem, typename ElemToJson>
json to_json(const FlowVerdict<Elem>& verdict, ElemToJson elem_to_json) {
  json checks = json::array();
  for (const auto& c : verdict.checks) {
    json entry{{"check", c.check}, {"pass", c.pass}};
    if (!c.pass) {
      json w;
      json times = json::array();
      for (const auto& t : c.times) times.push_back(t.str());
      w["times"] = times;
      w["note"] = c.note;
      if (c.lhs) w["lhs"] = elem_to_json(*c.lhs);
      if (c.rhs) w["rhs"] = elem_to_json(*c.rhs);
      entry["witness"] = w;
    }
    checks.push_back(entry);
  }
  return json{{"all_pass", verdict.all_pass()}, {"checks", checks}};
}

inline json to_json(const RegressionEstimate& est) {
  json coef = json::array(), se = json::array(), names = json::array();
  for (int j = 0; j < est.coef.size(); ++j) {
    coef.push_back(est.coef(j));
    se.push_back(est.se(j));
    names.push_back(est.names[j]);
  }
  return json{{"names", names},         {"coef", coef}, {"se", se}, {"rank", est.rank},
              {"rank_deficient", est.rank_deficient}, {"n", est.n}};
}

inline json to_json(const McReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(json{{"name", r.name},
                        {"estimate", r.estimate},
                        {"theory", r.theory},
                        {"se", r.se},
                        {"z", r.z},
                        {"pass", r.pass}});
  }
  return json{{"pass", rep.pass}, {"rows", rows}};
}

}  // namespace nearflow
