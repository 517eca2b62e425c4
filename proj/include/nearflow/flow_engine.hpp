#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nearflow/algebra.hpp"
#include "nearflow/law_check.hpp"

namespace nearflow {

/// Admissible times 0 <= r < s < u of a two-way flow element x_{sru}
/// (s is the middle time).
struct TimeTriple {
  Rational r, s, u;

  friend bool operator<(const TimeTriple& a, const TimeTriple& b) {
    if (a.r != b.r) return a.r < b.r;
    if (a.s != b.s) return a.s < b.s;
    return a.u < b.u;
  }
  friend bool operator==(const TimeTriple& a, const TimeTriple& b) {
    return a.r == b.r && a.s == b.s && a.u == b.u;
  }
};

inline TimeTriple make_time_triple(Rational r, Rational s, Rational u) {
  if (r.sign() < 0 || !(r < s) || !(s < u))
    throw DomainError("time triple needs 0 <= r < s < u, got (" + r.str() + ", " + s.str() + ", " + u.str() + ")");
  return {std::move(r), std::move(s), std::move(u)};
}

struct TimeQuad {
  Rational r, s, t, u;
};

inline TimeQuad make_time_quad(Rational r, Rational s, Rational t, Rational u) {
  if (r.sign() < 0 || !(r < s) || !(s < t) || !(t < u))
    throw DomainError("time quadruple needs 0 <= r < s < t < u");
  return {std::move(r), std::move(s), std::move(t), std::move(u)};
}

/// Generator curve h_r = r(1-r) h + (1-r) e_⋊ + r e_⋉; h_0 = e_⋊, h_1 = e_⋉.
template <DoubleNearAlgebra D>
typename D::Elem generator_curve(const D& alg, const typename D::Elem& h, const Rational& r) {
  if (r.sign() < 0) throw DomainError("generator_curve needs r >= 0");
  const Rational one(1);
  return alg.add(alg.add(alg.scale(r * (one - r), h), alg.scale(one - r, alg.id_r())),
                 alg.scale(r, alg.id_l()));
}

/// w_{ru} = h_u^{-⋉} ⋉ h_r for 0 <= r < u.
template <DoubleNearAlgebra D>
typename D::Elem w_element(const D& alg, const typename D::Elem& h, const Rational& r, const Rational& u) {
  if (r.sign() < 0 || !(r < u)) throw DomainError("w_element needs 0 <= r < u");
  auto hu_inv = alg.try_inverse_l(generator_curve(alg, h, u));
  if (!hu_inv) throw NotInvertible("w_element: h_u has no ltimes-inverse at u = " + u.str());
  return alg.mul_l(*hu_inv, generator_curve(alg, h, r));
}

/// x_{sru} = w_{ru}^{-⋊} ⋊ w_{su}.
template <DoubleNearAlgebra D>
typename D::Elem flow_element(const D& alg, const typename D::Elem& h, const TimeTriple& t) {
  auto w_ru_inv = alg.try_inverse_r(w_element(alg, h, t.r, t.u));
  if (!w_ru_inv)
    throw NotInvertible("flow_element: w_{ru} has no rtimes-inverse at (r, u) = (" + t.r.str() + ", " +
                        t.u.str() + ")");
  return alg.mul_r(*w_ru_inv, w_element(alg, h, t.s, t.u));
}

/// Family x_{sru} on triples with r >= lower_bound, either generated from a
/// single element or backed by an explicit table. Shifting by p > 0 presents
/// the family t -> x_{(s+p)(r+p)(u+p)}.
template <DoubleNearAlgebra D>
class FlowFamily {
 public:
  using Elem = typename D::Elem;

  static FlowFamily from_generator(Elem h, Rational lower_bound = Rational(0)) {
    FlowFamily f;
    f.generator_ = std::move(h);
    f.lower_ = std::move(lower_bound);
    return f;
  }
  static FlowFamily from_table(std::map<TimeTriple, Elem> table, Rational lower_bound = Rational(0)) {
    FlowFamily f;
    f.table_ = std::move(table);
    f.lower_ = std::move(lower_bound);
    return f;
  }

  bool generator_backed() const { return generator_.has_value(); }
  const std::optional<Elem>& generator() const { return generator_; }
  const Rational& shift() const { return shift_; }

  /// Effective lower bound after shifting: max(0, lower - shift).
  Rational lower_bound() const {
    const Rational l = lower_ - shift_;
    return l.sign() > 0 ? l : Rational(0);
  }

  FlowFamily shifted(const Rational& p) const {
    FlowFamily f = *this;
    f.shift_ += p;
    return f;
  }

  Elem at(const D& alg, const TimeTriple& t) const {
    if (t.r < lower_bound())
      throw DomainError("flow family not defined below r = " + lower_bound().str());
    const TimeTriple shifted{t.r + shift_, t.s + shift_, t.u + shift_};
    if (generator_) return flow_element(alg, *generator_, shifted);
    auto it = table_->find(shifted);
    if (it == table_->end())
      throw DomainError("flow table has no entry at (" + shifted.r.str() + ", " + shifted.s.str() + ", " +
                        shifted.u.str() + ")");
    return it->second;
  }

  /// Middle times s available for the pair (r, u); probe grid for generator
  /// families, table keys otherwise.
  std::vector<Rational> structure_probes(const Rational& r, const Rational& u, int count) const {
    std::vector<Rational> out;
    if (generator_) {
      for (int k = 1; k <= count; ++k) out.push_back(r + Rational(k) * (u - r) / Rational(count + 1));
      return out;
    }
    for (const auto& [key, value] : *table_) {
      if (key.r == r + shift_ && key.u == u + shift_) out.push_back(key.s - shift_);
    }
    return out;
  }

 private:
  FlowFamily() = default;
  std::optional<Elem> generator_;
  std::optional<std::map<TimeTriple, Elem>> table_;
  Rational lower_;
  Rational shift_;
};

template <DoubleNearAlgebra D>
FlowFamily<D> shift_family(const FlowFamily<D>& family, const Rational& p) {
  if (p.sign() <= 0) throw DomainError("shift_family needs p > 0");
  return family.shifted(p);
}

/// One named check of a flow verdict; a failing check carries the times and
/// both sides (or a note) needed to replay the violation.
template <typename Elem>
struct FlowCheck {
  std::string check;
  bool pass = true;
  std::vector<Rational> times;
  std::string note;
  std::optional<Elem> lhs, rhs;

  void fail(std::vector<Rational> at, std::string why, std::optional<Elem> l = std::nullopt,
            std::optional<Elem> r = std::nullopt) {
    if (!pass) return;  // keep the first witness
    pass = false;
    times = std::move(at);
    note = std::move(why);
    lhs = std::move(l);
    rhs = std::move(r);
  }
};

template <typename Elem>
struct FlowVerdict {
  std::vector<FlowCheck<Elem>> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const FlowCheck<Elem>* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.check == name) return &c;
    return nullptr;
  }
};

/// Checks both flow equations at each quadruple, the structure condition at
/// `s_probes` middle times per (r, u) pair, and two-sided invertibility of
/// every element touched. Verdict-based: evaluation failures are recorded,
/// never thrown.
template <DoubleNearAlgebra D>
FlowVerdict<typename D::Elem> verify_two_way_flow(const D& alg, const FlowFamily<D>& family,
                                                  const std::vector<TimeQuad>& quadruples, int s_probes = 5) {
  using Elem = typename D::Elem;
  FlowCheck<Elem> eq1{"flow_eq_1"}, eq2{"flow_eq_2"}, structure{"structure"}, invert{"invertibility"};

  auto elem_at = [&](const Rational& r, const Rational& s, const Rational& u) {
    return family.at(alg, make_time_triple(r, s, u));
  };

  std::set<std::pair<Rational, Rational>> ru_pairs;
  for (const auto& q : quadruples) {
    ru_pairs.insert({q.r, q.u});
    const std::vector<Rational> times{q.r, q.s, q.t, q.u};
    // x_{sru} ⋊ x_{tsu} = x_{tru}
    try {
      Elem lhs = alg.mul_r(elem_at(q.r, q.s, q.u), elem_at(q.s, q.t, q.u));
      Elem rhs = elem_at(q.r, q.t, q.u);
      if (!alg.equal(lhs, rhs)) eq1.fail(times, "first flow equation violated", lhs, rhs);
    } catch (const Error& e) {
      invert.fail(times, std::string("first flow equation: ") + e.what());
    }
    // x_{tru} ⋉ x_{srt} = x_{sru}
    try {
      Elem lhs = alg.mul_l(elem_at(q.r, q.t, q.u), elem_at(q.r, q.s, q.t));
      Elem rhs = elem_at(q.r, q.s, q.u);
      if (!alg.equal(lhs, rhs)) eq2.fail(times, "second flow equation violated", lhs, rhs);
    } catch (const Error& e) {
      invert.fail(times, std::string("second flow equation: ") + e.what());
    }
    // Two-way flows consist of elements invertible for both multiplications.
    for (const auto& [r, s, u] :
         {std::array{q.r, q.s, q.u}, std::array{q.s, q.t, q.u}, std::array{q.r, q.t, q.u},
          std::array{q.r, q.s, q.t}}) {
      try {
        const Elem x = elem_at(r, s, u);
        if (!alg.try_inverse_l(x))
          invert.fail({r, s, u}, "element not ltimes-invertible", x);
        if (!alg.try_inverse_r(x))
          invert.fail({r, s, u}, "element not rtimes-invertible", x);
      } catch (const Error& e) {
        invert.fail({r, s, u}, e.what());
      }
    }
  }

  // (x_{sru} - e_⋉)/(u-s) + (x_{sru} - e_⋊)/(s-r) must not depend on s.
  const Elem el = alg.id_l(), er = alg.id_r();
  for (const auto& [r, u] : ru_pairs) {
    std::optional<Elem> ref;
    Rational ref_s;
    for (const Rational& s : family.structure_probes(r, u, s_probes)) {
      try {
        const Elem x = elem_at(r, s, u);
        Elem combo = alg.add(alg.scale((u - s).inverse(), alg.sub(x, el)),
                             alg.scale((s - r).inverse(), alg.sub(x, er)));
        if (!ref) {
          ref = std::move(combo);
          ref_s = s;
        } else if (!alg.equal(*ref, combo)) {
          structure.fail({r, ref_s, s, u}, "structure combination depends on the middle time", *ref, combo);
        }
      } catch (const Error& e) {
        invert.fail({r, s, u}, std::string("structure probe: ") + e.what());
      }
    }
  }

  return {{eq1, eq2, structure, invert}};
}

/// Generator test per the definition plus the simpler sufficiency criterion.
/// (a) At each triple 0 < r < s < u:
///       w_{ru}^{-⋊} ⋊ w_{su} = (w_{rs}^{-⋊} ⋊ w_{su}^{-⋉})^{-⋉}.
/// (b) For each distinct r, the expression
///       1/(u(u-r)) (w_{ru}^{-⋊})^{-⋉} + 1/(ru) e_⋉ - 1/(r(u-r)) e_⋊
///     is evaluated at `u_probes` values of u and must not depend on u.
/// Sufficiency passing while (a) fails is flagged as an inconsistency.
template <DoubleNearAlgebra D>
FlowVerdict<typename D::Elem> is_flow_generator(const D& alg, const typename D::Elem& h,
                                                const std::vector<TimeTriple>& triples, int u_probes = 3) {
  using Elem = typename D::Elem;
  FlowCheck<Elem> gen{"generator"}, suff{"sufficiency"}, consistency{"consistency"};

  auto w = [&](const Rational& a, const Rational& b) { return w_element(alg, h, a, b); };
  auto inv_l = [&](const Elem& x, const char* what) {
    auto r = alg.try_inverse_l(x);
    if (!r) throw NotInvertible(std::string(what) + " has no ltimes-inverse");
    return *r;
  };
  auto inv_r = [&](const Elem& x, const char* what) {
    auto r = alg.try_inverse_r(x);
    if (!r) throw NotInvertible(std::string(what) + " has no rtimes-inverse");
    return *r;
  };

  std::set<Rational> r_values;
  for (const auto& t : triples) {
    if (t.r.sign() <= 0) throw DomainError("is_flow_generator triples need 0 < r < s < u");
    r_values.insert(t.r);
    try {
      Elem lhs = alg.mul_r(inv_r(w(t.r, t.u), "w_{ru}"), w(t.s, t.u));
      Elem rhs = inv_l(alg.mul_r(inv_r(w(t.r, t.s), "w_{rs}"), inv_l(w(t.s, t.u), "w_{su}")),
                       "w_{rs}^{-r} r w_{su}^{-l}");
      if (!alg.equal(lhs, rhs))
        gen.fail({t.r, t.s, t.u}, "generator condition violated", lhs, rhs);
    } catch (const Error& e) {
      gen.fail({t.r, t.s, t.u}, e.what());
    }
  }

  // The simpler criterion is sufficient only: where its expression is not
  // well defined (the inner inverse may be missing even for a generator) the
  // probe is skipped, never counted as a failure.
  const Elem el = alg.id_l(), er = alg.id_r();
  int skipped_probes = 0;
  for (const Rational& r : r_values) {
    std::optional<Elem> ref;
    Rational ref_u;
    for (int k = 1; k <= u_probes; ++k) {
      const Rational u = r + Rational(k);
      try {
        Elem expr = alg.add(
            alg.sub(alg.scale((u * (u - r)).inverse(), inv_l(inv_r(w(r, u), "w_{ru}"), "w_{ru}^{-r}")),
                    alg.scale((r * (u - r)).inverse(), er)),
            alg.scale((r * u).inverse(), el));
        if (!ref) {
          ref = std::move(expr);
          ref_u = u;
        } else if (!alg.equal(*ref, expr)) {
          suff.fail({r, ref_u, u}, "sufficiency expression depends on u", *ref, expr);
        }
      } catch (const Error&) {
        ++skipped_probes;
      }
    }
  }
  if (suff.pass && skipped_probes > 0)
    suff.note = "not well defined at " + std::to_string(skipped_probes) + " probe(s); those were skipped";

  if (suff.pass && skipped_probes == 0 && !gen.pass)
    consistency.fail(gen.times, "sufficiency passed at every probe but the generator condition failed");
  return {{gen, suff, consistency}};
}

/// Recovers the unique generator from the family's value at (0, t, 1):
/// h = 1/((1-t)t) x_{t01} - 1/(1-t) e_⋉ - 1/t e_⋊, independent of t in (0,1).
template <DoubleNearAlgebra D>
typename D::Elem recover_generator(const D& alg, const FlowFamily<D>& family, const Rational& t_probe) {
  if (family.lower_bound().sign() > 0)
    throw DomainError("recover_generator needs a family defined at r = 0");
  if (t_probe.sign() <= 0 || !(t_probe < Rational(1)))
    throw DomainError("recover_generator needs t_probe in (0, 1)");
  const Rational one(1);
  const auto x = family.at(alg, make_time_triple(Rational(0), t_probe, one));
  return alg.sub(alg.sub(alg.scale(((one - t_probe) * t_probe).inverse(), x),
                         alg.scale((one - t_probe).inverse(), alg.id_l())),
                 alg.scale(t_probe.inverse(), alg.id_r()));
}

/// The three exact interpolation identities of the generator curve. The first
/// holds for 0 <= r < s < u, the weighted one needs r > 0, the four-point one
/// takes 0 <= r < s < t < u.
template <DoubleNearAlgebra D>
LawReport<typename D::Elem> check_h_identities(const D& alg, const typename D::Elem& h,
                                               const std::vector<TimeTriple>& triples,
                                               const std::vector<TimeQuad>& quadruples) {
  using Elem = typename D::Elem;
  LawReport<Elem> report;
  detail::WitnessSlot<Elem> w3, w3w, w4;
  const Elem er = alg.id_r();

  auto curve = [&](const Rational& t) { return generator_curve(alg, h, t); };

  std::size_t ord = 0;
  for (const auto& t : triples) {
    const Rational &r = t.r, &s = t.s, &u = t.u;
    const Elem hr = curve(r), hs = curve(s), hu = curve(u);
    {
      Elem rhs = alg.add(alg.add(alg.scale((u - s) / (u - r), hr), alg.scale((s - r) / (u - r), hu)),
                         alg.scale((u - s) * (s - r), h));
      if (!alg.equal(hs, rhs))
        w3.offer(ord, {"three_point_interpolation", {}, {hs, rhs}, r, hs, rhs});
    }
    if (r.sign() > 0) {
      Elem rhs = alg.sub(alg.add(alg.scale(s * (u - s) / (r * (u - r)), hr),
                                 alg.scale(s * (s - r) / (u * (u - r)), hu)),
                         alg.scale((u - s) * (s - r) / (r * u), er));
      if (!alg.equal(hs, rhs))
        w3w.offer(ord, {"weighted_three_point_interpolation", {}, {hs, rhs}, r, hs, rhs});
    }
    ++ord;
  }
  ord = 0;
  for (const auto& q : quadruples) {
    const Rational &r = q.r, &s = q.s, &t = q.t, &u = q.u;
    Elem lhs = alg.add(alg.scale(((u - t) * (u - s) * (u - r)).inverse(), curve(u)),
                       alg.scale(((u - s) * (t - s) * (s - r)).inverse(), curve(s)));
    Elem rhs = alg.add(alg.scale(((u - r) * (t - r) * (s - r)).inverse(), curve(r)),
                       alg.scale(((u - t) * (t - s) * (t - r)).inverse(), curve(t)));
    if (!alg.equal(lhs, rhs))
      w4.offer(ord, {"four_point_interpolation", {}, {lhs, rhs}, r, lhs, rhs});
    ++ord;
  }

  report.laws.push_back({"three_point_interpolation", !w3.w.has_value(), std::move(w3.w)});
  report.laws.push_back({"weighted_three_point_interpolation", !w3w.w.has_value(), std::move(w3w.w)});
  report.laws.push_back({"four_point_interpolation", !w4.w.has_value(), std::move(w4.w)});
  return report;
}

}  // namespace nearflow
