#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nearflow/algebra.hpp"
#include "nearflow/law_check.hpp"

namespace nearflow {

/// Family x_{st}, 0 <= s < t, in a near algebra; either generated lazily from
/// a single element h via x_{st} = (e + s*h)^{-1} ⊡ (e + t*h), or an explicit
/// table (coefficient families that are not born from a generator).
template <NearAlgebra A>
class OneWayFamily {
 public:
  using Elem = typename A::Elem;
  using Key = std::pair<Rational, Rational>;

  static OneWayFamily from_generator(Elem h) {
    OneWayFamily f;
    f.generator_ = std::move(h);
    return f;
  }
  static OneWayFamily from_table(std::map<Key, Elem> table) {
    OneWayFamily f;
    f.table_ = std::move(table);
    return f;
  }

  bool generator_backed() const { return generator_.has_value(); }
  const std::optional<Elem>& generator() const { return generator_; }

  Elem at(const A& alg, const Rational& s, const Rational& t) const {
    if (!(s < t)) throw DomainError("one-way family needs s < t");
    if (generator_) {
      const Elem e = alg.identity();
      const Elem hs = alg.add(e, alg.scale(s, *generator_));
      auto inv = alg.try_inverse(hs);
      if (!inv) throw NotInvertible("one-way family: e + s*h has no inverse at s = " + s.str());
      return alg.mul(*inv, alg.add(e, alg.scale(t, *generator_)));
    }
    auto it = table_->find({s, t});
    if (it == table_->end())
      throw DomainError("one-way table has no entry at (" + s.str() + ", " + t.str() + ")");
    return it->second;
  }

 private:
  OneWayFamily() = default;
  std::optional<Elem> generator_;
  std::optional<std::map<Key, Elem>> table_;
};

/// Verifies the one-way flow law x_{st} ⊡ x_{tu} = x_{su} at each triple and
/// the linearity condition: (x_{su} - e)/(u - s) must agree across all pairs
/// sharing the same s. Report-based; never throws on a failing law.
template <NearAlgebra A>
LawReport<typename A::Elem> verify_one_way_flow(
    const A& alg, const OneWayFamily<A>& family,
    const std::vector<std::array<Rational, 3>>& triples) {
  using Elem = typename A::Elem;
  LawReport<Elem> report;
  detail::WitnessSlot<Elem> flow_w, lin_w, inv_w;

  std::map<Rational, std::vector<Rational>> by_start;  // s -> sorted u set
  std::size_t ord = 0;
  for (const auto& tr : triples) {
    const Rational &s = tr[0], &t = tr[1], &u = tr[2];
    if (s.sign() < 0 || !(s < t) || !(t < u)) throw DomainError("one-way triple needs 0 <= s < t < u");
    for (auto& [a, b] : {std::pair{s, t}, std::pair{t, u}, std::pair{s, u}}) by_start[a].push_back(b);
    try {
      Elem lhs = alg.mul(family.at(alg, s, t), family.at(alg, t, u));
      Elem rhs = family.at(alg, s, u);
      if (!alg.equal(lhs, rhs))
        flow_w.offer(ord, {"one_way_flow_eq", {}, {}, std::nullopt, std::move(lhs), std::move(rhs)});
      for (auto& [a, b] : {std::pair{s, t}, std::pair{t, u}, std::pair{s, u}}) {
        if (!alg.try_inverse(family.at(alg, a, b)))
          inv_w.offer(ord, {"one_way_invertible", {}, {family.at(alg, a, b)}, std::nullopt, alg.zero(),
                            alg.zero()});
      }
    } catch (const Error& err) {
      inv_w.offer(ord, {std::string("one_way_invertible: ") + err.what(), {}, {}, std::nullopt, alg.zero(),
                        alg.zero()});
    }
    ++ord;
  }

  const Elem e = alg.identity();
  ord = 0;
  for (auto& [s, us] : by_start) {
    std::optional<Elem> ref;
    for (const auto& u : us) {
      Elem d = alg.scale((u - s).inverse(), alg.sub(family.at(alg, s, u), e));
      if (!ref) {
        ref = std::move(d);
      } else if (!alg.equal(*ref, d)) {
        lin_w.offer(ord, {"one_way_linearity", {}, {}, s, std::move(*ref), std::move(d)});
        break;
      }
    }
    ++ord;
  }

  report.laws.push_back({"one_way_flow_eq", !flow_w.w.has_value(), std::move(flow_w.w)});
  report.laws.push_back({"one_way_linearity", !lin_w.w.has_value(), std::move(lin_w.w)});
  report.laws.push_back({"one_way_invertible", !inv_w.w.has_value(), std::move(inv_w.w)});
  return report;
}

}  // namespace nearflow
