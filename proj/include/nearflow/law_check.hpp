#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nearflow/algebra.hpp"
#include "nearflow/util.hpp"

namespace nearflow {

/// Outcome of a law sweep. A failing law always carries the lexicographically
/// first witness (by sample indices), so reports are identical no matter how
/// many workers ran the sweep, and the witness re-evaluates to the reported
/// violation.
template <typename Elem>
struct LawReport {
  struct Witness {
    std::string law;
    std::vector<std::size_t> indices;  // positions in the sample list
    std::vector<Elem> operands;
    std::optional<Rational> scalar;
    Elem lhs, rhs;
  };
  struct LawResult {
    std::string law;
    bool pass = true;
    std::optional<Witness> witness;
  };

  std::vector<LawResult> laws;

  bool all_pass() const {
    for (const auto& l : laws)
      if (!l.pass) return false;
    return true;
  }
  const LawResult* find(const std::string& name) const {
    for (const auto& l : laws)
      if (l.law == name) return &l;
    return nullptr;
  }
};

inline const std::array<Rational, 3>& law_check_scalars() {
  static const std::array<Rational, 3> s{Rational(0), Rational(1), Rational(-2, 3)};
  return s;
}

namespace detail {

// Per-law first-violation tracker keyed by a linearized triple index.
template <typename Elem>
struct WitnessSlot {
  std::size_t order = std::numeric_limits<std::size_t>::max();
  std::optional<typename LawReport<Elem>::Witness> w;

  void offer(std::size_t ord, typename LawReport<Elem>::Witness witness) {
    if (ord < order) {
      order = ord;
      w = std::move(witness);
    }
  }
  void merge(WitnessSlot&& other) {
    if (other.order < order) {
      order = other.order;
      w = std::move(other.w);
    }
  }
};

// Sweeps associativity, left-distributivity and left-homogeneity of one
// multiplication over all ordered triples (pairs x scalars for homogeneity).
template <NearAlgebra A>
void sweep_mul_laws(const A& alg, std::span<const typename A::Elem> xs, unsigned workers,
                    const std::string& suffix, LawReport<typename A::Elem>& report) {
  using Elem = typename A::Elem;
  const std::size_t n = xs.size();

  // Pairwise products are shared by all three laws; sums are cheap enough to
  // recompute, which keeps the sweep's working set inside the cache.
  std::vector<Elem> prod(n * n, alg.zero());
  parallel_chunks(n, workers, [&](unsigned, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < n; ++j) prod[i * n + j] = alg.mul(xs[i], xs[j]);
  });

  WitnessSlot<Elem> assoc_w, distr_w, homog_w;
  std::vector<WitnessSlot<Elem>> assoc_parts(workers), distr_parts(workers), homog_parts(workers);

  parallel_chunks(n, workers, [&](unsigned w, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Elem& pij = prod[i * n + j];
        const Elem* row_i = prod.data() + i * n;
        const Elem* row_j = prod.data() + j * n;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t ord = (i * n + j) * n + k;
          {
            Elem lhs = alg.mul(pij, xs[k]);
            Elem rhs = alg.mul(xs[i], row_j[k]);
            if (!alg.equal(lhs, rhs))
              assoc_parts[w].offer(ord, {"associativity" + suffix,
                                         {i, j, k},
                                         {xs[i], xs[j], xs[k]},
                                         std::nullopt,
                                         std::move(lhs),
                                         std::move(rhs)});
          }
          {
            Elem lhs = alg.mul(xs[i], alg.add(xs[j], xs[k]));
            Elem rhs = alg.add(pij, row_i[k]);
            if (!alg.equal(lhs, rhs))
              distr_parts[w].offer(ord, {"left_distributivity" + suffix,
                                         {i, j, k},
                                         {xs[i], xs[j], xs[k]},
                                         std::nullopt,
                                         std::move(lhs),
                                         std::move(rhs)});
          }
        }
        for (std::size_t c = 0; c < law_check_scalars().size(); ++c) {
          const Rational& lam = law_check_scalars()[c];
          Elem lhs = alg.mul(xs[i], alg.scale(lam, xs[j]));
          Elem rhs = alg.scale(lam, pij);
          if (!alg.equal(lhs, rhs))
            homog_parts[w].offer((i * n + j) * law_check_scalars().size() + c,
                                 {"left_homogeneity" + suffix, {i, j}, {xs[i], xs[j]}, lam, std::move(lhs),
                                  std::move(rhs)});
        }
      }
    }
  });
  for (unsigned w = 0; w < workers; ++w) {
    assoc_w.merge(std::move(assoc_parts[w]));
    distr_w.merge(std::move(distr_parts[w]));
    homog_w.merge(std::move(homog_parts[w]));
  }

  auto push = [&](const std::string& law, WitnessSlot<Elem>& slot) {
    report.laws.push_back({law, !slot.w.has_value(), std::move(slot.w)});
  };
  push("associativity" + suffix, assoc_w);
  push("left_distributivity" + suffix, distr_w);
  push("left_homogeneity" + suffix, homog_w);
}

}  // namespace detail

/// Checks the near-algebra laws over all ordered triples drawn from `samples`
/// (homogeneity over all pairs with the scalars {0, 1, -2/3}), exactly.
template <NearAlgebra A>
LawReport<typename A::Elem> check_laws(const A& alg, std::span<const typename A::Elem> samples,
                                       unsigned workers = 1) {
  if (samples.empty()) throw DomainError("check_laws requires a nonempty sample list");
  LawReport<typename A::Elem> report;
  detail::sweep_mul_laws(alg, samples, workers, "", report);
  return report;
}

/// DNA variant: runs the full law sweep for each multiplication and verifies
/// both cross-null identities x ⋊ e_⋉ = e_⋉ and x ⋉ e_⋊ = e_⋊ on every sample.
template <DoubleNearAlgebra D>
LawReport<typename D::Elem> check_laws(const D& dna, std::span<const typename D::Elem> samples,
                                       unsigned workers = 1)
  requires(!NearAlgebra<D>)
{
  if (samples.empty()) throw DomainError("check_laws requires a nonempty sample list");
  using Elem = typename D::Elem;
  LawReport<Elem> report;
  detail::sweep_mul_laws(DnaSide<D>(dna, Side::ltimes), samples, workers, "_ltimes", report);
  detail::sweep_mul_laws(DnaSide<D>(dna, Side::rtimes), samples, workers, "_rtimes", report);

  detail::WitnessSlot<Elem> cross_r, cross_l;
  const Elem el = dna.id_l(), er = dna.id_r();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Elem lhs_r = dna.mul_r(samples[i], el);
    if (!dna.equal(lhs_r, el))
      cross_r.offer(i, {"cross_null_rtimes", {i}, {samples[i]}, std::nullopt, std::move(lhs_r), el});
    Elem lhs_l = dna.mul_l(samples[i], er);
    if (!dna.equal(lhs_l, er))
      cross_l.offer(i, {"cross_null_ltimes", {i}, {samples[i]}, std::nullopt, std::move(lhs_l), er});
  }
  report.laws.push_back({"cross_null_rtimes", !cross_r.w.has_value(), std::move(cross_r.w)});
  report.laws.push_back({"cross_null_ltimes", !cross_l.w.has_value(), std::move(cross_l.w)});
  return report;
}

}  // namespace nearflow
