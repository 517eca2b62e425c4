#pragma once

#include <random>
#include <vector>

#include "nearflow/affine.hpp"
#include "nearflow/endo_pair.hpp"
#include "nearflow/flow_engine.hpp"
#include "nearflow/qh.hpp"

namespace nearflow {

/// Deterministic sample generation for law sweeps and property tests. Entries
/// are small on purpose: the laws are polynomial identities, so small
/// numerators exercise them as conclusively as large ones while keeping the
/// exact arithmetic in the fast path.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  Rational rational(long long max_num = 5, int max_den_log2 = 2) {
    std::uniform_int_distribution<long long> num(-max_num, max_num);
    std::uniform_int_distribution<int> den_log(1, max_den_log2);
    std::uniform_int_distribution<int> coin(0, 2);
    return Rational(num(eng_), coin(eng_) == 0 ? (1LL << den_log(eng_)) : 1);
  }

  Rational rational_wide(long long max_num, long long max_den) {
    std::uniform_int_distribution<long long> num(-max_num, max_num);
    std::uniform_int_distribution<long long> den(1, max_den);
    return Rational(num(eng_), den(eng_));
  }

  Rational nonzero_rational(long long max_num = 5, int max_den_log2 = 2) {
    for (;;) {
      Rational r = rational(max_num, max_den_log2);
      if (!r.is_zero()) return r;
    }
  }

  Rational positive_rational(long long max_num = 5, int max_den_log2 = 2) {
    Rational r = nonzero_rational(max_num, max_den_log2);
    return r.sign() < 0 ? -r : r;
  }

  /// Law-sweep elements: mostly small integers, with a dyadic-rational
  /// minority. The laws are polynomial identities, for which integer points
  /// are as conclusive as any; the minority (and every cross triple it forms)
  /// keeps the fraction handling exercised without dominating the sweep cost.
  AffineElem affine_elem(std::size_t dim) {
    const bool dyadic = pick_dyadic();
    AffineElem e{entry(dyadic), std::vector<Rational>(dim)};
    for (auto& v : e.vec) v = entry(dyadic);
    return e;
  }

  RMatrix matrix(std::size_t dim) { return matrix_with(dim, pick_dyadic()); }

  RMatrix invertible_matrix(std::size_t dim) {
    for (;;) {
      RMatrix m = matrix(dim);
      if (m.try_inverse()) return m;
    }
  }

  EndoPair endo_pair(std::size_t dim) {
    const bool dyadic = pick_dyadic();
    return {matrix_with(dim, dyadic), matrix_with(dim, dyadic)};
  }

  QhElem qh_elem() {
    const bool dyadic = pick_dyadic();
    QhElem e;
    for (auto& v : e.x) v = entry(dyadic);
    for (auto& v : e.u) v = entry(dyadic);
    return e;
  }

  QhElem qh_invertible(Side side) {
    for (;;) {
      QhElem e = qh_elem();
      if (side == Side::rtimes && !e.x[0].is_zero() && !e.u[0].is_zero()) return e;
      if (side == Side::ltimes && !e.x[2].is_zero() && !e.u[1].is_zero()) return e;
    }
  }

  /// Null elements of the respective multiplication of Q: x ⊡ f = f for all x
  /// forces the coordinates that feed on the left factor to vanish.
  QhElem qh_null(Side side) {
    QhElem e = qh_elem();
    if (side == Side::rtimes) {
      e.x[0] = e.x[1] = e.x[3] = Rational(0);
      e.u[0] = Rational(0);
    } else {
      e.x[1] = e.x[2] = e.x[4] = Rational(0);
      e.u[1] = Rational(0);
    }
    return e;
  }

  AffineElem affine_invertible(std::size_t dim) {
    AffineElem e = affine_elem(dim);
    e.alpha = nonzero_rational();
    return e;
  }

  AffineElem affine_null(std::size_t dim) {
    AffineElem e = affine_elem(dim);
    e.alpha = Rational(0);
    return e;
  }

  /// Strictly increasing rationals with small denominators; all positive, or
  /// starting at 0 occasionally when zero is admissible.
  std::vector<Rational> increasing_times(std::size_t count, bool strictly_positive) {
    std::uniform_int_distribution<long long> num(1, 6);
    std::uniform_int_distribution<long long> den(1, 4);
    std::uniform_int_distribution<int> zero_start(0, 7);
    std::vector<Rational> t(count);
    Rational cur(0);
    for (auto& v : t) {
      cur = cur + Rational(num(eng_), den(eng_));
      v = cur;
    }
    if (!strictly_positive && zero_start(eng_) == 0) t[0] = Rational(0);
    return t;
  }

  TimeTriple time_triple(bool strictly_positive = false) {
    auto t = increasing_times(3, strictly_positive);
    return {t[0], t[1], t[2]};
  }

  TimeQuad time_quad(bool strictly_positive = false) {
    auto t = increasing_times(4, strictly_positive);
    return {t[0], t[1], t[2], t[3]};
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  bool pick_dyadic() {
    std::uniform_int_distribution<int> d(0, 7);
    return d(eng_) == 0;
  }

  Rational entry(bool dyadic) {
    // Roughly two entries in five are zero; sparse samples sweep the same
    // polynomial identities at a fraction of the product cost.
    std::uniform_int_distribution<int> sparse(0, 2);
    std::uniform_int_distribution<long long> num(-4, 4);
    const long long n = sparse(eng_) == 0 ? 0 : num(eng_);
    if (dyadic) {
      std::uniform_int_distribution<int> den_log(0, 2);
      return Rational(n, 1LL << den_log(eng_));
    }
    return Rational(n);
  }

  RMatrix matrix_with(std::size_t dim, bool dyadic) {
    RMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = entry(dyadic);
    return m;
  }

  std::mt19937_64 eng_;
};

}  // namespace nearflow
