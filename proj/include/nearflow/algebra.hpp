#pragma once

#include <concepts>
#include <optional>
#include <span>
#include <vector>

#include "nearflow/errors.hpp"
#include "nearflow/rational.hpp"

namespace nearflow {

/// A near algebra: a rational linear space with an associative multiplication
/// that is left-distributive and left-homogeneous. Right-sided laws are never
/// assumed anywhere in the library; for a nonzero x, zero() ⊡ x may well
/// differ from zero().
template <typename A>
concept NearAlgebra =
    std::copyable<typename A::Elem> &&
    requires(const A& alg, const typename A::Elem& x, const typename A::Elem& y, const Rational& c) {
      { alg.add(x, y) } -> std::same_as<typename A::Elem>;
      { alg.sub(x, y) } -> std::same_as<typename A::Elem>;
      { alg.scale(c, x) } -> std::same_as<typename A::Elem>;
      { alg.zero() } -> std::same_as<typename A::Elem>;
      { alg.mul(x, y) } -> std::same_as<typename A::Elem>;
      { alg.identity() } -> std::same_as<typename A::Elem>;
      { alg.try_inverse(x) } -> std::same_as<std::optional<typename A::Elem>>;
      { alg.equal(x, y) } -> std::same_as<bool>;
    };

/// A double near algebra: two near-algebra multiplications ⋉ (mul_l) and
/// ⋊ (mul_r) whose identities annihilate each other crosswise,
/// x ⋊ e_⋉ = e_⋉ and x ⋉ e_⋊ = e_⋊.
template <typename A>
concept DoubleNearAlgebra =
    std::copyable<typename A::Elem> &&
    requires(const A& alg, const typename A::Elem& x, const typename A::Elem& y, const Rational& c) {
      { alg.add(x, y) } -> std::same_as<typename A::Elem>;
      { alg.sub(x, y) } -> std::same_as<typename A::Elem>;
      { alg.scale(c, x) } -> std::same_as<typename A::Elem>;
      { alg.zero() } -> std::same_as<typename A::Elem>;
      { alg.mul_l(x, y) } -> std::same_as<typename A::Elem>;
      { alg.mul_r(x, y) } -> std::same_as<typename A::Elem>;
      { alg.id_l() } -> std::same_as<typename A::Elem>;
      { alg.id_r() } -> std::same_as<typename A::Elem>;
      { alg.try_inverse_l(x) } -> std::same_as<std::optional<typename A::Elem>>;
      { alg.try_inverse_r(x) } -> std::same_as<std::optional<typename A::Elem>>;
      { alg.equal(x, y) } -> std::same_as<bool>;
    };

enum class Side { ltimes, rtimes };

inline const char* side_name(Side s) { return s == Side::ltimes ? "ltimes" : "rtimes"; }

/// One multiplication of a DNA presented through the near-algebra interface,
/// so the generic law checks and the Prop-P1 identities apply per side.
template <DoubleNearAlgebra D>
class DnaSide {
 public:
  using Elem = typename D::Elem;

  DnaSide(const D& dna, Side side) : dna_(&dna), side_(side) {}

  Elem add(const Elem& x, const Elem& y) const { return dna_->add(x, y); }
  Elem sub(const Elem& x, const Elem& y) const { return dna_->sub(x, y); }
  Elem scale(const Rational& c, const Elem& x) const { return dna_->scale(c, x); }
  Elem zero() const { return dna_->zero(); }
  Elem mul(const Elem& x, const Elem& y) const {
    return side_ == Side::ltimes ? dna_->mul_l(x, y) : dna_->mul_r(x, y);
  }
  Elem identity() const { return side_ == Side::ltimes ? dna_->id_l() : dna_->id_r(); }
  std::optional<Elem> try_inverse(const Elem& x) const {
    return side_ == Side::ltimes ? dna_->try_inverse_l(x) : dna_->try_inverse_r(x);
  }
  bool equal(const Elem& x, const Elem& y) const { return dna_->equal(x, y); }

  Side side() const { return side_; }

 private:
  const D* dna_;
  Side side_;
};

/// Probe-based null test: f is ⊡-null when probe ⊡ f = f for every probe.
/// Universal quantification over the whole space is not decidable at runtime;
/// concrete algebras expose analytic null predicates in addition.
template <NearAlgebra A>
bool is_null(const A& alg, const typename A::Elem& f, std::span<const typename A::Elem> probes) {
  if (probes.empty()) throw DomainError("is_null requires at least one probe");
  for (const auto& p : probes) {
    if (!alg.equal(alg.mul(p, f), f)) return false;
  }
  return true;
}

/// (x + f)^{-1} = (e - f) ⊡ x^{-1} for invertible x and null f; the result is
/// a two-sided inverse of x + f.
template <NearAlgebra A>
typename A::Elem inverse_of_sum_with_null(const A& alg, const typename A::Elem& x, const typename A::Elem& f) {
  auto inv = alg.try_inverse(x);
  if (!inv) throw NotInvertible("inverse_of_sum_with_null: x has no inverse");
  return alg.mul(alg.sub(alg.identity(), f), *inv);
}

/// Evaluates β(αx + βe + γf)^{-1} + α(βx^{-1} + αe + γf)^{-1} + γf. Under the
/// stated preconditions the value equals e; the computed left-hand side is
/// returned so callers can assert the identity instead of assuming it.
template <NearAlgebra A>
typename A::Elem reciprocal_combination(const A& alg, const typename A::Elem& x, const Rational& alpha,
                                   const Rational& beta, const Rational& gamma, const typename A::Elem& f) {
  using Elem = typename A::Elem;
  const Elem e = alg.identity();
  const Elem gf = alg.scale(gamma, f);
  Elem acc = gf;
  if (!beta.is_zero()) {
    const Elem t = alg.add(alg.add(alg.scale(alpha, x), alg.scale(beta, e)), gf);
    auto inv = alg.try_inverse(t);
    if (!inv) throw NotInvertible("reciprocal_combination: alpha*x + beta*e + gamma*f has no inverse");
    acc = alg.add(acc, alg.scale(beta, *inv));
  }
  if (!alpha.is_zero()) {
    auto xinv = alg.try_inverse(x);
    if (!xinv) throw NotInvertible("reciprocal_combination: x has no inverse");
    const Elem t = alg.add(alg.add(alg.scale(beta, *xinv), alg.scale(alpha, e)), gf);
    auto inv = alg.try_inverse(t);
    if (!inv) throw NotInvertible("reciprocal_combination: beta*x^{-1} + alpha*e + gamma*f has no inverse");
    acc = alg.add(acc, alg.scale(alpha, *inv));
  }
  return acc;
}

}  // namespace nearflow
