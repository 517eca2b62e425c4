#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "nearflow/algebra.hpp"

namespace nearflow {

/// Element (alpha, vec) of the affine near algebra R x V with V = Q^d.
/// Invertible iff alpha != 0; null iff alpha = 0.
struct AffineElem {
  Rational alpha;
  std::vector<Rational> vec;

  std::size_t dim() const { return vec.size(); }
};

/// The near algebra A_V with product a ⊡ b = (b.alpha * a.alpha,
/// b.alpha * a.vec + b.vec) and identity (1, 0).
class AffineAlgebra {
 public:
  using Elem = AffineElem;

  explicit AffineAlgebra(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }

  Elem zero() const { return {Rational(0), std::vector<Rational>(dim_)}; }
  Elem identity() const { return {Rational(1), std::vector<Rational>(dim_)}; }

  Elem add(const Elem& a, const Elem& b) const {
    check_dims(a, b);
    Elem r{a.alpha + b.alpha, a.vec};
    for (std::size_t i = 0; i < dim_; ++i) r.vec[i] += b.vec[i];
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    check_dims(a, b);
    Elem r{a.alpha - b.alpha, a.vec};
    for (std::size_t i = 0; i < dim_; ++i) r.vec[i] -= b.vec[i];
    return r;
  }
  Elem scale(const Rational& c, const Elem& a) const {
    check_dim(a);
    Elem r{c * a.alpha, a.vec};
    for (auto& v : r.vec) v = c * v;
    return r;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    check_dims(a, b);
    Elem r{b.alpha * a.alpha, std::vector<Rational>(dim_)};
    for (std::size_t i = 0; i < dim_; ++i) r.vec[i] = b.alpha * a.vec[i] + b.vec[i];
    return r;
  }

  std::optional<Elem> try_inverse(const Elem& a) const {
    check_dim(a);
    if (a.alpha.is_zero()) return std::nullopt;
    const Rational inv = a.alpha.inverse();
    Elem r{inv, std::vector<Rational>(dim_)};
    for (std::size_t i = 0; i < dim_; ++i) r.vec[i] = -(inv * a.vec[i]);
    return r;
  }

  bool equal(const Elem& a, const Elem& b) const {
    if (a.alpha != b.alpha || a.vec.size() != b.vec.size()) return false;
    for (std::size_t i = 0; i < a.vec.size(); ++i)
      if (a.vec[i] != b.vec[i]) return false;
    return true;
  }

  /// In this algebra all non-invertible elements are null and vice versa.
  bool is_null_analytic(const Elem& a) const { return a.alpha.is_zero(); }

 private:
  void check_dim(const Elem& a) const {
    if (a.vec.size() != dim_) throw DimensionMismatch("affine element of wrong dimension");
  }
  void check_dims(const Elem& a, const Elem& b) const {
    check_dim(a);
    check_dim(b);
  }

  std::size_t dim_;
};

/// One-way flow generator h = (alpha, vec) with alpha >= 0, so that e + s*h
/// stays invertible on all of [0, infinity).
struct AffineGenerator {
  Rational alpha;
  std::vector<Rational> vec;
};

inline AffineGenerator make_affine_generator(Rational alpha, std::vector<Rational> vec) {
  if (alpha.sign() < 0) {
    // e + s*h degenerates at s = -1/alpha.
    throw DomainError("affine generator needs alpha >= 0; e + s*h is singular at s = " +
                      (-alpha.inverse()).str());
  }
  return {std::move(alpha), std::move(vec)};
}

inline AffineElem generator_elem(const AffineGenerator& h) { return {h.alpha, h.vec}; }

/// Closed form x_{st} = ((1 + alpha*t)/(1 + alpha*s), (t - s)/(1 + alpha*s) * vec),
/// equal to (e + s*h)^{-1} ⊡ (e + t*h).
inline AffineElem aff_one_way_flow(const AffineGenerator& h, const Rational& s, const Rational& t) {
  if (s.sign() < 0 || !(s < t)) throw DomainError("aff_one_way_flow needs 0 <= s < t");
  const Rational den = Rational(1) + h.alpha * s;
  AffineElem r{(Rational(1) + h.alpha * t) / den, std::vector<Rational>(h.vec.size())};
  const Rational f = (t - s) / den;
  for (std::size_t i = 0; i < h.vec.size(); ++i) r.vec[i] = f * h.vec[i];
  return r;
}

/// Recovers h = (x_{0t} - e)/t; exact left inverse of aff_one_way_flow at s=0.
inline AffineGenerator aff_recover_generator(const AffineElem& x0t, const Rational& t) {
  if (t.sign() <= 0) throw DomainError("aff_recover_generator needs t > 0");
  AffineGenerator h{(x0t.alpha - Rational(1)) / t, std::vector<Rational>(x0t.vec.size())};
  for (std::size_t i = 0; i < x0t.vec.size(); ++i) h.vec[i] = x0t.vec[i] / t;
  return h;
}

}  // namespace nearflow
