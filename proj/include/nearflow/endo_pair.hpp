#pragma once

#include <optional>
#include <string>
#include <utility>

#include "nearflow/algebra.hpp"
#include "nearflow/matrix.hpp"

namespace nearflow {

/// Element (a1, a2) of the DNA (L^2, +, ⋉, ⋊) over endomorphisms of Q^d.
/// ⋉-invertible iff a2 is invertible, ⋊-invertible iff a1 is.
struct EndoPair {
  RMatrix a1, a2;

  std::size_t dim() const { return a1.dim(); }
};

class EndoPairDna {
 public:
  using Elem = EndoPair;

  explicit EndoPairDna(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }

  Elem zero() const { return {RMatrix::zero(dim_), RMatrix::zero(dim_)}; }
  Elem id_l() const { return {RMatrix::zero(dim_), RMatrix::identity(dim_)}; }
  Elem id_r() const { return {RMatrix::identity(dim_), RMatrix::zero(dim_)}; }

  Elem add(const Elem& a, const Elem& b) const { return {a.a1 + b.a1, a.a2 + b.a2}; }
  Elem sub(const Elem& a, const Elem& b) const { return {a.a1 - b.a1, a.a2 - b.a2}; }
  Elem scale(const Rational& c, const Elem& a) const { return {c * a.a1, c * a.a2}; }

  // (A1, A2) ⋉ (B1, B2) = (B1 + A1 B2, A2 B2)
  Elem mul_l(const Elem& a, const Elem& b) const {
    check(a, b);
    Elem r{RMatrix(dim_), RMatrix(dim_)};
    mul_add(a.a1, b.a2, &b.a1, r.a1);
    mul_add(a.a2, b.a2, nullptr, r.a2);
    return r;
  }
  // (A1, A2) ⋊ (B1, B2) = (A1 B1, A2 B1 + B2)
  Elem mul_r(const Elem& a, const Elem& b) const {
    check(a, b);
    Elem r{RMatrix(dim_), RMatrix(dim_)};
    mul_add(a.a1, b.a1, nullptr, r.a1);
    mul_add(a.a2, b.a1, &b.a2, r.a2);
    return r;
  }

  // A^{-⋉} = (-A1 A2^{-1}, A2^{-1})
  std::optional<Elem> try_inverse_l(const Elem& a) const {
    auto inv = a.a2.try_inverse();
    if (!inv) return std::nullopt;
    return Elem{-(a.a1 * *inv), *inv};
  }
  // A^{-⋊} = (A1^{-1}, -A2 A1^{-1})
  std::optional<Elem> try_inverse_r(const Elem& a) const {
    auto inv = a.a1.try_inverse();
    if (!inv) return std::nullopt;
    return Elem{*inv, -(a.a2 * *inv)};
  }

  bool equal(const Elem& a, const Elem& b) const { return a.a1 == b.a1 && a.a2 == b.a2; }

 private:
  void check(const Elem& a, const Elem& b) const {
    if (a.dim() != dim_ || b.dim() != dim_) throw DimensionMismatch("endo pair of wrong dimension");
  }

  // out = a * b (+ c), fused to skip intermediate matrices.
  static void mul_add(const RMatrix& a, const RMatrix& b, const RMatrix* c, RMatrix& out) {
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational acc = c ? (*c)(i, j) : Rational(0);
        for (std::size_t k = 0; k < n; ++k) {
          const Rational& aik = a(i, k);
          if (aik.is_zero()) continue;
          acc += aik * b(k, j);
        }
        out(i, j) = std::move(acc);
      }
  }

  std::size_t dim_;
};

inline EndoPair ep_mul(Side side, const EndoPairDna& dna, const EndoPair& a, const EndoPair& b) {
  return side == Side::ltimes ? dna.mul_l(a, b) : dna.mul_r(a, b);
}

/// Throwing inverse that names the singular coordinate.
inline EndoPair ep_inv(Side side, const EndoPairDna& dna, const EndoPair& a) {
  auto r = side == Side::ltimes ? dna.try_inverse_l(a) : dna.try_inverse_r(a);
  if (!r)
    throw NotInvertible(std::string("endo pair has no ") + side_name(side) + "-inverse: " +
                        (side == Side::ltimes ? "a2" : "a1") + " is singular");
  return *r;
}

/// One-way flow in the near algebra (L^2, +, ⊡) with ⊡ = ⋊ and e = (Id, 0):
/// x_{st} = ((Id + tH)(Id + sH)^{-1}, (t - s) G (Id + sH)^{-1}).
inline EndoPair endo_one_way_flow(const RMatrix& g, const RMatrix& h, const Rational& s, const Rational& t) {
  if (s.sign() < 0 || !(s < t)) throw DomainError("endo_one_way_flow needs 0 <= s < t");
  const RMatrix id = RMatrix::identity(h.dim());
  auto inv = (id + s * h).try_inverse();
  if (!inv) throw NotInvertible("endo_one_way_flow: Id + s*H is singular at s = " + s.str());
  return {(id + t * h) * *inv, (t - s) * (g * *inv)};
}

/// Closed-form two-way flow of the endo-pair DNA for generator (G, H):
///   x_{sru} = ((u-s)/(u-r) * B_ru^{-1} B_su, (s-r)/(u-r) * B_ur^{-1} B_sr)
/// with B_ab = (1-a)(1-b) H + a b H_b G H_b^{-1} + Id and H_b = (1-b) H + Id.
inline EndoPair ep_two_way_flow(const RMatrix& g, const RMatrix& h, const Rational& r, const Rational& s,
                                const Rational& u) {
  if (r.sign() < 0 || !(r < s) || !(s < u)) throw DomainError("ep_two_way_flow needs 0 <= r < s < u");
  const std::size_t n = h.dim();
  if (g.dim() != n) throw DimensionMismatch("G and H must have equal dimension");
  const RMatrix id = RMatrix::identity(n);
  const Rational one(1);

  auto h_at = [&](const Rational& b) { return (one - b) * h + id; };
  auto big_b = [&](const Rational& a, const Rational& b) {
    const RMatrix hb = h_at(b);
    auto hb_inv = hb.try_inverse();
    if (!hb_inv) throw NotInvertible("ep_two_way_flow: H_b singular at b = " + b.str());
    return ((one - a) * (one - b)) * h + (a * b) * (hb * g * *hb_inv) + id;
  };

  const RMatrix b_ru = big_b(r, u), b_su = big_b(s, u), b_ur = big_b(u, r), b_sr = big_b(s, r);
  auto b_ru_inv = b_ru.try_inverse();
  if (!b_ru_inv) throw NotInvertible("ep_two_way_flow: B_ru singular");
  auto b_ur_inv = b_ur.try_inverse();
  if (!b_ur_inv) throw NotInvertible("ep_two_way_flow: B_ur singular");

  const Rational span = u - r;
  return {((u - s) / span) * (*b_ru_inv * b_su), ((s - r) / span) * (*b_ur_inv * b_sr)};
}

/// Scalar two-way flow parameters (alpha, rho) = (beta + gamma, -gamma) for
/// the generator h = beta*e_⋊ + gamma*e_⋉, admissible iff alpha >= 0 and
/// rho in [0, 1]; then b(s, u) = alpha*s*u + rho*(s + u) + 1 - rho > 0 on
/// 0 <= s < u.
struct ScalarFlowParams {
  Rational alpha;
  Rational rho;
};

inline Rational scalar_flow_b(const ScalarFlowParams& p, const Rational& s, const Rational& u) {
  return p.alpha * s * u + p.rho * (s + u) + Rational(1) - p.rho;
}

/// A rational pair 0 <= r < s with b(r, s) = 0, produced for inadmissible
/// parameters, together with a nearby point where b > 0. The pair certifies
/// the sign change of b along the line of fixed r.
struct InadmissibilityWitness {
  Rational r, s;          // exact rational zero of b
  Rational pos_r, pos_s;  // a point with b > 0
};

/// Finds an exact rational zero of b on {0 <= r < s} whenever the parameters
/// are inadmissible (rho outside [0, 1] or alpha < 0); no value otherwise.
/// For fixed r, b(r, s) is linear in s with slope alpha*r + rho, so a zero of
/// the section is rational; the work is choosing a rational r whose section
/// crosses inside the domain.
inline std::optional<InadmissibilityWitness> find_inadmissible_witness(const ScalarFlowParams& p) {
  const Rational zero(0), one(1);
  const Rational& al = p.alpha;
  const Rational& rho = p.rho;
  if (al >= zero && rho >= zero && rho <= one) return std::nullopt;

  auto b = [&](const Rational& r, const Rational& s) { return scalar_flow_b(p, r, s); };
  auto section_zero = [&](const Rational& r) {  // zero of s -> b(r, s)
    return -(rho * r + one - rho) / (al * r + rho);
  };

  InadmissibilityWitness w;
  if (rho > one || rho < zero) {
    // The r = 0 section b(0, s) = 1 - rho + rho*s crosses at s = (rho-1)/rho,
    // which lands in (0, 1) for rho > 1 and in (1, oo) for rho < 0.
    w.r = zero;
    w.s = (rho - one) / rho;
    w.pos_s = rho > one ? w.s + one : w.s / Rational(2);
    w.pos_r = zero;
  } else {
    // alpha < 0, rho in [0, 1]. At the vertex r0 = rho/|alpha| of r -> b(r, r)
    // the value is rho^2/|alpha| + 1 - rho > 0; stepping delta to the right
    // keeps b(r, r) > 0 while the s-slope alpha*r + rho turns negative, so the
    // section crosses at a rational s > r.
    const Rational abs_a = -al;
    const Rational r0 = rho / abs_a;
    const Rational delta =
        rho == one ? one / (Rational(2) * abs_a)
                   : (one - rho) / (Rational(4) * (abs_a > one ? abs_a : one));
    w.r = r0 + delta;
    w.s = section_zero(w.r);
    w.pos_r = w.r;
    w.pos_s = (w.r + w.s) / Rational(2);
  }
  if (!(w.s > w.r) || w.r.sign() < 0 || !b(w.r, w.s).is_zero() || !(b(w.pos_r, w.pos_s) > zero))
    throw Error("internal: inadmissibility witness construction failed");
  return w;
}

/// Validating constructor for ScalarFlowParams; rejects inadmissible
/// parameters with the witness pair where b hits zero.
inline ScalarFlowParams make_scalar_flow_params(Rational alpha, Rational rho) {
  ScalarFlowParams p{std::move(alpha), std::move(rho)};
  if (auto w = find_inadmissible_witness(p)) {
    throw InvalidParams("scalar flow parameters inadmissible: b(" + w->r.str() + ", " + w->s.str() +
                        ") = 0 (need alpha >= 0 and rho in [0,1])");
  }
  return p;
}

/// Coefficients (on e_⋊ and e_⋉ respectively) of the scalar two-way flow
///   x_{sru} = (u-s) b(s,u) / ((u-r) b(r,u)) e_⋊ + (s-r) b(r,s) / ((u-r) b(r,u)) e_⋉.
inline std::pair<Rational, Rational> scalar_flow(const ScalarFlowParams& p, const Rational& r,
                                                 const Rational& s, const Rational& u) {
  if (r.sign() < 0 || !(r < s) || !(s < u)) throw DomainError("scalar_flow needs 0 <= r < s < u");
  const Rational den = (u - r) * scalar_flow_b(p, r, u);
  return {(u - s) * scalar_flow_b(p, s, u) / den, (s - r) * scalar_flow_b(p, r, s) / den};
}

}  // namespace nearflow
