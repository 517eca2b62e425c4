#pragma once

#include <array>
#include <optional>
#include <string>

#include "nearflow/algebra.hpp"
#include "nearflow/endo_pair.hpp"

namespace nearflow {

/// Element of the quadratic-harness DNA Q on Q^6 x Q^2, stored in the fixed
/// coordinate order (x1..x6; u1, u2). ⋉-invertible iff x3 != 0 and u2 != 0;
/// ⋊-invertible iff x1 != 0 and u1 != 0.
struct QhElem {
  std::array<Rational, 6> x{};
  std::array<Rational, 2> u{};
};

class QhDna {
 public:
  using Elem = QhElem;

  Elem zero() const { return {}; }
  Elem id_l() const {
    Elem e;
    e.x[2] = Rational(1);
    e.u[1] = Rational(1);
    return e;
  }
  Elem id_r() const {
    Elem e;
    e.x[0] = Rational(1);
    e.u[0] = Rational(1);
    return e;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem r;
    for (int i = 0; i < 6; ++i) r.x[i] = a.x[i] + b.x[i];
    for (int i = 0; i < 2; ++i) r.u[i] = a.u[i] + b.u[i];
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r;
    for (int i = 0; i < 6; ++i) r.x[i] = a.x[i] - b.x[i];
    for (int i = 0; i < 2; ++i) r.u[i] = a.u[i] - b.u[i];
    return r;
  }
  Elem scale(const Rational& c, const Elem& a) const {
    Elem r;
    for (int i = 0; i < 6; ++i) r.x[i] = c * a.x[i];
    for (int i = 0; i < 2; ++i) r.u[i] = c * a.u[i];
    return r;
  }

  Elem mul_r(const Elem& a, const Elem& b) const {
    const auto& x = a.x;
    const auto& u = a.u;
    const auto& y = b.x;
    const auto& v = b.u;
    Elem r;
    r.x[0] = x[0] * y[0];
    r.x[1] = x[1] * y[0] + u[0] * y[1];
    r.x[2] = x[2] * y[0] + u[1] * y[1] + y[2];
    r.x[3] = x[3] * y[0] + u[0] * y[3];
    r.x[4] = x[4] * y[0] + u[1] * y[3] + y[4];
    r.x[5] = x[5] * y[0] + y[5];
    r.u[0] = u[0] * v[0];
    r.u[1] = u[1] * v[0] + v[1];
    return r;
  }

  Elem mul_l(const Elem& a, const Elem& b) const {
    const auto& x = a.x;
    const auto& u = a.u;
    const auto& y = b.x;
    const auto& v = b.u;
    Elem r;
    r.x[0] = y[0] + u[0] * y[1] + x[0] * y[2];
    r.x[1] = u[1] * y[1] + x[1] * y[2];
    r.x[2] = x[2] * y[2];
    r.x[3] = x[3] * y[2] + y[3] + u[0] * y[4];
    r.x[4] = x[4] * y[2] + u[1] * y[4];
    r.x[5] = x[5] * y[2] + y[5];
    r.u[0] = v[0] + u[0] * v[1];
    r.u[1] = u[1] * v[1];
    return r;
  }

  std::optional<Elem> try_inverse_l(const Elem& a) const {
    const auto& x = a.x;
    const auto& u = a.u;
    if (x[2].is_zero() || u[1].is_zero()) return std::nullopt;
    const Rational d = x[2] * u[1];
    Elem r;
    r.x[0] = (x[1] * u[0] - x[0] * u[1]) / d;
    r.x[1] = -x[1] / d;
    r.x[2] = x[2].inverse();
    r.x[3] = (x[4] * u[0] - x[3] * u[1]) / d;
    r.x[4] = -x[4] / d;
    r.x[5] = -x[5] / x[2];
    r.u[0] = -u[0] / u[1];
    r.u[1] = u[1].inverse();
    return r;
  }

  std::optional<Elem> try_inverse_r(const Elem& a) const {
    const auto& x = a.x;
    const auto& u = a.u;
    if (x[0].is_zero() || u[0].is_zero()) return std::nullopt;
    const Rational d = x[0] * u[0];
    Elem r;
    r.x[0] = x[0].inverse();
    r.x[1] = -x[1] / d;
    r.x[2] = (x[1] * u[1] - x[2] * u[0]) / d;
    r.x[3] = -x[3] / d;
    r.x[4] = (x[3] * u[1] - x[4] * u[0]) / d;
    r.x[5] = -x[5] / x[0];
    r.u[0] = u[0].inverse();
    r.u[1] = -u[1] / u[0];
    return r;
  }

  bool equal(const Elem& a, const Elem& b) const {
    for (int i = 0; i < 6; ++i)
      if (a.x[i] != b.x[i]) return false;
    return a.u[0] == b.u[0] && a.u[1] == b.u[1];
  }
};

inline QhElem qh_mul(Side side, const QhDna& q, const QhElem& a, const QhElem& b) {
  return side == Side::ltimes ? q.mul_l(a, b) : q.mul_r(a, b);
}

/// Throwing inverse that names the vanishing coordinates.
inline QhElem qh_inv(Side side, const QhDna& q, const QhElem& a) {
  auto r = side == Side::ltimes ? q.try_inverse_l(a) : q.try_inverse_r(a);
  if (r) return *r;
  std::string bad;
  if (side == Side::ltimes) {
    if (a.x[2].is_zero()) bad += "x3=0";
    if (a.u[1].is_zero()) bad += bad.empty() ? "u2=0" : ", u2=0";
  } else {
    if (a.x[0].is_zero()) bad += "x1=0";
    if (a.u[0].is_zero()) bad += bad.empty() ? "u1=0" : ", u1=0";
  }
  throw NotInvertible(std::string("qh element has no ") + side_name(side) + "-inverse (" + bad + ")");
}

/// The lower coordinates (u1, u2) of Q behave like the scalar endo-pair DNA,
/// so by the scalar flow criterion a generator must have g2 in [-1, 0] and
/// g1 + g2 >= 0. Necessary only; returns the violation witness when it fails.
inline std::optional<InadmissibilityWitness> qh_generator_prefilter(const QhElem& h) {
  return find_inadmissible_witness(ScalarFlowParams{h.u[0] + h.u[1], -h.u[1]});
}

}  // namespace nearflow
