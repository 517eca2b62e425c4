#pragma once

#include <utility>

#include "nearflow/errors.hpp"
#include "nearflow/qh.hpp"
#include "nearflow/rational.hpp"

namespace nearflow {

/// Rational-safe check of y <= base + 2*sqrt(prod) for prod >= 0: either the
/// gap is nonnegative outright or its square is dominated. No irrational
/// arithmetic anywhere.
inline bool leq_plus_two_sqrt(const Rational& y, const Rational& base, const Rational& prod) {
  if (y <= base) return true;
  const Rational gap = y - base;
  return gap * gap <= Rational(4) * prod;
}

/// Quadratic-harness parameters (theta, eta, sigma, tau, gamma, chi) with
/// chi in {0, 1}, sigma, tau >= 0, gamma <= chi + 2 sqrt(sigma tau), and
/// (gamma, sigma, tau, chi) not all zero.
struct QhParams {
  Rational theta, eta, sigma, tau, gamma;
  int chi = 1;
};

inline QhParams make_qh_params(Rational theta, Rational eta, Rational sigma, Rational tau, Rational gamma,
                               int chi) {
  if (chi != 0 && chi != 1) throw InvalidParams("chi must be 0 or 1");
  if (sigma.sign() < 0 || tau.sign() < 0) throw InvalidParams("sigma and tau must be nonnegative");
  if (gamma.is_zero() && sigma.is_zero() && tau.is_zero() && chi == 0)
    throw InvalidParams("gamma, sigma, tau, chi must not all vanish");
  if (!leq_plus_two_sqrt(gamma, Rational(chi), sigma * tau))
    throw InvalidParams("need gamma <= chi + 2 sqrt(sigma tau)");
  return {std::move(theta), std::move(eta), std::move(sigma), std::move(tau), std::move(gamma), chi};
}

/// Generator parameters (alpha, beta, rho, h4, h5, h6) with alpha >= 0,
/// rho in [0, 1], beta >= -2 sqrt(alpha (1 - rho)).
struct GeneratorParams6 {
  Rational alpha, beta, rho, h4, h5, h6;
};

inline GeneratorParams6 make_generator_params(Rational alpha, Rational beta, Rational rho, Rational h4,
                                              Rational h5, Rational h6) {
  if (alpha.sign() < 0) throw InvalidParams("alpha must be nonnegative");
  if (rho.sign() < 0 || rho > Rational(1)) throw InvalidParams("rho must lie in [0, 1]");
  if (!leq_plus_two_sqrt(-beta, Rational(0), alpha * (Rational(1) - rho)))
    throw InvalidParams("need beta >= -2 sqrt(alpha (1 - rho))");
  return {std::move(alpha), std::move(beta), std::move(rho), std::move(h4), std::move(h5), std::move(h6)};
}

/// Coefficients of E(X_s^2 | X_r, X_u) = A X_r^2 + B X_r X_u + C X_u^2 +
/// D X_r + E X_u + F together with the harness weights a, b of the
/// conditional mean.
struct QuadCoeffTable {
  Rational A, B, C, D, E, F;
  Rational a, b;
};

/// Conditional variance as a polynomial in (X_r, X_u).
struct VarCoeffTable {
  Rational xr2, xrxu, xu2, xr, xu, one;
};

struct SecondMomentCoeffs {
  Rational a_ts, b_ts, c_ts;
};

struct LinearHarnessCoeffs {
  Rational a, b;      // weights of X_r and X_u
  Rational A_ru, B_ru;  // coefficients of the defining two-sided increment regression
};

/// Raw six-tuple without the chi in {0,1} normalization; the shifted (starred)
/// tuples and the homogeneous-scaling tests live here.
struct RawQhTuple {
  Rational theta, eta, sigma, tau, gamma, chi;
};

inline RawQhTuple to_raw(const QhParams& p) {
  return {p.theta, p.eta, p.sigma, p.tau, p.gamma, Rational(p.chi)};
}

enum class QhCase { A, B, C, D };
enum class HarnessKind { bounded, unbounded };

/// c(r, u) = tau + sigma r u - gamma r + chi u.
inline Rational c_value(const RawQhTuple& t, const Rational& r, const Rational& u) {
  return t.tau + t.sigma * r * u - t.gamma * r + t.chi * u;
}

/// Generator-time polynomial c(s, u) = alpha s u + (beta - rho) s + rho u + 1 - rho.
inline Rational c_gen(const GeneratorParams6& g, const Rational& s, const Rational& u) {
  return g.alpha * s * u + (g.beta - g.rho) * s + g.rho * u + Rational(1) - g.rho;
}

/// Maps quadratic-harness parameters to the generator chart: with q = chi + tau,
/// alpha = sigma/q, beta = (chi - gamma)/q, rho = chi/q, h4 = (eta - theta)/q,
/// h5 = theta/q, h6 = chi/q; also returns the generator element
/// (alpha + beta - rho, 2 rho - beta, -rho, h4, h5, h6; 0, 0) of Q.
inline std::pair<GeneratorParams6, QhElem> params_to_generator(const QhParams& p) {
  const Rational q = Rational(p.chi) + p.tau;
  if (q.sign() <= 0) throw DomainError("params_to_generator needs chi + tau > 0; normalize first");
  GeneratorParams6 g = make_generator_params(p.sigma / q, (Rational(p.chi) - p.gamma) / q,
                                             Rational(p.chi) / q, (p.eta - p.theta) / q, p.theta / q,
                                             Rational(p.chi) / q);
  QhElem h;
  h.x[0] = g.alpha + g.beta - g.rho;
  h.x[1] = Rational(2) * g.rho - g.beta;
  h.x[2] = -g.rho;
  h.x[3] = g.h4;
  h.x[4] = g.h5;
  h.x[5] = g.h6;
  return {std::move(g), std::move(h)};
}

inline QhElem generator_to_qh_elem(const GeneratorParams6& g) {
  QhElem h;
  h.x[0] = g.alpha + g.beta - g.rho;
  h.x[1] = Rational(2) * g.rho - g.beta;
  h.x[2] = -g.rho;
  h.x[3] = g.h4;
  h.x[4] = g.h5;
  h.x[5] = g.h6;
  return h;
}

namespace detail {
inline void require_times(const Rational& r, const Rational& s, const Rational& u, bool strict_r) {
  if ((strict_r ? r.sign() <= 0 : r.sign() < 0) || !(r < s) || !(s < u))
    throw DomainError(std::string("times must satisfy 0 ") + (strict_r ? "< " : "<= ") + "r < s < u");
}
}  // namespace detail

/// Generator-route quadratic-harness table: the closed-form coordinates of
/// the flow element for the generator chart, read as regression coefficients.
inline QuadCoeffTable qh_regression_coeffs(const GeneratorParams6& g, const Rational& r, const Rational& s,
                                           const Rational& u) {
  detail::require_times(r, s, u, false);
  const Rational cru = c_gen(g, r, u);
  if (cru.is_zero()) throw DegenerateDenominator("c(r, u) = 0 in qh_regression_coeffs");
  const Rational span = u - r;
  const Rational den = span * cru;
  QuadCoeffTable t;
  t.A = (u - s) * c_gen(g, s, u) / den;
  t.B = (s - r) * (u - s) * (Rational(2) * g.rho - g.beta) / den;
  t.C = (s - r) * c_gen(g, r, s) / den;
  t.D = (u - s) * (s - r) * (g.h4 * u - g.h5 * (Rational(1) - u)) / den;
  t.E = (u - s) * (s - r) * (g.h5 * (Rational(1) - r) - g.h4 * r) / den;
  t.F = (u - s) * (s - r) * g.h6 / cru;
  t.a = (u - s) / span;
  t.b = (s - r) / span;
  return t;
}

/// Parameter-route quadratic table, written directly in (theta, ..., chi).
inline QuadCoeffTable quad_table_from_raw(const RawQhTuple& p, const Rational& r, const Rational& s,
                                          const Rational& u) {
  detail::require_times(r, s, u, false);
  const Rational cru = c_value(p, r, u);
  if (cru.is_zero()) throw DegenerateDenominator("c(r, u) = 0 in quad_table_from_raw");
  const Rational span = u - r;
  const Rational den = span * cru;
  QuadCoeffTable t;
  t.A = (u - s) * c_value(p, s, u) / den;
  t.B = (s - r) * (u - s) * (p.gamma + p.chi) / den;
  t.C = (s - r) * c_value(p, r, s) / den;
  t.D = (s - r) * (u - s) * (p.eta * u - p.theta) / den;
  t.E = (s - r) * (u - s) * (p.theta - p.eta * r) / den;
  t.F = (s - r) * (u - s) * p.chi / cru;
  t.a = (u - s) / span;
  t.b = (s - r) / span;
  return t;
}

/// Var = E(X_s^2 | .) - (E(X_s | .))^2: subtracts the squared-mean expansion
/// (a X_r + b X_u)^2 from the quadratic table.
inline VarCoeffTable quad_to_variance(const QuadCoeffTable& t) {
  return {t.A - t.a * t.a, t.B - Rational(2) * t.a * t.b, t.C - t.b * t.b, t.D, t.E, t.F};
}

/// Direct conditional-variance expansion
///   Var(X_s | X_r, X_u) = (s-r)(u-s)/c(r,u) * Q((X_u-X_r)/(u-r), (uX_r-rX_u)/(u-r))
/// with Q(x, y) = tau x^2 + sigma y^2 + (gamma-chi) x y + theta x + eta y + chi,
/// written out as a polynomial in (X_r, X_u).
inline VarCoeffTable var_table_from_raw(const RawQhTuple& p, const Rational& r, const Rational& s,
                                        const Rational& u) {
  detail::require_times(r, s, u, false);
  const Rational cru = c_value(p, r, u);
  if (cru.is_zero()) throw DegenerateDenominator("c(r, u) = 0 in var_table_from_raw");
  const Rational k = (s - r) * (u - s) / cru;
  const Rational span = u - r, span2 = span * span;
  const Rational mix = p.gamma - p.chi;
  VarCoeffTable v;
  v.xr2 = k * (p.tau + p.sigma * u * u - mix * u) / span2;
  v.xrxu = k * (mix * (r + u) - Rational(2) * (p.tau + p.sigma * r * u)) / span2;
  v.xu2 = k * (p.tau + p.sigma * r * r - mix * r) / span2;
  v.xr = k * (p.eta * u - p.theta) / span;
  v.xu = k * (p.theta - p.eta * r) / span;
  v.one = k * p.chi;
  return v;
}

inline VarCoeffTable variance_coeffs(const QhParams& p, const Rational& r, const Rational& s,
                                     const Rational& u) {
  return var_table_from_raw(to_raw(p), r, s, u);
}

/// Linear-regression coefficients of the two-sided conditional mean. The
/// bounded branch uses b(s, u) = alpha s u + rho (s + u) + 1 - rho; the
/// unbounded branch is the 1/r family, undefined at r = 0.
inline LinearHarnessCoeffs linear_harness_coeffs(HarnessKind kind, const Rational& alpha,
                                                 const Rational& rho, const Rational& r, const Rational& s,
                                                 const Rational& u) {
  LinearHarnessCoeffs out;
  if (kind == HarnessKind::bounded) {
    detail::require_times(r, s, u, false);
    if (alpha.sign() < 0 || rho.sign() < 0 || rho > Rational(1))
      throw InvalidParams("bounded kind needs alpha >= 0 and rho in [0, 1]");
    auto b = [&](const Rational& x, const Rational& y) {
      return alpha * x * y + rho * (x + y) + Rational(1) - rho;
    };
    const Rational den = (u - r) * b(r, u);
    out.a = (u - s) * b(s, u) / den;
    out.b = (s - r) * b(r, s) / den;
    out.A_ru = (alpha * u + rho) / b(r, u);
    out.B_ru = -(alpha * r + rho) / b(r, u);
  } else {
    detail::require_times(r, s, u, true);
    out.a = s * (u - s) / (r * (u - r));
    out.b = s * (s - r) / (u * (u - r));
    out.A_ru = r.inverse();
    out.B_ru = -u.inverse();
  }
  return out;
}

/// One-sided second-moment coefficients of E(X_t^2 | F_s); bounded case
/// ((1+ta)/(1+sa), (t-s)b/(1+sa), (t-s)/(1+sa)), unbounded case
/// (t/s, (t-s)b/s, 0).
inline SecondMomentCoeffs second_moment_coeffs(HarnessKind kind, const Rational& a, const Rational& b,
                                               const Rational& t, const Rational& s) {
  if (kind == HarnessKind::bounded) {
    if (s.sign() < 0 || !(s < t)) throw DomainError("bounded kind needs 0 <= s < t");
    if (a.sign() < 0) throw InvalidParams("bounded kind needs a >= 0");
    const Rational den = Rational(1) + s * a;
    return {(Rational(1) + t * a) / den, (t - s) * b / den, (t - s) / den};
  }
  if (s.sign() <= 0 || !(s < t)) throw DomainError("unbounded kind needs 0 < s < t");
  return {t / s, (t - s) * b / s, Rational(0)};
}

/// Starred parameter tuple for the time shift t -> t + p:
/// tau* = tau + p(gamma - chi) + p^2 sigma, chi* = chi - p sigma,
/// gamma* = gamma + p sigma, theta* = theta + p eta; sigma, eta unchanged.
/// Satisfies c_starred(r, u) = c(r - p, u - p) exactly.
inline RawQhTuple shift_params(const QhParams& p, const Rational& shift) {
  if (shift.sign() <= 0) throw DomainError("shift_params needs shift > 0");
  const RawQhTuple t = to_raw(p);
  RawQhTuple out;
  out.tau = t.tau + shift * (t.gamma - t.chi) + shift * shift * t.sigma;
  out.chi = t.chi - shift * t.sigma;
  out.gamma = t.gamma + shift * t.sigma;
  out.theta = t.theta + shift * t.eta;
  out.sigma = t.sigma;
  out.eta = t.eta;
  return out;
}

/// Classifies a raw tuple into the four parameter families and rescales it to
/// the canonical representative (the formulas are 0-homogeneous in the tuple,
/// so a positive factor is free): chi > 0 -> chi = 1 (case A); chi = 0 and
/// sigma > 0 -> sigma = 1 (case B); chi = sigma = 0 and gamma < 0 ->
/// gamma = -1 (case D); chi = sigma = gamma = 0 and tau > 0 -> tau = 1
/// (case C).
inline std::pair<QhParams, QhCase> classify_and_normalize(const RawQhTuple& t) {
  if (t.sigma.sign() < 0 || t.tau.sign() < 0) throw InvalidParams("sigma and tau must be nonnegative");
  if (t.chi.sign() < 0) throw InvalidParams("chi must be nonnegative");
  if (!leq_plus_two_sqrt(t.gamma, t.chi, t.sigma * t.tau))
    throw InvalidParams("need gamma <= chi + 2 sqrt(sigma tau)");

  auto scaled = [&](const Rational& factor, int chi, QhCase c) {
    return std::make_pair(make_qh_params(factor * t.theta, factor * t.eta, factor * t.sigma,
                                         factor * t.tau, factor * t.gamma, chi),
                          c);
  };
  if (t.chi.sign() > 0) return scaled(t.chi.inverse(), 1, QhCase::A);
  if (t.sigma.sign() > 0) return scaled(t.sigma.inverse(), 0, QhCase::B);
  if (t.gamma.sign() < 0) return scaled((-t.gamma).inverse(), 0, QhCase::D);
  if (t.tau.sign() > 0) return scaled(t.tau.inverse(), 0, QhCase::C);
  throw InvalidParams("gamma, sigma, tau, chi must not all vanish");
}

}  // namespace nearflow
