#include <catch2/catch_amalgamated.hpp>

#include <span>
#include <string>
#include <vector>

#include "nearflow/matrix.hpp"
#include "nearflow/qh.hpp"
#include "nearflow/sampling.hpp"

using namespace nearflow;

namespace {

QhElem qe(std::array<long long, 6> x, std::array<long long, 2> u) {
  QhElem e;
  for (int i = 0; i < 6; ++i) e.x[i] = rat(x[i]);
  for (int i = 0; i < 2; ++i) e.u[i] = rat(u[i]);
  return e;
}

// a ⊡ z is linear in z; solving the 8x8 system a ⊡ z = target gives an
// implementation-independent inverse oracle.
QhElem solve_right_mul(const QhDna& q, Side side, const QhElem& a, const QhElem& target) {
  RMatrix m(8);
  for (int col = 0; col < 8; ++col) {
    QhElem basis;
    if (col < 6)
      basis.x[col] = rat(1);
    else
      basis.u[col - 6] = rat(1);
    const QhElem img = qh_mul(side, q, a, basis);
    for (int row = 0; row < 6; ++row) m(row, col) = img.x[row];
    m(6, col) = img.u[0];
    m(7, col) = img.u[1];
  }
  const auto inv = m.try_inverse();
  REQUIRE(inv.has_value());
  QhElem z;
  for (int row = 0; row < 8; ++row) {
    Rational acc(0);
    for (int col = 0; col < 8; ++col)
      acc += (*inv)(row, col) * (col < 6 ? target.x[col] : target.u[col - 6]);
    if (row < 6)
      z.x[row] = acc;
    else
      z.u[row - 6] = acc;
  }
  return z;
}

}  // namespace

TEST_CASE("neutral elements") {
  QhDna q;
  CHECK(q.equal(q.id_l(), qe({0, 0, 1, 0, 0, 0}, {0, 1})));
  CHECK(q.equal(q.id_r(), qe({1, 0, 0, 0, 0, 0}, {1, 0})));

  const QhElem a = qe({1, 2, 3, 4, 5, 6}, {7, 8});
  CHECK(q.equal(q.mul_r(a, q.id_l()), q.id_l()));  // cross-null
  CHECK(q.equal(q.mul_l(a, q.id_r()), q.id_r()));

  Sampler s(41);
  for (int i = 0; i < 20; ++i) {
    const QhElem x = s.qh_elem();
    CHECK(q.equal(q.mul_r(x, q.id_r()), x));
    CHECK(q.equal(q.mul_r(q.id_r(), x), x));
    CHECK(q.equal(q.mul_l(x, q.id_l()), x));
    CHECK(q.equal(q.mul_l(q.id_l(), x), x));
  }
}

TEST_CASE("worked product and inverse values") {
  QhDna q;
  const QhElem a = qe({2, 0, 0, 0, 0, 0}, {1, 0});
  const QhElem b = qe({0, 0, 0, 0, 0, 0}, {0, 0});
  (void)b;
  QhElem half;
  half.x[0] = rat(1, 2);
  half.u[0] = rat(1);
  CHECK(q.equal(q.mul_r(a, half), q.id_r()));

  CHECK(q.equal(qh_inv(Side::rtimes, q, a), half));
  CHECK(q.equal(qh_inv(Side::ltimes, q, q.id_l()), q.id_l()));

  try {
    qh_inv(Side::rtimes, q, qe({0, 1, 1, 1, 1, 1}, {1, 1}));
    FAIL("expected NotInvertible");
  } catch (const NotInvertible& e) {
    CHECK(std::string(e.what()).find("x1=0") != std::string::npos);
  }
  CHECK_THROWS_AS(qh_inv(Side::ltimes, q, qe({1, 1, 0, 1, 1, 1}, {1, 1})), NotInvertible);
}

TEST_CASE("closed-form inverses agree with the linear-solve oracle") {
  QhDna q;
  Sampler s(42);
  for (Side side : {Side::rtimes, Side::ltimes}) {
    const QhElem e = side == Side::rtimes ? q.id_r() : q.id_l();
    for (int i = 0; i < 50; ++i) {
      const QhElem a = s.qh_invertible(side);
      const QhElem inv = qh_inv(side, q, a);
      CHECK(q.equal(inv, solve_right_mul(q, side, a, e)));
      CHECK(q.equal(qh_mul(side, q, a, inv), e));
      CHECK(q.equal(qh_mul(side, q, inv, a), e));
    }
  }
}

TEST_CASE("invertibility conditions are sharp") {
  QhDna q;
  Sampler s(43);
  for (int i = 0; i < 30; ++i) {
    QhElem a = s.qh_elem();
    a.x[0] = rat(0);
    CHECK(!q.try_inverse_r(a).has_value());
    a = s.qh_elem();
    a.u[0] = rat(0);
    CHECK(!q.try_inverse_r(a).has_value());
    a = s.qh_elem();
    a.x[2] = rat(0);
    CHECK(!q.try_inverse_l(a).has_value());
    a = s.qh_elem();
    a.u[1] = rat(0);
    CHECK(!q.try_inverse_l(a).has_value());
  }
}

TEST_CASE("null elements are never invertible") {
  QhDna q;
  Sampler s(44);
  DnaSide<QhDna> right(q, Side::rtimes), left(q, Side::ltimes);
  std::vector<QhElem> probes;
  for (int i = 0; i < 8; ++i) probes.push_back(s.qh_elem());
  for (int i = 0; i < 20; ++i) {
    const QhElem fr = s.qh_null(Side::rtimes);
    CHECK(is_null(right, fr, std::span<const QhElem>(probes)));
    CHECK(!q.try_inverse_r(fr).has_value());
    const QhElem fl = s.qh_null(Side::ltimes);
    CHECK(is_null(left, fl, std::span<const QhElem>(probes)));
    CHECK(!q.try_inverse_l(fl).has_value());
  }
}

TEST_CASE("generator prefilter on the lower coordinates") {
  QhElem ok;
  ok.u[0] = rat(1, 2);
  ok.u[1] = rat(-1, 2);  // g2 in [-1, 0], g1 + g2 = 0
  CHECK(!qh_generator_prefilter(ok).has_value());

  QhElem bad;
  bad.u[0] = rat(0);
  bad.u[1] = rat(-3, 2);  // g2 < -1
  const auto w = qh_generator_prefilter(bad);
  REQUIRE(w.has_value());
  const ScalarFlowParams p{bad.u[0] + bad.u[1], -bad.u[1]};
  CHECK(scalar_flow_b(p, w->r, w->s).is_zero());
}
