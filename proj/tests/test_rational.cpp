#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include <random>

#include "nearflow/rational.hpp"

using nearflow::DomainError;
using nearflow::ParseError;
using nearflow::Rational;
using nearflow::rat;

TEST_CASE("construction canonicalizes") {
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(-2, 4).str() == "-1/2");
  CHECK(Rational(2, -4).str() == "-1/2");
  CHECK(Rational(0, 7).str() == "0");
  CHECK(Rational(6, 3).str() == "2");
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("parse and str round trip") {
  for (const char* s : {"0", "1", "-1", "7/3", "-7/3", "123456789123456789123456789/2"}) {
    CHECK(Rational::parse(s).str() == s);
  }
  CHECK(Rational::parse("4/6").str() == "2/3");
  CHECK(Rational::parse("+3").str() == "3");
  CHECK_THROWS_AS(Rational::parse(""), ParseError);
  CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Rational::parse("1/-2"), ParseError);
  CHECK_THROWS_AS(Rational::parse("a/b"), ParseError);
  CHECK_THROWS_AS(Rational::parse("1.5"), ParseError);
  CHECK_THROWS_AS(Rational::parse("1/2/3"), ParseError);
}

TEST_CASE("arithmetic matches the GMP oracle") {
  std::mt19937_64 eng(12345);
  std::uniform_int_distribution<long long> num(-1000000, 1000000);
  std::uniform_int_distribution<long long> den(1, 1000);
  for (int iter = 0; iter < 20000; ++iter) {
    const Rational a(num(eng), den(eng)), b(num(eng), den(eng));
    const mpq_class qa = a.to_mpq(), qb = b.to_mpq();
    CHECK((a + b).to_mpq() == qa + qb);
    CHECK((a - b).to_mpq() == qa - qb);
    CHECK((a * b).to_mpq() == qa * qb);
    if (!b.is_zero()) CHECK((a / b).to_mpq() == qa / qb);
    CHECK((a < b) == (qa < qb));
    CHECK((a == b) == (qa == qb));
  }
}

TEST_CASE("overflow promotes to GMP and demotes when it fits again") {
  const Rational big = rat(1LL << 62) * rat(1LL << 62);
  CHECK(big.str() == "21267647932558653966460912964485513216");
  const Rational back = big / rat(1LL << 62);
  CHECK(back == rat(1LL << 62));
  CHECK(back.str() == "4611686018427387904");

  // Chains through the big representation stay exact.
  Rational x(1);
  for (int i = 0; i < 40; ++i) x *= rat(1000000);
  for (int i = 0; i < 40; ++i) x /= rat(1000000);
  CHECK(x == rat(1));

  // Huge denominators promote on the add path too: the reduced denominator
  // 3 * 2^62 exceeds the signed 64-bit range.
  const Rational h = rat(1, 1LL << 62) + rat(1, 3 * (1LL << 20));
  CHECK(h == Rational::parse("4398046511107/13835058055282163712"));
  CHECK(h - rat(1, 1LL << 62) == rat(1, 3 * (1LL << 20)));
}

TEST_CASE("comparisons and helpers") {
  CHECK(rat(1, 3) < rat(1, 2));
  CHECK(rat(-1, 2) < rat(1, 3));
  CHECK(rat(5).sign() == 1);
  CHECK(rat(-5, 7).sign() == -1);
  CHECK(rat(0).sign() == 0);
  CHECK(abs(rat(-3, 4)) == rat(3, 4));
  CHECK(rat(3, 4).inverse() == rat(4, 3));
  CHECK_THROWS_AS(rat(0).inverse(), DomainError);
  CHECK(rat(1, 2).to_double() == 0.5);
  CHECK(rat(7).is_integer());
  CHECK(!rat(7, 2).is_integer());
}

TEST_CASE("exact square roots") {
  Rational r;
  CHECK(Rational::exact_sqrt(rat(9, 4), r));
  CHECK(r == rat(3, 2));
  CHECK(Rational::exact_sqrt(rat(0), r));
  CHECK(r == rat(0));
  CHECK(!Rational::exact_sqrt(rat(2), r));
  CHECK(!Rational::exact_sqrt(rat(-4), r));
  CHECK(Rational::exact_sqrt(rat(1LL << 62), r));
  CHECK(r == rat(1LL << 31));
}
