#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <map>

#include "nearflow/affine.hpp"
#include "nearflow/harness_coeffs.hpp"
#include "nearflow/one_way.hpp"
#include "nearflow/sampling.hpp"

using namespace nearflow;

namespace {
AffineElem ae(Rational alpha, std::vector<Rational> vec) { return {std::move(alpha), std::move(vec)}; }
}  // namespace

TEST_CASE("affine product") {
  AffineAlgebra alg(1);
  CHECK(alg.equal(alg.mul(ae(rat(2), {rat(1)}), ae(rat(3), {rat(0)})), ae(rat(6), {rat(3)})));
  // Identity on the right.
  const AffineElem x = ae(rat(5), {rat(-2)});
  CHECK(alg.equal(alg.mul(x, alg.identity()), x));
  CHECK(alg.equal(alg.mul(alg.identity(), x), x));
  // A right factor with vanishing scalar part absorbs.
  CHECK(alg.equal(alg.mul(ae(rat(5), {rat(2)}), ae(rat(0), {rat(7)})), ae(rat(0), {rat(7)})));
  CHECK_THROWS_AS(alg.mul(x, ae(rat(1), {rat(1), rat(2)})), DimensionMismatch);
}

TEST_CASE("dimension zero degenerates to the scalar algebra") {
  AffineAlgebra alg(0);
  Sampler s(19);
  std::vector<AffineElem> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(s.affine_elem(0));
  CHECK(check_laws(alg, std::span<const AffineElem>(xs)).all_pass());
  CHECK(alg.equal(alg.mul(ae(rat(2), {}), ae(rat(3), {})), ae(rat(6), {})));
}

TEST_CASE("affine inverse") {
  AffineAlgebra alg(1);
  const auto inv = alg.try_inverse(ae(rat(2), {rat(3)}));
  REQUIRE(inv.has_value());
  CHECK(alg.equal(*inv, ae(rat(1, 2), {rat(-3, 2)})));
  CHECK(alg.equal(alg.mul(ae(rat(2), {rat(3)}), *inv), alg.identity()));
  CHECK(alg.equal(alg.mul(*inv, ae(rat(2), {rat(3)})), alg.identity()));
  CHECK(alg.equal(*alg.try_inverse(alg.identity()), alg.identity()));
  CHECK(!alg.try_inverse(ae(rat(0), {rat(1)})).has_value());
}

TEST_CASE("one-way closed form equals the direct product") {
  Sampler s(21);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t d = 1 + iter % 3;
    AffineAlgebra alg(d);
    AffineGenerator h = make_affine_generator(s.positive_rational(), std::vector<Rational>(d));
    for (auto& v : h.vec) v = s.rational();
    const auto family = OneWayFamily<AffineAlgebra>::from_generator(generator_elem(h));
    const auto times = s.increasing_times(3, false);
    const Rational &t0 = times[0], &t1 = times[1], &t2 = times[2];
    CHECK(alg.equal(aff_one_way_flow(h, t0, t1), family.at(alg, t0, t1)));
    // Flow law through the closed form.
    CHECK(alg.equal(alg.mul(aff_one_way_flow(h, t0, t1), aff_one_way_flow(h, t1, t2)),
                    aff_one_way_flow(h, t0, t2)));
  }
}

TEST_CASE("one-way worked values") {
  AffineGenerator h = make_affine_generator(rat(1), {rat(1)});
  AffineAlgebra alg(1);
  CHECK(alg.equal(aff_one_way_flow(h, rat(1), rat(2)), ae(rat(3, 2), {rat(1, 2)})));

  AffineGenerator zero = make_affine_generator(rat(0), {rat(0)});
  CHECK(alg.equal(aff_one_way_flow(zero, rat(1), rat(5)), alg.identity()));

  AffineGenerator drift = make_affine_generator(rat(0), {rat(7, 3)});
  CHECK(alg.equal(aff_one_way_flow(drift, rat(0), rat(1)), ae(rat(1), {rat(7, 3)})));

  CHECK_THROWS_AS(aff_one_way_flow(h, rat(2), rat(1)), DomainError);
  CHECK_THROWS_AS(aff_one_way_flow(h, rat(-1), rat(1)), DomainError);
}

TEST_CASE("generator recovery") {
  AffineAlgebra alg(1);
  const AffineGenerator got = aff_recover_generator(ae(rat(3), {rat(2)}), rat(2));
  CHECK(got.alpha == rat(1));
  CHECK(got.vec == std::vector<Rational>{rat(1)});

  const AffineGenerator id0 = aff_recover_generator(alg.identity(), rat(1));
  CHECK(id0.alpha == rat(0));

  Sampler s(22);
  for (int iter = 0; iter < 40; ++iter) {
    AffineGenerator h = make_affine_generator(s.positive_rational(), {s.rational(), s.rational()});
    const Rational t = s.positive_rational();
    const AffineGenerator back = aff_recover_generator(aff_one_way_flow(h, rat(0), t), t);
    CHECK(back.alpha == h.alpha);
    CHECK(back.vec == h.vec);
  }
  CHECK_THROWS_AS(aff_recover_generator(alg.identity(), rat(0)), DomainError);
}

TEST_CASE("negative-rate generators are rejected with the singular time") {
  try {
    make_affine_generator(rat(-1, 2), {rat(1)});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("s = 2") != std::string::npos);
  }
}

TEST_CASE("flow verification on generator families") {
  AffineAlgebra alg(1);
  const auto family = OneWayFamily<AffineAlgebra>::from_generator(ae(rat(1), {rat(1)}));
  const std::vector<std::array<Rational, 3>> triples{{rat(0), rat(1), rat(2)}, {rat(1), rat(2), rat(3)}};
  CHECK(verify_one_way_flow(alg, family, triples).all_pass());
}

TEST_CASE("flow verification on a constant table family") {
  AffineAlgebra alg(1);
  std::map<std::pair<Rational, Rational>, AffineElem> table;
  for (long s = 0; s < 4; ++s)
    for (long t = s + 1; t < 5; ++t) table[{rat(s), rat(t)}] = alg.identity();
  const auto family = OneWayFamily<AffineAlgebra>::from_table(std::move(table));
  const std::vector<std::array<Rational, 3>> triples{{rat(0), rat(1), rat(2)}, {rat(1), rat(3), rat(4)}};
  CHECK(verify_one_way_flow(alg, family, triples).all_pass());
}

TEST_CASE("one-sided second-moment families embed as one-way flows") {
  AffineAlgebra alg(2);

  auto build = [&](HarnessKind kind, const Rational& a, const Rational& b) {
    std::map<std::pair<Rational, Rational>, AffineElem> table;
    for (long num_s = 1; num_s <= 8; ++num_s)
      for (long num_t = num_s + 1; num_t <= 9; ++num_t) {
        const Rational s(num_s, 2), t(num_t, 2);
        const auto c = second_moment_coeffs(kind, a, b, t, s);
        table[{s, t}] = ae(c.a_ts, {c.b_ts, c.c_ts});
      }
    return OneWayFamily<AffineAlgebra>::from_table(std::move(table));
  };

  std::vector<std::array<Rational, 3>> triples;
  for (long i = 1; i <= 6; ++i)
    triples.push_back({rat(i, 2), rat(i + 1, 2), rat(i + 2, 2)});

  CHECK(verify_one_way_flow(alg, build(HarnessKind::bounded, rat(1), rat(2)), triples).all_pass());
  CHECK(verify_one_way_flow(alg, build(HarnessKind::unbounded, rat(0), rat(2)), triples).all_pass());
}

TEST_CASE("a corrupted table fails the flow equation with a witness") {
  AffineAlgebra alg(1);
  const AffineElem g = ae(rat(1), {rat(1)});
  std::map<std::pair<Rational, Rational>, AffineElem> table;
  const auto gen = OneWayFamily<AffineAlgebra>::from_generator(g);
  for (long s = 0; s < 3; ++s)
    for (long t = s + 1; t <= 3; ++t) table[{rat(s), rat(t)}] = gen.at(alg, rat(s), rat(t));
  table[{rat(0), rat(2)}] = ae(rat(9), {rat(9)});
  const auto family = OneWayFamily<AffineAlgebra>::from_table(std::move(table));
  const std::vector<std::array<Rational, 3>> triples{{rat(0), rat(1), rat(2)}};
  const auto rep = verify_one_way_flow(alg, family, triples);
  CHECK(!rep.all_pass());
  CHECK(!rep.find("one_way_flow_eq")->pass);
}
