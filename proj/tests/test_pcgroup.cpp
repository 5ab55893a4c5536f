#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "paranil/pcgroup.hpp"

using namespace paranil;

namespace {

Word random_word(std::mt19937_64& rng, int ngens, int len, long maxexp) {
  Word w;
  for (int i = 0; i < len; i++)
    w.push_back({static_cast<int>(oracle::draw(rng, 0, ngens - 1)),
                 Integer(oracle::draw(rng, -maxexp, maxexp))});
  return w;
}

ExponentVector random_element(const PcPresentation& p, std::mt19937_64& rng,
                              long maxexp) {
  return p.collect(random_word(rng, p.ngens(), 4, maxexp));
}

}  // namespace

TEST_CASE("heisenberg collection matches the spec words") {
  auto h = fixtures::heisenberg();
  // b * a = a b c
  CHECK(h->collect({{1, 1}, {0, 1}}) == ExponentVector{1, 1, 1});
  // a^2 b^3 a b = a^3 b^4 c^3
  CHECK(h->collect({{0, 2}, {1, 3}, {0, 1}, {1, 1}}) ==
        ExponentVector{3, 4, 3});
  // empty word
  CHECK(h->collect({}) == h->identity());
}

TEST_CASE("heisenberg collection agrees with the unitriangular matrix model") {
  auto h = fixtures::heisenberg();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; trial++) {
    Word w1 = random_word(rng, 3, 3, 20);
    Word w2 = random_word(rng, 3, 3, 20);
    Word cat = w1;
    cat.insert(cat.end(), w2.begin(), w2.end());
    ExponentVector nf = h->collect(cat);
    CHECK(oracle::ut3_of_vector(nf) == oracle::ut3_of_word(cat));
    // product of the two normal forms collects to the same element
    CHECK(h->multiply(h->collect(w1), h->collect(w2)) == nf);
  }
}

TEST_CASE("derived inverse conjugation equals the explicit one") {
  auto h1 = fixtures::heisenberg();
  auto h2 = fixtures::heisenberg_derived_inverse();
  CHECK(h2->conjugate_inverse_word(0, 1) == h1->conjugate_inverse_word(0, 1));
  // a^-1 moves past b correctly in both
  Word w = {{1, 1}, {0, -1}};
  CHECK(h1->collect(w) == h2->collect(w));
}

TEST_CASE("p3 instance inverse action derives from the order-3 search") {
  PcPresentation p({"t", "x1", "x2"}, {0, 0, 0});
  p.set_conjugate(0, 1, {0, 0, 1});
  p.set_conjugate(0, 2, {0, -1, -1});
  auto derived = finish_presentation(std::move(p));
  auto explicit_p = fixtures::p3_instance();
  CHECK(derived->conjugate_inverse_word(0, 1) ==
        explicit_p->conjugate_inverse_word(0, 1));
  CHECK(derived->conjugate_inverse_word(0, 2) ==
        explicit_p->conjugate_inverse_word(0, 2));
}

TEST_CASE("invert on the spec instances") {
  auto h = fixtures::heisenberg();
  CHECK(h->invert({1, 1, 0}) == ExponentVector{-1, -1, 1});
  CHECK(h->invert(h->identity()) == h->identity());
  CHECK(h->invert({0, 0, 5}) == ExponentVector{0, 0, -5});
}

TEST_CASE("power on the spec instances") {
  auto h = fixtures::heisenberg();
  CHECK(h->power({1, 1, 0}, 2) == ExponentVector{2, 2, 1});
  CHECK(h->power({1, 1, 0}, 0) == h->identity());
  CHECK(h->power({1, 1, 0}, 1) == ExponentVector{1, 1, 0});
}

TEST_CASE("commutators in the heisenberg group") {
  auto h = fixtures::heisenberg();
  ExponentVector a{1, 0, 0}, b{0, 1, 0};
  // c is the defining commutator [b,a]
  CHECK(h->commutator(b, a) == ExponentVector{0, 0, 1});
  CHECK(h->commutator(a, b) == ExponentVector{0, 0, -1});
  CHECK(h->commutator(a, a) == h->identity());
  // class-2 bilinearity: [b^2, a^2] = c^4
  CHECK(h->commutator(h->power(b, 2), h->power(a, 2)) ==
        ExponentVector{0, 0, 4});
  // oracle agreement for the commutator path
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; t++) {
    ExponentVector u = random_element(*h, rng, 8);
    ExponentVector v = random_element(*h, rng, 8);
    ExponentVector w = h->commutator(u, v);
    oracle::UT3 mu = oracle::ut3_of_vector(u), mv = oracle::ut3_of_vector(v);
    oracle::UT3 expect = oracle::ut3_mul(
        oracle::ut3_mul(oracle::ut3_pow(mu, -1), oracle::ut3_pow(mv, -1)),
        oracle::ut3_mul(mu, mv));
    CHECK(oracle::ut3_of_vector(w) == expect);
  }
}

TEST_CASE("group laws hold exactly on random elements") {
  std::mt19937_64 rng(31337);
  for (auto group : {fixtures::heisenberg(), fixtures::p3_instance(),
                     fixtures::sym3(), fixtures::c4()}) {
    for (int t = 0; t < 60; t++) {
      ExponentVector u = random_element(*group, rng, 12);
      ExponentVector v = random_element(*group, rng, 12);
      ExponentVector w = random_element(*group, rng, 12);
      CHECK(group->multiply(group->multiply(u, v), w) ==
            group->multiply(u, group->multiply(v, w)));
      CHECK(group->multiply(u, group->invert(u)) == group->identity());
      CHECK(group->multiply(group->invert(u), u) == group->identity());
      long k = oracle::draw(rng, -6, 6);
      CHECK(group->power(u, k + 1) ==
            group->multiply(group->power(u, k), u));
    }
  }
}

TEST_CASE("finite pc groups: element counts and normal forms") {
  auto s3 = fixtures::sym3();
  // (g1 g2)^2 = 1 in S3
  ExponentVector g1g2 = s3->multiply(s3->generator(0), s3->generator(1));
  CHECK(s3->power(g1g2, 2) == s3->identity());
  CHECK(s3->group_order() == 6);

  auto c4 = fixtures::c4();
  ExponentVector g = c4->generator(0);
  CHECK(c4->multiply(g, g) == ExponentVector{0, 1});
  CHECK(c4->power(g, 4) == c4->identity());
  CHECK(c4->power(g, 3) == c4->invert(g));
}

TEST_CASE("consistency detection") {
  SUBCASE("heisenberg is consistent") {
    PcPresentation p({"a", "b", "c"}, {0, 0, 0});
    p.set_conjugate(0, 1, {0, 1, 1});
    p.set_conjugate_inverse(0, 1, {0, 1, -1});
    p.build();
    CheckReport r = check_consistency(p);
    CHECK(r.passed());
  }
  SUBCASE("S3 and C6 are consistent") {
    PcPresentation s({"g1", "g2"}, {2, 3});
    s.set_conjugate(0, 1, {0, 2});
    s.build();
    CHECK(check_consistency(s).passed());
    PcPresentation c({"g1", "g2"}, {2, 3});
    c.build();
    CHECK(check_consistency(c).passed());
  }
  SUBCASE("orders (2,5) with g2^g1 = g2^2 is rejected with a witness") {
    PcPresentation p = fixtures::bad25();
    CheckReport r = check_consistency(p);
    REQUIRE(!r.passed());
    CHECK(r.get("overlap") == "g2^(g1^2)");
  }
}

TEST_CASE("verify_hom") {
  auto h = fixtures::heisenberg();
  SUBCASE("identity map verifies") {
    GroupHom id = identity_hom(h);
    CheckReport r = verify_hom(id);
    CHECK(r.passed());
    CHECK(id.verified);
  }
  SUBCASE("killing c while keeping a and b distinct fails") {
    GroupHom f{h, h, {h->generator(0), h->generator(1), h->identity()}};
    CheckReport r = verify_hom(f);
    CHECK(!r.passed());
    CHECK(!f.verified);
    CHECK(r.get("relation") == "b^a");
  }
  SUBCASE("collapsing a and b kills c consistently") {
    // a -> a, b -> a forces [b,a] -> 1, which matches c -> 1
    GroupHom f{h, h, {h->generator(0), h->generator(0), h->identity()}};
    CHECK(verify_hom(f).passed());
  }
  SUBCASE("x -> x^2 on Z is a hom") {
    auto z = fixtures::free_abelian(1);
    GroupHom f{z, z, {{2}}};
    CHECK(verify_hom(f).passed());
  }
}

TEST_CASE("hom application and composition") {
  auto h = fixtures::heisenberg();
  // the automorphism a -> a c, b -> b (acts trivially on the abelianization)
  GroupHom f{h, h, {{1, 0, 1}, {0, 1, 0}, {0, 0, 1}}};
  REQUIRE(verify_hom(f).passed());
  CHECK(f.apply({1, 1, 0}) == h->multiply({1, 0, 1}, {0, 1, 0}));
  GroupHom ff = compose(f, f);
  CHECK(ff.apply(h->generator(0)) == h->collect({{0, 1}, {2, 2}}));
}

TEST_CASE("direct products multiply componentwise") {
  auto h = fixtures::heisenberg();
  auto c = fixtures::c6();
  auto prod = direct_product(h, c, "h_", "z_");
  REQUIRE(prod->ngens() == 5);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; t++) {
    ExponentVector u = random_element(*prod, rng, 6);
    ExponentVector v = random_element(*prod, rng, 6);
    ExponentVector w = prod->multiply(u, v);
    ExponentVector uh(u.begin(), u.begin() + 3), vh(v.begin(), v.begin() + 3);
    ExponentVector uc(u.begin() + 3, u.end()), vc(v.begin() + 3, v.end());
    ExponentVector wh = h->multiply(uh, vh);
    ExponentVector wc = c->multiply(uc, vc);
    ExponentVector expect(wh);
    expect.insert(expect.end(), wc.begin(), wc.end());
    CHECK(w == expect);
  }
}

TEST_CASE("budget exhaustion raises instead of looping") {
  auto h = fixtures::heisenberg();
  PcPresentation tight({"a", "b", "c"}, {0, 0, 0});
  tight.set_conjugate(0, 1, {0, 1, 1});
  tight.set_conjugate_inverse(0, 1, {0, 1, -1});
  tight.build();
  tight.set_collect_budget(10);
  CHECK_THROWS_AS(
      tight.collect({{0, 5}, {1, 5}, {0, 5}, {1, 5}, {0, 5}, {1, 5}}),
      collect_budget_error);
}
