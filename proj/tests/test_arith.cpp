#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "paranil/arith.hpp"

using namespace paranil;

namespace {

IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); i++)
    for (std::size_t j = 0; j < rows[i].size(); j++) m.at(i, j) = rows[i][j];
  return m;
}

bool is_hnf(const IntMatrix& h) {
  long last_pivot = -1;
  bool seen_zero_row = false;
  for (std::size_t i = 0; i < h.rows(); i++) {
    std::size_t p = 0;
    while (p < h.cols() && h.at(i, p) == 0) p++;
    if (p == h.cols()) {
      seen_zero_row = true;
      continue;
    }
    if (seen_zero_row) return false;
    if (static_cast<long>(p) <= last_pivot) return false;
    last_pivot = static_cast<long>(p);
    if (h.at(i, p) <= 0) return false;
    for (std::size_t k = 0; k < i; k++)
      if (h.at(k, p) < 0 || h.at(k, p) >= h.at(i, p)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("hermite normal form on the spec instances") {
  SUBCASE("already in HNF") {
    IntMatrix m{{2, 0}, {0, 3}};
    auto [h, u] = hermite_normal_form(m);
    CHECK(h == m);
    CHECK(u * m == h);
  }
  SUBCASE("2x2 with elimination") {
    IntMatrix m{{1, 2}, {3, 4}};
    auto [h, u] = hermite_normal_form(m);
    CHECK(h == IntMatrix{{1, 0}, {0, 2}});
    CHECK(u * m == h);
    CHECK(abs(u.determinant()) == 1);
  }
  SUBCASE("zero matrix") {
    IntMatrix m(2, 2);
    auto [h, u] = hermite_normal_form(m);
    CHECK(h.is_zero());
    CHECK(u.is_identity());
  }
}

TEST_CASE("hermite normal form randomized: U*M = H, U unimodular, H canonical") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 200; trial++) {
    std::size_t r = oracle::draw(rng, 1, 4);
    std::size_t c = oracle::draw(rng, 1, 4);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; i++)
      for (std::size_t j = 0; j < c; j++)
        m.at(i, j) = oracle::draw(rng, -9, 9);
    auto [h, u] = hermite_normal_form(m);
    CHECK(u * m == h);
    CHECK(abs(u.determinant()) == 1);
    CHECK(is_hnf(h));
  }
}

TEST_CASE("smith normal form on the spec instances") {
  SUBCASE("diag(2,3) -> diag(1,6)") {
    IntMatrix m{{2, 0}, {0, 3}};
    auto [s, u, v] = smith_normal_form(m);
    CHECK(s == IntMatrix{{1, 0}, {0, 6}});
    CHECK(u * m * v == s);
  }
  SUBCASE("the (alpha - 1) matrix of the p=3 instance") {
    IntMatrix m{{-1, -1}, {1, -2}};
    auto [s, u, v] = smith_normal_form(m);
    CHECK(s == IntMatrix{{1, 0}, {0, 3}});
    CHECK(u * m * v == s);
  }
  SUBCASE("identity stays identity") {
    IntMatrix m = IntMatrix::identity(4);
    auto [s, u, v] = smith_normal_form(m);
    CHECK(s.is_identity());
  }
}

TEST_CASE("smith normal form randomized: transforms exact, chain divisibility") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 200; trial++) {
    std::size_t r = oracle::draw(rng, 1, 4);
    std::size_t c = oracle::draw(rng, 1, 4);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; i++)
      for (std::size_t j = 0; j < c; j++)
        m.at(i, j) = oracle::draw(rng, -9, 9);
    auto [s, u, v] = smith_normal_form(m);
    CHECK(u * m * v == s);
    CHECK(abs(u.determinant()) == 1);
    CHECK(abs(v.determinant()) == 1);
    for (std::size_t i = 0; i < r; i++)
      for (std::size_t j = 0; j < c; j++)
        if (i != j) CHECK(s.at(i, j) == 0);
    Integer prev = -1;
    for (std::size_t k = 0; k < std::min(r, c); k++) {
      CHECK(s.at(k, k) >= 0);
      if (prev >= 0) {
        if (prev == 0) CHECK(s.at(k, k) == 0);
        else if (s.at(k, k) != 0) CHECK(s.at(k, k) % prev == 0);
      }
      prev = s.at(k, k);
    }
  }
}

TEST_CASE("abelian invariants agree with the enumeration oracle") {
  std::vector<std::vector<std::vector<long>>> cases = {
      {{2, 0}, {0, 3}},
      {{-1, -1}, {1, -2}},
      {{4, 0}, {0, 4}},
      {{2, 1}, {0, 6}},
      {{6, 4}, {2, 8}},
      {{3, 0, 0}, {0, 3, 0}, {0, 0, 9}},
      {{2, 1, 1}, {1, 3, 1}, {0, 0, 4}},
  };
  for (const auto& rows : cases) {
    int n = static_cast<int>(rows[0].size());
    oracle::FiniteQuotientOracle oro(rows, n);
    AbelianInvariants inv = abelian_invariants_from_relations(
        from_rows(rows), static_cast<std::size_t>(n));
    REQUIRE(inv.rank == 0);
    CHECK(inv.order() == Integer(oro.quotient_order()));
    auto expect = oro.elementary_divisors();
    REQUIRE(inv.divisors.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); i++)
      CHECK(inv.divisors[i] == Integer(expect[i]));
  }
}

TEST_CASE("abelian invariants with free part") {
  AbelianInvariants inv =
      abelian_invariants_from_relations(from_rows({{0, 0, 6}}), 3);
  CHECK(inv.rank == 2);
  REQUIRE(inv.divisors.size() == 1);
  CHECK(inv.divisors[0] == 6);
  CHECK(!inv.is_finite());

  AbelianInvariants none = abelian_invariants_from_relations(IntMatrix(), 2);
  CHECK(none.rank == 2);
  CHECK(none.divisors.empty());
}

TEST_CASE("lattice membership on the spec instances") {
  std::vector<std::vector<Integer>> gens = {{-1, 1}, {-1, -2}};
  SUBCASE("member with coefficients (-2,-1)") {
    auto r = lattice_membership(gens, {3, 0});
    REQUIRE(r.member);
    REQUIRE(r.coefficients.size() == 2);
    CHECK(r.coefficients[0] == -2);
    CHECK(r.coefficients[1] == -1);
  }
  SUBCASE("non-member") {
    auto r = lattice_membership(gens, {1, 0});
    CHECK(!r.member);
  }
  SUBCASE("empty generating set") {
    auto r = lattice_membership({}, {0, 0});
    CHECK(r.member);
    CHECK(r.coefficients.empty());
    CHECK(!lattice_membership({}, {1, 0}).member);
  }
}

TEST_CASE("lattice membership randomized: coefficients reproduce the vector") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; trial++) {
    std::size_t k = oracle::draw(rng, 1, 4);
    std::size_t n = oracle::draw(rng, 1, 4);
    std::vector<std::vector<Integer>> gens(k, std::vector<Integer>(n));
    for (auto& g : gens)
      for (auto& x : g) x = oracle::draw(rng, -6, 6);
    std::vector<Integer> v(n, Integer(0));
    bool expect_member = trial % 2 == 0;
    if (expect_member) {
      for (const auto& g : gens) {
        Integer c = oracle::draw(rng, -5, 5);
        for (std::size_t j = 0; j < n; j++) v[j] += c * g[j];
      }
    } else {
      for (auto& x : v) x = oracle::draw(rng, -40, 40);
    }
    auto r = lattice_membership(gens, v);
    if (expect_member) CHECK(r.member);
    if (r.member) {
      std::vector<Integer> sum(n, Integer(0));
      for (std::size_t i = 0; i < k; i++)
        for (std::size_t j = 0; j < n; j++)
          sum[j] += r.coefficients[i] * gens[i][j];
      CHECK(sum == v);
    }
  }
}

TEST_CASE("determinant, inverse, characteristic polynomial") {
  IntMatrix m{{0, -1}, {1, -1}};
  CHECK(m.determinant() == 1);
  CHECK((m * m * m).is_identity());
  IntMatrix inv = m.inverse_unimodular();
  CHECK((m * inv).is_identity());
  auto chi = m.characteristic_polynomial();  // t^2 + t + 1
  REQUIRE(chi.size() == 3);
  CHECK(chi[0] == 1);
  CHECK(chi[1] == 1);
  CHECK(chi[2] == 1);

  IntMatrix big{{2, 1, 0}, {1, 1, 3}, {0, 5, -1}};
  CHECK(big.determinant() == -31);
  CHECK_THROWS_AS(big.inverse_unimodular(), error);
}

TEST_CASE("integer kernel spans exactly the left null space") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 150; trial++) {
    std::size_t r = oracle::draw(rng, 1, 4);
    std::size_t c = oracle::draw(rng, 1, 3);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; i++)
      for (std::size_t j = 0; j < c; j++)
        m.at(i, j) = oracle::draw(rng, -4, 4);
    auto ker = integer_kernel(m);
    for (const auto& v : ker) {
      std::vector<Integer> prod(c, Integer(0));
      for (std::size_t i = 0; i < r; i++)
        for (std::size_t j = 0; j < c; j++) prod[j] += v[i] * m.at(i, j);
      CHECK(std::all_of(prod.begin(), prod.end(),
                        [](const Integer& x) { return x == 0; }));
    }
    // random null combinations must lie in the kernel lattice
    if (!ker.empty()) {
      std::vector<Integer> comb(r, Integer(0));
      for (const auto& v : ker) {
        Integer a = oracle::draw(rng, -3, 3);
        for (std::size_t i = 0; i < r; i++) comb[i] += a * v[i];
      }
      CHECK(lattice_membership(ker, comb).member);
    }
  }
}

TEST_CASE("abelian basis: orders and generation") {
  // Z^2 / <(2,0),(0,3)> = C2 x C3; basis orders multiply to 6
  IntMatrix m{{2, 0}, {0, 3}};
  auto basis = abelian_basis(m, 2);
  Integer total = 1;
  for (const auto& e : basis) {
    REQUIRE(e.order != 0);
    total *= e.order;
    // order * g lies in the relation lattice
    std::vector<std::vector<Integer>> rows = {m.row(0), m.row(1)};
    std::vector<Integer> v(2);
    for (int j = 0; j < 2; j++) v[j] = e.order * e.vec[j];
    CHECK(lattice_membership(rows, v).member);
  }
  CHECK(total == 6);

  // with a free part
  auto basis2 = abelian_basis(IntMatrix{{0, 0, 4}}, 3);
  int frees = 0, torsions = 0;
  for (const auto& e : basis2) (e.order == 0 ? frees : torsions)++;
  CHECK(frees == 2);
  CHECK(torsions == 1);
}

TEST_CASE("prime helpers") {
  CHECK(is_prime(Integer(2)));
  CHECK(is_prime(Integer(13)));
  CHECK(!is_prime(Integer(1)));
  CHECK(!is_prime(Integer(91)));
  auto ps = prime_divisors(Integer(360));
  REQUIRE(ps.size() == 3);
  CHECK(ps[0] == 2);
  CHECK(ps[1] == 3);
  CHECK(ps[2] == 5);
}
