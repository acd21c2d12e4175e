#include <doctest.h>

#include <random>

#include "arakelab/errors.hpp"
#include "arakelab/exact_linalg.hpp"
#include "oracles.hpp"

using namespace arakelab;

namespace {

IntMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

IntMatrix random_int(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST_SUITE("exact_linalg") {
  TEST_CASE("leading minors") {
    const auto m = int_matrix({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}});
    const auto minors = bareiss_leading_minors(m);
    REQUIRE(minors.size() == 3);
    CHECK(minors[0] == 2);
    CHECK(minors[1] == 3);
    CHECK(minors[2] == 4);
    CHECK(bareiss_leading_minors(int_matrix({{3, 1, 1}, {1, 3, 1}, {1, 1, 3}})).back() == 20);
    CHECK_THROWS_AS(bareiss_leading_minors(int_matrix({{0, 1}, {1, 0}})), NotPositiveDefinite);
  }

  TEST_CASE("pivoting determinant") {
    CHECK(bareiss_determinant(int_matrix({{0, 1}, {1, 0}})) == -1);
    CHECK(bareiss_determinant(int_matrix({{1, 2}, {2, 4}})) == 0);
    CHECK(bareiss_determinant(int_matrix({{2, -1, 0}, {4, 1, 3}, {0, 5, 7}})) == 2 * (7 - 15) + 1 * (28 - 0));
  }

  TEST_CASE("determinant is multiplicative on random integer matrices") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
      const IntMatrix a = random_int(rng, 4, 4, -5, 5);
      const IntMatrix b = random_int(rng, 4, 4, -5, 5);
      CHECK(bareiss_determinant(a * b) == bareiss_determinant(a) * bareiss_determinant(b));
    }
  }

  TEST_CASE("rational determinant, LDLT and inverse") {
    RatMatrix g(2, 2);
    g(0, 0) = Rational(2);
    g(0, 1) = g(1, 0) = Rational(1);
    g(1, 1) = Rational(2);
    CHECK(determinant(g) == 3);
    const auto f = ldlt_exact(g);
    CHECK(f.D[0] == 2);
    CHECK(f.D[1] == Rational(Integer(3), Integer(2)));
    const RatMatrix inv = inverse(g);
    CHECK(inv(0, 0) == Rational(Integer(2), Integer(3)));
    CHECK(inv(0, 1) == Rational(Integer(-1), Integer(3)));
    CHECK(g * inv == RatMatrix::identity(2));
    CHECK(common_denominator(inv) == 3);
    RatMatrix singular(2, 2, Rational(1));
    CHECK_THROWS_AS(inverse(singular), RankDeficient);
    CHECK_THROWS_AS(ldlt_exact(singular), NotPositiveDefinite);
  }

  TEST_CASE("LDLT reproduces random grams") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
      const RatMatrix g = testing::random_gram(rng, 4);
      const auto f = ldlt_exact(g);
      RatMatrix d(4, 4, Rational(0));
      for (std::size_t i = 0; i < 4; ++i) d(i, i) = f.D[i];
      CHECK(f.L * d * f.L.transpose() == g);
    }
  }

  TEST_CASE("rank and kernel") {
    const auto c = int_matrix({{1, 1, 0}, {0, 1, 1}});
    const auto rk = rank_kernel(c);
    CHECK(rk.rank == 2);
    REQUIRE(rk.kernel_basis.rows() == 1);
    const IntMatrix v = rk.kernel_basis;
    CHECK(c * v.transpose() == IntMatrix(2, 1, Integer(0)));
    CHECK(abs(v(0, 0)) == 1);
    CHECK(abs(v(0, 1)) == 1);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
      const IntMatrix a = random_int(rng, 3, 6, -3, 3);
      const auto r = rank_kernel(a);
      CHECK(r.rank + r.kernel_basis.rows() == 6);
      if (r.kernel_basis.rows() > 0) CHECK(a * r.kernel_basis.transpose() == IntMatrix(3, r.kernel_basis.rows(), Integer(0)));
    }
  }

  TEST_CASE("Hermite and Smith forms") {
    const auto a = int_matrix({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
    const auto h = hermite_normal_form(a);
    for (std::size_t i = 0; i < h.H.rows(); ++i) CHECK(h.H(i, h.pivots[i]) > 0);
    const auto d = elementary_divisors(a);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 2);
    CHECK(d[1] == 6);
    CHECK(d[2] == 12);
    CHECK(abs(bareiss_determinant(a)) == d[0] * d[1] * d[2]);
  }

  TEST_CASE("unimodular completion") {
    const auto c = int_matrix({{1, 1, 0}, {0, 1, 1}});
    const auto comp = unimodular_completion(c);
    CHECK(comp.saturated);
    CHECK(comp.pivot_based);
    IntMatrix full(3, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      full(0, j) = c(0, j);
      full(1, j) = c(1, j);
      full(2, j) = comp.complement(0, j);
    }
    CHECK(abs(bareiss_determinant(full)) == 1);

    // Saturated but with a non-unit HNF pivot: needs the column-transform path.
    const auto b = int_matrix({{2, 3}});
    const auto cb = unimodular_completion(b);
    CHECK(cb.saturated);
    CHECK_FALSE(cb.pivot_based);
    CHECK(abs(b(0, 0) * cb.complement(0, 1) - b(0, 1) * cb.complement(0, 0)) == 1);

    const auto bad = unimodular_completion(int_matrix({{2, 4}}));
    CHECK_FALSE(bad.saturated);
    CHECK(bad.divisors.back() == 2);
  }

  TEST_CASE("random completions are unimodular") {
    std::mt19937_64 rng(4);
    int tested = 0;
    for (int t = 0; t < 60 && tested < 15; ++t) {
      const IntMatrix a = random_int(rng, 2, 4, -4, 4);
      if (rank_kernel(a).rank != 2) continue;
      const auto comp = unimodular_completion(a);
      if (!comp.saturated) continue;
      ++tested;
      IntMatrix full(4, 4);
      for (std::size_t j = 0; j < 4; ++j) {
        full(0, j) = a(0, j);
        full(1, j) = a(1, j);
        full(2, j) = comp.complement(0, j);
        full(3, j) = comp.complement(1, j);
      }
      CHECK(abs(bareiss_determinant(full)) == 1);
    }
    CHECK(tested >= 5);
  }
}
