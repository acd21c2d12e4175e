#include <doctest.h>

#include <set>

#include "arakelab/errors.hpp"
#include "arakelab/poly.hpp"

using namespace arakelab;

TEST_SUITE("poly") {
  TEST_CASE("graded-lex enumeration") {
    const auto e = enumerate_exponents(1, 2);
    REQUIRE(e.size() == 3);
    CHECK(e[0].exponents() == std::vector<int>{2, 0});
    CHECK(e[1].exponents() == std::vector<int>{1, 1});
    CHECK(e[2].exponents() == std::vector<int>{0, 2});
    CHECK(enumerate_exponents(2, 3).size() == 10);
    CHECK(enumerate_exponents(3, 0).size() == 1);
  }

  TEST_CASE("enumeration size, uniqueness and rank round-trip") {
    for (int N = 0; N <= 3; ++N) {
      for (int k = 0; k <= 6; ++k) {
        const auto e = enumerate_exponents(N, k);
        CHECK(e.size() == monomial_count(N, k));
        CHECK(Integer(static_cast<unsigned long>(e.size())) == binomial(k + N, N));
        std::set<std::vector<int>> seen;
        for (std::size_t i = 0; i < e.size(); ++i) {
          CHECK(e[i].total() == k);
          CHECK(graded_lex_rank(e[i]) == i);
          seen.insert(e[i].exponents());
          if (i > 0) CHECK(GradedLexBefore{}(e[i - 1], e[i]));
        }
        CHECK(seen.size() == e.size());
      }
    }
  }

  TEST_CASE("degree k-1 monomials times x0 are a prefix of degree k") {
    for (int N = 1; N <= 3; ++N) {
      for (int k = 1; k <= 5; ++k) {
        const auto lo = enumerate_exponents(N, k - 1);
        const auto hi = enumerate_exponents(N, k);
        std::vector<int> x0(static_cast<std::size_t>(N) + 1, 0);
        x0[0] = 1;
        for (std::size_t i = 0; i < lo.size(); ++i) CHECK(hi[i] == lo[i] + ExponentIndex(x0));
      }
    }
  }

  TEST_CASE("binomials") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(52, 5) == 2598960);
  }

  TEST_CASE("construction normalizes and validates") {
    HomogeneousPolynomial f(2, {{{1, 0}, 2}, {{0, 1}, 3}, {{1, 0}, -2}});
    CHECK(f.terms().size() == 1);
    CHECK(f.coefficient(ExponentIndex({0, 1})) == 3);
    CHECK(f.degree() == 1);
    CHECK_THROWS_AS(HomogeneousPolynomial(2, {{{1, 0}, 1}, {{1, 0}, -1}}), InvalidArgument);
    CHECK_THROWS_AS(HomogeneousPolynomial(2, {{{1, 0}, 1}, {{2, 0}, 1}}), InvalidArgument);
    CHECK_THROWS_AS(HomogeneousPolynomial(2, {{{1, 0, 0}, 1}}), InvalidArgument);
  }

  TEST_CASE("parser") {
    const auto f = parse_poly("x0^3 + 3*x1^2*x2 - x0*x1*x2", 2);
    CHECK(f.coefficient(ExponentIndex({0, 2, 1})) == 3);
    CHECK(f.coefficient(ExponentIndex({1, 1, 1})) == -1);
    CHECK_THROWS_AS(parse_poly("x0 + x1^2"), ParseError);
    CHECK_THROWS_AS(parse_poly("x0 +"), ParseError);
    CHECK_THROWS_AS(parse_poly("x3", 2), ParseError);
    CHECK_THROWS_AS(parse_poly("x0 - x0"), ParseError);
    const auto g = parse_poly("x0^2 + x0*x1 - 2*x1*x2");
    CHECK(g.N() == 2);
    CHECK(g.degree() == 2);
    CHECK(g.coefficient(ExponentIndex({0, 1, 1})) == -2);
    CHECK(parse_poly("2*x0").coefficient(ExponentIndex({1})) == 2);
    try {
      parse_poly("x0^2 + x1");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("x1 (degree 1)") != std::string::npos);
    }
  }

  TEST_CASE("text and JSON round trips") {
    const auto f = parse_poly("x0^2 - 12345678901234567890*x1*x2 + 7*x2^2");
    CHECK(parse_poly(to_string(f), f.N()) == f);
    CHECK(poly_from_json(poly_to_json(f)) == f);
    CHECK_THROWS_AS(poly_from_json("{\"nvars\": 2}"), ParseError);
    CHECK_THROWS_AS(poly_from_json("not json"), ParseError);
  }

  TEST_CASE("multiplication") {
    const auto a = parse_poly("x0 + x1");
    const auto b = parse_poly("x0 - x1");
    CHECK(poly_mul(a, b) == parse_poly("x0^2 - x1^2"));
    CHECK_THROWS_AS(poly_mul(a, parse_poly("x0 + x2")), InvalidArgument);
    CHECK(scale(a, 3) == parse_poly("3*x0 + 3*x1"));
  }

  TEST_CASE("dehomogenize and rehomogenize") {
    const auto f = parse_poly("x0^2 + x0*x1 - 2*x1*x2");
    const auto g = dehomogenize(f);
    CHECK(g.nvars == 2);
    CHECK(g.coeffs.at({0, 0}) == 1);
    CHECK(g.coeffs.at({1, 1}) == -2);
    CHECK(rehomogenize(g, 2) == f);
  }
}
