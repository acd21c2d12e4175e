#include <doctest.h>

#include <random>

#include "arakelab/errors.hpp"
#include "arakelab/exact_linalg.hpp"
#include "arakelab/lattice.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace arakelab;

namespace {

Rational q(long p, long d) {
  Rational r{Integer(p), Integer(d)};
  r.canonicalize();
  return r;
}

RatMatrix rat(std::initializer_list<std::initializer_list<Rational>> rows) {
  RatMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

EuclideanLattice scaled_lattice(const EuclideanLattice& L, const Rational& s) {
  return EuclideanLattice(scaled(L.gram(), s));
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("construction validates the gram") {
    CHECK_THROWS_AS(EuclideanLattice(rat({{1, 2}, {3, 1}})), NotPositiveDefinite);
    CHECK_THROWS_AS(EuclideanLattice(rat({{1, 2}, {2, 1}})), NotPositiveDefinite);
    CHECK_THROWS_AS(EuclideanLattice(rat({{0}})), NotPositiveDefinite);
    CHECK_THROWS(EuclideanLattice(RatMatrix(2, 3, Rational(0))));
    CHECK(EuclideanLattice().rank() == 0);
    CHECK(EuclideanLattice().determinant() == 1);
  }

  TEST_CASE("determinants of small grams") {
    const EuclideanLattice a(ints({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}}));
    CHECK(a.determinant() == 4);
    const EuclideanLattice b(ints({{3, 1, 1}, {1, 3, 1}, {1, 1, 3}}));
    CHECK(b.determinant() == 20);
    const auto ld = log_det_gram(b, DetMode::Exact);
    REQUIRE(ld.det);
    CHECK(*ld.det == 20);
    CHECK(testing::close(ld.log_det, log(Real(20)), Real("1e-35")));
    const auto lf = log_det_gram(b, DetMode::Float, 128);
    CHECK_FALSE(lf.det);
    CHECK(testing::close(lf.log_det, log(Real(20)), Real("1e-35")));
    CHECK(lf.error <= Real("1e-30"));
    CHECK(testing::close(arith_degree(b), -log(Real(20)) / 2, Real("1e-35")));
  }

  TEST_CASE("leading log-dets agree between exact and float paths") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 5; ++t) {
      IntMatrix g(6, 6, Integer(0));
      std::uniform_int_distribution<long> off(-3, 3);
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i) = off(rng);
      for (std::size_t i = 0; i < 6; ++i) g(i, i) = 20;
      const auto ex = leading_log_dets_exact(g, 128);
      const auto fl = leading_log_dets_float(to_rational(g), 128);
      REQUIRE(ex.size() == 6);
      REQUIRE(fl.size() == 6);
      for (std::size_t i = 0; i < 6; ++i) CHECK(testing::close(ex[i].log_det, fl[i].log_det, Real("1e-30")));
    }
  }

  TEST_CASE("dual lattice") {
    const EuclideanLattice L(ints({{2, 1}, {1, 2}}));
    const auto D = dual_lattice(L);
    CHECK(D.gram() == rat({{q(2, 3), q(-1, 3)}, {q(-1, 3), q(2, 3)}}));
    CHECK(dual_lattice(D) == L);
    CHECK(L.determinant() * D.determinant() == 1);
  }

  TEST_CASE("point counts on small lattices") {
    CHECK(h0_count(EuclideanLattice::standard(1)).count == 3);
    CHECK(h0_count(EuclideanLattice::standard(2)).count == 5);
    CHECK(h0_count(EuclideanLattice::standard(3)).count == 7);
    CHECK(h0_count(EuclideanLattice(rat({{q(1, 9)}}))).count == 7);
    CHECK(h0_count(EuclideanLattice(rat({{q(1, 4)}}))).count == 5);
    CHECK(h0_count(EuclideanLattice(rat({{2}}))).count == 1);
    CHECK(h0_count(EuclideanLattice()).count == 1);
    // Dual gram [[2/3,-1/3],[-1/3,2/3]]: 0, ±e1, ±e2, ±(e1+e2).
    CHECK(h1_count(EuclideanLattice(ints({{2, 1}, {1, 2}}))).count == 7);
    const auto pc = h0_count(EuclideanLattice::standard(2));
    CHECK(testing::close(pc.log, log(Real(5)), Real("1e-35")));
  }

  TEST_CASE("point counts match a brute-force box scan") {
    std::mt19937_64 rng(11);
    for (std::size_t r = 1; r <= 4; ++r) {
      for (int t = 0; t < 8; ++t) {
        const RatMatrix g = testing::random_gram(rng, r);
        const EuclideanLattice L(g);
        const Integer expected = testing::brute_force_count(g);
        const auto got = h0_count(L);
        CHECK(got.count == expected);
        CHECK(got.count % 2 == 1);
        EnumerationOptions exact;
        exact.path = EnumerationPath::Exact;
        EnumerationOptions fl;
        fl.path = EnumerationPath::CertifiedFloat;
        CHECK(h0_count(L, exact).count == expected);
        CHECK(h0_count(L, fl).count == expected);
      }
    }
  }

  TEST_CASE("counts on the boundary are exact") {
    // Points with norm exactly 1 must be counted on every path.
    const EuclideanLattice L(rat({{q(1, 3), q(1, 3)}, {q(1, 3), q(1, 3) + q(1, 100)}}));
    const Integer expected = testing::brute_force_count(L.gram());
    for (auto path : {EnumerationPath::Exact, EnumerationPath::CertifiedFloat}) {
      EnumerationOptions o;
      o.path = path;
      CHECK(h0_count(L, o).count == expected);
    }
  }

  TEST_CASE("counts grow when the gram shrinks") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
      const EuclideanLattice L(testing::random_gram(rng, 3));
      const auto a = h0_count(L).count;
      const auto b = h0_count(scaled_lattice(L, q(1, 2))).count;
      CHECK(a <= b);
    }
  }

  TEST_CASE("thread count does not change the count") {
    std::mt19937_64 rng(13);
    const EuclideanLattice L(scaled(testing::random_gram(rng, 5), q(1, 4)));
    EnumerationOptions one;
    EnumerationOptions three;
    three.threads = 3;
    CHECK(h0_count(L, one).count == h0_count(L, three).count);
  }

  TEST_CASE("node cap reports a lower bound") {
    const EuclideanLattice L(scaled(RatMatrix::identity(4), q(1, 100)));
    EnumerationOptions o;
    o.cap = 50;
    try {
      (void)h0_count(L, o);
      FAIL("expected CapExceeded");
    } catch (const CapExceeded& e) {
      CHECK(e.lower_bound() >= 1);
      CHECK(e.lower_bound() % 2 == 1);
      CHECK(e.lower_bound() <= testing::brute_force_count(L.gram()));
    }
  }

  TEST_CASE("chi of euclidean space") {
    CHECK(chi_euclid(0) == 0);
    CHECK(testing::close(chi_euclid(1), "0.693147180559945309417232121458", 1e-28));
    CHECK(testing::close(chi_euclid(2), "1.14472988584940017414342735135", 1e-28));
    CHECK(testing::close(chi_euclid(3), "1.43241195830118110158264635735", 1e-28));
    CHECK(testing::close(chi_euclid(4), "1.59631259113885503886962258125", 1e-28));
    CHECK(testing::close(chi_euclid(5), "1.66085111227642621054254649693", 1e-28));
    CHECK(testing::close(chi_euclid(6), "1.64243018832014552161780469568", 1e-28));
    const EuclideanLattice L(ints({{2, 1}, {1, 2}}));
    CHECK(testing::close(chi_hat(L), arith_degree(L) + chi_euclid(2), Real("1e-35")));
  }

  TEST_CASE("sublattice and quotient") {
    const auto Z3 = EuclideanLattice::standard(3);
    const IntMatrix A = ints({{1, 1, 0}, {0, 1, 1}});
    const auto S = sublattice(Z3, A);
    CHECK(S.gram() == rat({{2, 1}, {1, 2}}));
    const auto Q = quotient_lattice(Z3, A);
    REQUIRE(Q.rank() == 1);
    CHECK(Q.gram()(0, 0) == q(1, 3));
    CHECK(S.determinant() * Q.determinant() == Z3.determinant());
    CHECK_THROWS_AS(sublattice(Z3, ints({{1, 1, 0}, {2, 2, 0}})), RankDeficient);
  }

  TEST_CASE("quotient determinants multiply on random inputs") {
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<long> e(-3, 3);
    int tested = 0;
    for (int t = 0; t < 50 && tested < 10; ++t) {
      const EuclideanLattice L(testing::random_gram(rng, 4));
      IntMatrix A(2, 4);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) A(i, j) = e(rng);
      if (rank_kernel(A).rank != 2 || !unimodular_completion(A).saturated) continue;
      ++tested;
      const auto Q = quotient_lattice(L, A);
      CHECK(sublattice(L, A).determinant() * Q.determinant() == L.determinant());
    }
    CHECK(tested >= 5);
  }

  TEST_CASE("unsaturated spans are rejected") {
    const auto Z2 = EuclideanLattice::standard(2);
    try {
      (void)quotient_lattice(Z2, ints({{2, 0}}));
      FAIL("expected NotSaturated");
    } catch (const NotSaturated& e) {
      CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
  }

  TEST_CASE("invariants") {
    const EuclideanLattice L(ints({{2, 1}, {1, 2}}));
    const auto inv = invariants(L);
    CHECK(inv.h0_count == 1);
    CHECK(inv.h1_count == 7);
    CHECK(testing::close(inv.degree, -log(Real(3)) / 2, Real("1e-35")));
    CHECK(testing::close(inv.rr_discrepancy, inv.h0 - inv.degree - inv.h1, Real("1e-35")));
  }

  TEST_CASE("gram JSON round trip") {
    const EuclideanLattice L(rat({{q(2, 3), q(-1, 3)}, {q(-1, 3), q(2, 3)}}));
    const std::string text = gram_to_json(L);
    CHECK(text.find("\"-1/3\"") != std::string::npos);
    CHECK(gram_from_json(text) == L);
    CHECK_THROWS_AS(gram_from_json("{\"rank\": 2}"), ParseError);
    CHECK_THROWS_AS(gram_from_json("not json"), ParseError);
    CHECK_THROWS_AS(gram_from_json(R"({"rank":1,"gram":[["x"]]})"), ParseError);
  }
}
