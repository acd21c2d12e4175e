// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arakelab/errors.hpp"
#include "arakelab/exact_linalg.hpp"
#include "arakelab/experiments.hpp"
#include "arakelab/lattice.hpp"
#include "arakelab/poly.hpp"
#include "arakelab/sections.hpp"
#include "arakelab/torus.hpp"
#include "oracles.hpp"

using namespace arakelab;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      detail << (ok ? "failed: " : "") << what;
      ok = false;
    }
  }
};

std::string fmt(const Real& x, int digits = 8) { return x.to_string(digits); }

HomogeneousPolynomial random_primitive(std::mt19937_64& rng, int N, int d) {
  std::uniform_int_distribution<long> coef(-3, 3);
  std::vector<std::pair<std::vector<int>, Integer>> terms;
  for (const auto& m : enumerate_exponents(N, d)) {
    long c = coef(rng);
    if (m[0] == d) c = 1;  // unit leading coefficient keeps f primitive
    if (c != 0) terms.emplace_back(m.exponents(), Integer(c));
  }
  return HomogeneousPolynomial(N + 1, terms);
}

// Exact identities: orthonormality, Toeplitz structure, rank and kernel
// formulas, determinant additivity and lp proportionality.
void exact_identities(Outcome& o) {
  for (int N = 1; N <= 3; ++N)
    for (int k = 0; k <= 10; ++k) {
      const SectionSpace S(N, k);
      o.require(monomial_gram(S) == EuclideanLattice::standard(S.dim()),
                "orthonormality N=" + std::to_string(N) + " k=" + std::to_string(k));
    }

  std::mt19937_64 rng(2024);
  std::size_t additivity_checks = 0;
  std::size_t proportionality_checks = 0;
  for (int t = 0; t < 10; ++t) {
    const int N = 1 + t % 2;
    const int d = 1 + t % 3;
    const int k = d + static_cast<int>(rng() % static_cast<unsigned>(11 - d));
    const auto f = random_primitive(rng, N, d);
    const std::string tag = " for " + to_string(f) + " k=" + std::to_string(k);

    const MultiplicationMatrix C = build_Ck(f, k);
    const auto rk = ck_rank_kernel(C);
    o.require(rk.rank == monomial_count(N, k - d), "rank" + tag);
    o.require(rk.kernel_dim == monomial_count(N, k) - monomial_count(N, k - d), "kernel dim" + tag);
    o.require(C.entries * rk.kernel_basis.transpose() == IntMatrix(rk.rank, rk.kernel_dim, Integer(0)),
              "kernel basis" + tag);

    // Toeplitz: entry (mu, mu') is the autocorrelation at the affine offset
    // mu - mu', and the gram equals C C^T.
    const IntMatrix g = fsub_gram_matrix(f, k);
    const auto rows = enumerate_exponents(N, k - d);
    const auto ac = autocorrelation(f);
    bool toeplitz = g == C.entries * C.entries.transpose();
    for (std::size_t i = 0; i < rows.size() && toeplitz; ++i)
      for (std::size_t j = 0; j < rows.size() && toeplitz; ++j) {
        std::vector<int> nu(static_cast<std::size_t>(N));
        for (int v = 0; v < N; ++v)
          nu[static_cast<std::size_t>(v)] = rows[i][static_cast<std::size_t>(v + 1)] - rows[j][static_cast<std::size_t>(v + 1)];
        toeplitz = g(i, j) == ac.at(nu);
      }
    o.require(toeplitz, "Toeplitz structure" + tag);

    std::vector<SectionSpace> spaces = {SectionSpace(N, k),
                                        SectionSpace(N, k, MetricSpec::fubini_study(), MeasureSpec::fubini_study_volume())};
    for (int p = 1; p <= 2 * k; ++p)
      if (lp_scale(N, k, p).exact) spaces.emplace_back(N, k, MetricSpec::lp(p));
    for (const auto& S : spaces) {
      const auto ambient = monomial_gram(S);
      const auto sub = fsub_gram(f, k, S);
      const auto Q = hypersurface_quotient(f, k, S);
      o.require(sub.determinant() * Q.determinant() == ambient.determinant(),
                "degree additivity under " + to_string(S.metric()) + tag);
      ++additivity_checks;
    }

    for (int p = 1; p <= 2 * k; ++p) {
      const auto scale = lp_scale(N, k, p);
      if (!scale.exact) continue;
      // scale^p == (N+1)^(-2k) as rationals.
      Rational lhs = 1;
      for (int i = 0; i < p; ++i) lhs *= *scale.exact;
      Rational rhs = 1;
      for (int i = 0; i < 2 * k; ++i) rhs /= N + 1;
      o.require(lhs == rhs, "lp scale p=" + std::to_string(p) + tag);
      const SectionSpace Sp(N, k, MetricSpec::lp(p));
      const SectionSpace Si(N, k);
      o.require(monomial_gram(Sp).gram() == scaled(monomial_gram(Si).gram(), *scale.exact) &&
                    fsub_gram(f, k, Sp).gram() == scaled(fsub_gram(f, k, Si).gram(), *scale.exact),
                "lp proportionality p=" + std::to_string(p) + tag);
      ++proportionality_checks;
    }
  }
  o.detail << (o.ok ? "" : "; ") << additivity_checks << " additivity and " << proportionality_checks
           << " proportionality identities";
}

void szego_n1(Outcome& o) {
  const auto f = parse_poly("x0+x1");
  // The pipeline's Gram determinants: leading minors of the largest Gram.
  const auto minors = bareiss_leading_minors(fsub_gram_matrix(f, 201));
  bool dets = minors.size() == 201;
  for (std::size_t i = 0; dets && i < minors.size(); ++i) dets = minors[i] == static_cast<long>(i + 2);
  o.require(dets, "tridiagonal determinants differ from k+2");
  const auto r = szego_experiment(f, {1, 200, 1}, SzegoMode::Auto);
  bool closed = r.points.size() == 200;
  for (const auto& p : r.points) {
    const Real expected = log(Real(p.k + 2)) / Real(p.k + 1);
    closed = closed && abs(p.value - expected) <= p.err + ulp_scale(kDefaultPrecisionBits - 8);
  }
  o.require(closed, "s_k differs from log(k+2)/(k+1)");
  const Real s199 = r.points[198].value;
  o.require(abs(s199) <= Real("0.03"), "|s_199| = " + fmt(abs(s199)) + " > 0.03");
  o.detail << (o.ok ? "" : "; ") << "s_199 = " << fmt(s199) << " (target 0, tol 0.03)";
}

void szego_n2(Outcome& o) {
  const auto f = parse_poly("x0+x1+x2");
  const auto q = height_target(f);
  const Real L = q.value;
  o.require(q.est_error <= Real("1e-5"), "target est_error " + fmt(q.est_error, 3) + " > 1e-5");
  o.require(abs(L - Real("0.6461319")) <= Real("1e-5"), "target " + fmt(L) + " not within 1e-5 of 0.6461319");
  ExperimentOptions opts;
  opts.threads = 1;
  const auto r = szego_experiment(f, {8, 24, 16}, SzegoMode::Float, opts);
  const Real e8 = abs(r.points[0].value - L);
  const Real e24 = abs(r.points[1].value - L);
  o.require(e24 <= Real("0.30"), "|s_24 - L| = " + fmt(e24) + " > 0.30");
  o.require(e24 < e8, "error did not decrease from k=8 to k=24");
  o.detail << (o.ok ? "" : "; ") << "L = " << fmt(L, 10) << ", s_8 = " << fmt(r.points[0].value, 10)
           << ", s_24 = " << fmt(r.points[1].value, 10) << ", |s_24 - L| = " << fmt(e24, 6) << " (tol 0.30)";
}

void mahler(Outcome& o) {
  const auto f1 = parse_poly("x0+x1");
  const auto f2 = parse_poly("2*x0", 1);
  const auto f3 = parse_poly("x0+x1+x2");
  const auto q1 = height_target(f1);
  const auto q2 = height_target(f2);
  const auto q3 = height_target(f3);
  const Real m1 = q1.value / Real(2);
  o.require(abs(m1) <= Real("1e-8"), "m(x0+x1) = " + fmt(m1));
  const Real two_log2 = Real(2) * log(Real(2));
  o.require(abs(q2.value - two_log2) <= Real("1e-20"), "height_target(2x0) = " + fmt(q2.value, 25));
  const auto raw = raw_grid_height(f3, 1024, 0);
  const Real gap = abs(q3.value - raw.value) / Real(2);
  o.require(gap <= Real("1e-4"), "m(1+x+y) differs from the raw grid by " + fmt(gap, 3));
  const std::vector<std::pair<const HomogeneousPolynomial*, const QuadratureResult*>> all = {
      {&f1, &q1}, {&f2, &q2}, {&f3, &q3}};
  for (const auto& [f, q] : all) {
    const Real res = quadrature_selfcheck(*f);
    o.require(res <= q->est_error, "selfcheck residual " + fmt(res, 3) + " exceeds est_error for " + to_string(*f));
  }
  o.detail << (o.ok ? "" : "; ") << "m(x0+x1) = " << fmt(m1, 3) << ", m(1+x+y) = " << fmt(q3.value / Real(2), 10)
           << " vs raw grid " << fmt(raw.value / Real(2), 10);
}

void h1_lemma(Outcome& o) {
  const std::vector<std::pair<std::string, long>> cases = {{"x0+x1", 12}, {"x0+x1+x2", 5}};
  for (const auto& [text, kmax] : cases) {
    const auto r = h1_lemma_experiment(parse_poly(text), {1, kmax, 1});
    o.require(r.bounds_hold, "kernel bounds violated for " + text);
    const Real first = r.report.points.front().value;
    const Real last = r.report.points.back().value;
    o.require(last <= first, "normalized h1 grew for " + text);
    o.detail << (o.ok ? "" : "; ") << text << ": h1 " << fmt(first, 4) << " -> " << fmt(last, 4) << "  ";
  }
}

void h0_volume(Outcome& o) {
  const auto f = parse_poly("x0+x1");
  const auto v = volume_experiment(f, {1, 64, 1});
  o.require(v.h0.points.size() == 64, "missing h0 points");
  bool exact = true;
  for (const auto& p : v.h0.points) {
    long root = 0;
    while ((root + 1) * (root + 1) <= p.k + 1) ++root;
    const Integer expected = 2 * root + 1;
    const auto count = h0_count(hypersurface_quotient(f, static_cast<int>(p.k), SectionSpace(1, static_cast<int>(p.k)))).count;
    exact = exact && count == expected &&
            abs(p.value - log(Real(expected)) / Real(p.k)) <= p.err + ulp_scale(kDefaultPrecisionBits - 8);
  }
  o.require(exact, "h0 differs from log(2 floor(sqrt(k+1)) + 1)");
  const Real h64 = v.h0.points.back().value;
  o.require(h64 <= Real("0.05"), "(1/64) h0 = " + fmt(h64) + " > 0.05");
  o.detail << (o.ok ? "" : "; ") << "(1/64) h0 = " << fmt(h64) << " (tol 0.05)";
}

void stirling(Outcome& o) {
  for (const auto& [N, d] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}}) {
    const auto r = stirling_experiment(N, d, {20, 200, 180});
    const Real v20 = abs(r.points[0].value);
    const Real v200 = abs(r.points[1].value);
    const std::string tag = "(" + std::to_string(N) + "," + std::to_string(d) + ")";
    o.require(v200 <= Real("0.02"), tag + " |value(200)| = " + fmt(v200, 6) + " > 0.02");
    o.require(v200 < v20, tag + " did not shrink from k=20 to k=200");
    if (o.ok) o.detail << tag << " " << fmt(v200, 6) << "  ";
  }
}

void rr(Outcome& o) {
  for (std::size_t r = 0; r <= 6; ++r) {
    const auto inv = invariants(EuclideanLattice::standard(r));
    o.require(inv.rr_discrepancy == 0, "discrepancy of Z^" + std::to_string(r) + " is not 0");
  }
  const auto rep = rr_discrepancy_experiment(parse_poly("x0+x1"), {8, 64, 56});
  const Real a = rep.points[0].value;
  const Real b = rep.points[1].value;
  o.require(b < a, "normalized discrepancy did not decrease from k=8 to k=64");
  o.detail << (o.ok ? "" : "; ") << "k=8: " << fmt(a) << ", k=64: " << fmt(b);
}

void enumeration(Outcome& o) {
  std::mt19937_64 rng(99);
  int agree = 0;
  for (int t = 0; t < 50; ++t) {
    const RatMatrix g = testing::random_gram(rng, 1 + static_cast<std::size_t>(t % 4));
    const Integer expected = testing::brute_force_count(g);
    const auto got = h0_count(EuclideanLattice(g));
    if (got.count == expected) ++agree;
    o.require(got.count == expected, "gram #" + std::to_string(t) + ": " + got.count.get_str() + " vs " +
                                         expected.get_str());
  }
  o.detail << (o.ok ? "" : "; ") << agree << "/50 grams agree";
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact identities", 60, exact_identities},
      {2, "Toeplitz limit N=1", 60, szego_n1},
      {3, "Toeplitz limit N=2", 600, szego_n2},
      {4, "Mahler quadrature", 60, mahler},
      {5, "h1 kernel bounds", 300, h1_lemma},
      {6, "h0 volume trend N=1", 60, h0_volume},
      {7, "Stirling bracket", 60, stirling},
      {8, "Riemann-Roch discrepancy", 60, rr},
      {9, "enumeration vs brute force", 60, enumeration},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.limit_s, "runtime over " + std::to_string(static_cast<int>(c.limit_s)) + " s");
    if (!o.ok) ++failures;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail.str() << " (" << timing
              << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
