#include "arakelab/sections.hpp"

#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "arakelab/errors.hpp"
#include "arakelab/exact_linalg.hpp"
#include "arakelab/torus.hpp"

namespace arakelab {

MetricSpec MetricSpec::lp(int p) {
  if (p < 1) throw InvalidArgument("lp metric needs p >= 1, got " + std::to_string(p));
  return {Kind::Lp, p};
}

std::string to_string(const MetricSpec& m) {
  switch (m.kind) {
    case MetricSpec::Kind::Canonical: return "canonical";
    case MetricSpec::Kind::Lp: return "lp(" + std::to_string(m.p) + ")";
    case MetricSpec::Kind::FubiniStudy: return "fubini-study";
  }
  return "?";
}

std::string to_string(const MeasureSpec& m) {
  return m.kind == MeasureSpec::Kind::TorusHaar ? "torus-haar" : "fubini-study-volume";
}

SectionSpace::SectionSpace(int N, int k, MetricSpec metric, MeasureSpec measure)
    : N_(N), k_(k), metric_(metric), measure_(measure) {
  if (N < 0) throw InvalidArgument("section space needs N >= 0");
  if (k < 0) throw InvalidArgument("section space needs k >= 0");
  if (metric.kind == MetricSpec::Kind::Lp && metric.p < 1) throw InvalidArgument("lp metric needs p >= 1");
  const bool torus = measure.kind == MeasureSpec::Kind::TorusHaar;
  const bool fs_metric = metric.kind == MetricSpec::Kind::FubiniStudy;
  if (torus == fs_metric) {
    throw UnsupportedMetric("unsupported (metric, measure) pair: (" + to_string(metric) + ", " +
                            to_string(measure) + ")");
  }
  basis_ = enumerate_exponents(N, k);
}

LpScale lp_scale(int N, int k, int p) {
  if (p < 1) throw InvalidArgument("lp metric needs p >= 1");
  const long g = std::gcd(2L * k, static_cast<long>(p));
  const unsigned long u = static_cast<unsigned long>(2L * k / g);
  const unsigned long v = static_cast<unsigned long>(p / g);
  LpScale out;
  out.value = pow(Real(static_cast<long>(N + 1)), Real(-static_cast<long>(u)) / Real(static_cast<long>(v)));
  Integer root;
  const Integer base = N + 1;
  if (mpz_root(root.get_mpz_t(), base.get_mpz_t(), v) != 0) {
    Integer den;
    mpz_pow_ui(den.get_mpz_t(), root.get_mpz_t(), u);
    out.exact = Rational(Integer(1), den);
  }
  return out;
}

namespace {

Rational fs_weight(const ExponentIndex& a, int N, int k) {
  Integer num = 1;
  Integer f;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(a[i]));
    num *= f;
  }
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(N));
  num *= f;
  Integer den;
  mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(k + N));
  Rational w(num, den);
  w.canonicalize();
  return w;
}

}  // namespace

Real monomial_weight(const SectionSpace& S, const ExponentIndex& a) {
  switch (S.metric().kind) {
    case MetricSpec::Kind::Canonical: return Real(1L);
    case MetricSpec::Kind::Lp: return lp_scale(S.N(), S.k(), S.metric().p).value;
    case MetricSpec::Kind::FubiniStudy: return Real(fs_weight(a, S.N(), S.k()));
  }
  return Real(1L);
}

EuclideanLattice monomial_gram(const SectionSpace& S) {
  const std::size_t n = S.dim();
  RatMatrix g(n, n, Rational(0));
  switch (S.metric().kind) {
    case MetricSpec::Kind::Canonical:
      return EuclideanLattice::standard(n);
    case MetricSpec::Kind::Lp: {
      const LpScale s = lp_scale(S.N(), S.k(), S.metric().p);
      if (!s.exact) {
        throw UnsupportedMetric("lp gram (N+1)^(-2k/p) is irrational for N=" + std::to_string(S.N()) +
                                ", k=" + std::to_string(S.k()) + ", p=" + std::to_string(S.metric().p));
      }
      for (std::size_t i = 0; i < n; ++i) g(i, i) = *s.exact;
      break;
    }
    case MetricSpec::Kind::FubiniStudy:
      for (std::size_t i = 0; i < n; ++i) g(i, i) = fs_weight(S.basis()[i], S.N(), S.k());
      break;
  }
  return EuclideanLattice(std::move(g));
}

MultiplicationMatrix build_Ck(const HomogeneousPolynomial& f, int k) {
  const int d = f.degree();
  if (k < d) {
    throw InvalidArgument("build_Ck needs k >= deg f (k=" + std::to_string(k) + ", d=" + std::to_string(d) + ")");
  }
  const auto rows = enumerate_exponents(f.N(), k - d);
  const std::size_t cols = monomial_count(f.N(), k);
  IntMatrix c(rows.size(), cols, Integer(0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [m, b] : f.terms()) c(i, graded_lex_rank(rows[i] + m)) = b;
  }
  return MultiplicationMatrix{f, k, std::move(c)};
}

CkRankKernel ck_rank_kernel(const MultiplicationMatrix& C) {
  RankKernel rk = rank_kernel(C.entries);
  const std::size_t expected = monomial_count(C.f.N(), C.k - C.f.degree());
  if (rk.rank != expected) {
    throw RankDeficient("rank of C_k is " + std::to_string(rk.rank) + ", expected " + std::to_string(expected));
  }
  return CkRankKernel{rk.rank, C.entries.cols() - rk.rank, std::move(rk.kernel_basis)};
}

namespace {

struct TernarySearch {
  struct Entry {
    std::size_t index;
    long coef;
  };
  std::vector<std::vector<Entry>> by_column;
  std::vector<long> partial;
  std::vector<long> remaining;  // sum of |coef| over unassigned columns, per row
  std::size_t cols = 0;
  std::size_t cap = 0;
  std::size_t nodes = 0;
  Integer found = 0;

  bool feasible(std::size_t j) const {
    for (const Entry& e : by_column[j]) {
      if (std::labs(partial[e.index]) > remaining[e.index]) return false;
    }
    return true;
  }

  void search(std::size_t j) {
    if (j == cols) {
      ++found;
      return;
    }
    for (long v : {0L, 1L, -1L}) {
      if (++nodes > cap) {
        throw CapExceeded("ternary kernel search exceeded the node cap of " + std::to_string(cap) +
                              "; at least " + found.get_str() + " solutions",
                          found);
      }
      for (const Entry& e : by_column[j]) {
        partial[e.index] += e.coef * v;
        remaining[e.index] -= std::labs(e.coef);
      }
      if (feasible(j)) search(j + 1);
      for (const Entry& e : by_column[j]) {
        partial[e.index] -= e.coef * v;
        remaining[e.index] += std::labs(e.coef);
      }
    }
  }
};

}  // namespace

Integer ternary_kernel_count(const MultiplicationMatrix& C, std::size_t cap) {
  const IntMatrix& m = C.entries;
  TernarySearch s;
  s.cols = m.cols();
  s.cap = cap;
  s.by_column.resize(m.cols());
  s.partial.assign(m.rows(), 0);
  s.remaining.assign(m.rows(), 0);
  constexpr long kLimit = std::numeric_limits<long>::max() / 4;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer row_abs = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0) continue;
      if (!m(i, j).fits_slong_p()) throw InvalidArgument("ternary_kernel_count: coefficient too large");
      row_abs += abs(m(i, j));
      s.by_column[j].push_back({i, m(i, j).get_si()});
    }
    if (row_abs > kLimit) throw InvalidArgument("ternary_kernel_count: coefficients too large");
    s.remaining[i] = row_abs.get_si();
  }
  s.search(0);
  return s.found;
}

IntMatrix fsub_gram_matrix(const HomogeneousPolynomial& f, int k) {
  const int d = f.degree();
  if (k < d) {
    throw InvalidArgument("fsub_gram needs k >= deg f (k=" + std::to_string(k) + ", d=" + std::to_string(d) + ")");
  }
  const AutocorrelationTable table = autocorrelation(f);
  const auto mus = enumerate_exponents(f.N(), k - d);
  const std::size_t n = mus.size();
  const std::size_t N = static_cast<std::size_t>(f.N());
  IntMatrix g(n, n);
  std::vector<int> offset(N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t v = 0; v < N; ++v) offset[v] = mus[i][v + 1] - mus[j][v + 1];
      g(i, j) = table.at(offset);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

EuclideanLattice fsub_gram(const HomogeneousPolynomial& f, int k, const SectionSpace& S) {
  if (S.k() != k) throw InvalidArgument("fsub_gram: section space has degree " + std::to_string(S.k()) + ", expected " + std::to_string(k));
  if (S.N() != f.N()) throw InvalidArgument("fsub_gram: polynomial and section space have different N");
  if (S.metric().kind == MetricSpec::Kind::Canonical) return EuclideanLattice(fsub_gram_matrix(f, k));
  return sublattice(monomial_gram(S), build_Ck(f, k).entries);
}

EuclideanLattice hypersurface_quotient(const HomogeneousPolynomial& f, int k, const SectionSpace& S) {
  if (S.k() != k) throw InvalidArgument("hypersurface_quotient: section space has degree " + std::to_string(S.k()) + ", expected " + std::to_string(k));
  if (S.N() != f.N()) throw InvalidArgument("hypersurface_quotient: polynomial and section space have different N");
  return quotient_lattice(monomial_gram(S), build_Ck(f, k).entries);
}

namespace {

void check_section(const std::vector<Integer>& s, const SectionSpace& S) {
  if (s.size() != S.dim()) {
    throw InvalidArgument("section has " + std::to_string(s.size()) + " coefficients, space has dimension " +
                          std::to_string(S.dim()));
  }
}

Real norm1(const std::vector<Integer>& s) {
  Real total(0L);
  for (const Integer& c : s) total += Real(Integer(abs(c)));
  return total;
}

// Metric factor multiplying |s(x)| on the torus, where |x_i| = 1.
Real torus_factor(const SectionSpace& S) {
  if (S.metric().kind == MetricSpec::Kind::Lp) return sqrt(lp_scale(S.N(), S.k(), S.metric().p).value);
  return Real(1L);
}

double unit_double(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1p-53; }

}  // namespace

Real sup_norm_lower_bound(const std::vector<Integer>& s, const SectionSpace& S, long grid, std::uint64_t seed) {
  check_section(s, S);
  if (grid < 2) throw InvalidArgument("sup_norm_lower_bound needs grid >= 2");
  const int N = S.N();
  const int k = S.k();
  std::size_t points = 1;
  for (int i = 0; i < N; ++i) {
    if (points > (std::size_t{1} << 40) / static_cast<std::size_t>(grid)) throw InvalidArgument("sample grid too large");
    points *= static_cast<std::size_t>(grid);
  }
  const bool fs = S.metric().kind == MetricSpec::Kind::FubiniStudy;
  const std::vector<double> phases = phase_offsets(seed, static_cast<std::size_t>(N));
  std::mt19937_64 rng(seed);
  const Real two_pi = Real::pi() * Real(2L);

  Real best(0L);
  std::vector<std::vector<Complex>> powers(static_cast<std::size_t>(N + 1));
  for (std::size_t pt = 0; pt < points; ++pt) {
    std::vector<Complex> x(static_cast<std::size_t>(N + 1));
    if (fs) {
      // Gaussian vector via Box-Muller; direction is uniform on the sphere.
      for (auto& xi : x) {
        const double u1 = 1.0 - unit_double(rng());
        const double u2 = unit_double(rng());
        const Real radius = sqrt(Real(-2L) * log(Real(u1)));
        xi = Complex::polar_unit(two_pi * Real(u2)) * radius;
      }
    } else {
      x[0] = Complex(Real(1L), Real(0L));
      std::size_t rest = pt;
      for (int v = 0; v < N; ++v) {
        const long g = static_cast<long>(rest % static_cast<std::size_t>(grid));
        rest /= static_cast<std::size_t>(grid);
        const Real angle = two_pi * (Real(g) + Real(phases[static_cast<std::size_t>(v)])) / Real(grid);
        x[static_cast<std::size_t>(v + 1)] = Complex::polar_unit(angle);
      }
    }
    for (int v = 0; v <= N; ++v) {
      auto& pw = powers[static_cast<std::size_t>(v)];
      pw.assign(static_cast<std::size_t>(k + 1), Complex(Real(1L), Real(0L)));
      for (int e = 1; e <= k; ++e) pw[static_cast<std::size_t>(e)] = pw[static_cast<std::size_t>(e - 1)] * x[static_cast<std::size_t>(v)];
    }
    Complex value(Real(0L), Real(0L));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 0) continue;
      Complex term(Real(s[i]), Real(0L));
      const ExponentIndex& a = S.basis()[i];
      for (int v = 0; v <= N; ++v) term *= powers[static_cast<std::size_t>(v)][static_cast<std::size_t>(a[static_cast<std::size_t>(v)])];
      value += term;
    }
    Real norm = value.abs();
    if (fs) {
      Real len2(0L);
      for (const auto& xi : x) len2 += xi.norm2();
      norm /= pow(len2, Real(k) / Real(2L));
    }
    if (norm > best) best = norm;
  }
  if (!fs) best *= torus_factor(S);
  const Real allowance = ulp_scale(working_precision() - 16) * norm1(s) * Real(static_cast<long>(k + N + 2));
  best -= allowance;
  return best.sign() < 0 ? Real(0L) : best;
}

Real sup_grid_gap(const std::vector<Integer>& s, const SectionSpace& S, long grid) {
  check_section(s, S);
  if (grid < 2) throw InvalidArgument("sup_grid_gap needs grid >= 2");
  if (S.metric().kind == MetricSpec::Kind::FubiniStudy) {
    throw UnsupportedMetric("sup_grid_gap is only available for the torus metrics");
  }
  // |d p / d theta_j| <= sum_a |s_a| a_j and every point is within pi/grid of
  // a node in each coordinate.
  Real lipschitz(0L);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0) continue;
    lipschitz += Real(Integer(abs(s[i]))) * Real(static_cast<long>(S.k() - S.basis()[i][0]));
  }
  Real gap = lipschitz * Real::pi() / Real(grid) * torus_factor(S);
  return gap * (Real(1L) + ulp_scale(working_precision() - 8));
}

Real section_l2_norm(const std::vector<Integer>& s, const SectionSpace& S) {
  check_section(s, S);
  Real total(0L);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0) continue;
    const Real c(s[i]);
    total += c * c * monomial_weight(S, S.basis()[i]);
  }
  return sqrt(total);
}

}  // namespace arakelab
