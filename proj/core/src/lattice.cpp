#include "arakelab/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <utility>

#include <nlohmann/json.hpp>

#include "arakelab/errors.hpp"
#include "arakelab/exact_linalg.hpp"
#include "arakelab/parallel.hpp"

namespace arakelab {

EuclideanLattice::EuclideanLattice(RatMatrix gram) : gram_(std::move(gram)) {
  if (!gram_.square()) throw InvalidArgument("gram matrix must be square");
  if (!is_symmetric(gram_)) throw NotPositiveDefinite("gram matrix is not symmetric");
  const std::size_t r = gram_.rows();
  if (r == 0) return;
  const Integer den = common_denominator(gram_);
  IntMatrix scaled_gram(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Rational v = gram_(i, j) * den;
      scaled_gram(i, j) = v.get_num();
    }
  const std::vector<Integer> minors = bareiss_leading_minors(std::move(scaled_gram));
  minors_.reserve(r);
  Integer den_power = 1;
  for (std::size_t i = 0; i < r; ++i) {
    if (minors[i] <= 0) {
      throw NotPositiveDefinite("gram matrix is not positive definite (leading minor " +
                                std::to_string(i + 1) + " is not positive)");
    }
    den_power *= den;
    Rational m(minors[i], den_power);
    m.canonicalize();
    minors_.push_back(std::move(m));
  }
}

EuclideanLattice EuclideanLattice::standard(std::size_t rank) {
  return EuclideanLattice(RatMatrix::identity(rank));
}

namespace {

Real log_rational(const Rational& q) {
  return log(Real(q.get_num())) - log(Real(q.get_den()));
}

Real rounding_floor(const Real& value, long bits) {
  return ulp_scale(bits - 4) * (Real(1L) + abs(value));
}

// D of G = L D L^T, row by row, at the current working precision.
std::vector<Real> ldlt_diagonal(const RatMatrix& g) {
  const std::size_t n = g.rows();
  std::vector<Real> L(n * n);   // unit lower factor, row-major
  std::vector<Real> W(n);       // row i of L times D
  std::vector<Real> d(n);
  Real t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Real acc(g(i, j));
      for (std::size_t l = 0; l < j; ++l) {
        mpfr_mul(t.get(), W[l].get(), L[j * n + l].get(), MPFR_RNDN);
        mpfr_sub(acc.get(), acc.get(), t.get(), MPFR_RNDN);
      }
      W[j] = acc;
      L[i * n + j] = acc / d[j];
    }
    Real acc(g(i, i));
    for (std::size_t j = 0; j < i; ++j) {
      mpfr_mul(t.get(), W[j].get(), L[i * n + j].get(), MPFR_RNDN);
      mpfr_sub(acc.get(), acc.get(), t.get(), MPFR_RNDN);
    }
    if (acc.sign() <= 0) {
      throw NotPositiveDefinite("gram matrix is not numerically positive definite (pivot " +
                                std::to_string(i + 1) + ")");
    }
    d[i] = std::move(acc);
  }
  return d;
}

std::vector<Real> prefix_logs(const std::vector<Real>& d) {
  std::vector<Real> out;
  out.reserve(d.size());
  Real sum(0L);
  for (const Real& v : d) {
    sum += log(v);
    out.push_back(sum);
  }
  return out;
}

}  // namespace

std::vector<LogDet> leading_log_dets_float(const RatMatrix& gram, long precision_bits) {
  if (!gram.square()) throw InvalidArgument("gram matrix must be square");
  if (precision_bits < 64) throw InvalidArgument("precision must be at least 64 bits");
  std::vector<Real> coarse;
  std::vector<Real> fine;
  {
    PrecisionGuard guard(precision_bits);
    coarse = prefix_logs(ldlt_diagonal(gram));
  }
  const long fine_bits = precision_bits + 64;
  PrecisionGuard guard(fine_bits);
  fine = prefix_logs(ldlt_diagonal(gram));
  std::vector<LogDet> out;
  out.reserve(fine.size());
  const Real tolerance = ulp_scale(64);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    Real err = abs(fine[i] - coarse[i]) + rounding_floor(fine[i], fine_bits);
    if (err > tolerance * max(Real(1L), abs(fine[i]))) {
      throw PrecisionFailure("log det of leading block " + std::to_string(i + 1) +
                             " not certified to 2^-64 at " + std::to_string(precision_bits) + " bits");
    }
    out.push_back(LogDet{std::nullopt, fine[i], std::move(err)});
  }
  return out;
}

std::vector<LogDet> leading_log_dets_exact(const IntMatrix& gram, long precision_bits,
                                           const std::function<void(std::size_t)>& on_minor) {
  if (!gram.square()) throw InvalidArgument("gram matrix must be square");
  const std::vector<Integer> minors = bareiss_leading_minors(gram, on_minor);
  PrecisionGuard guard(precision_bits);
  std::vector<LogDet> out;
  out.reserve(minors.size());
  for (std::size_t i = 0; i < minors.size(); ++i) {
    if (minors[i] <= 0) {
      throw NotPositiveDefinite("leading minor " + std::to_string(i + 1) + " is not positive");
    }
    Real value = log(Real(minors[i]));
    Real err = rounding_floor(value, precision_bits);
    out.push_back(LogDet{Rational(minors[i]), std::move(value), std::move(err)});
  }
  return out;
}

LogDet log_det_gram(const EuclideanLattice& L, DetMode mode, long precision_bits) {
  if (L.rank() == 0) {
    PrecisionGuard guard(precision_bits);
    return LogDet{Rational(1), Real(0L), Real(0L)};
  }
  if (mode == DetMode::Float) return leading_log_dets_float(L.gram(), precision_bits).back();
  PrecisionGuard guard(precision_bits);
  const Rational det = L.determinant();
  Real value = log_rational(det);
  Real err = rounding_floor(value, precision_bits);
  return LogDet{det, std::move(value), std::move(err)};
}

Real arith_degree(const EuclideanLattice& L) {
  if (L.rank() == 0) return Real(0L);
  return -log_rational(L.determinant()) / Real(2L);
}

Real chi_euclid(long r) {
  if (r < 0) throw InvalidArgument("chi_euclid: rank must be non-negative");
  if (r == 0) return Real(0L);
  const Real half_r = Real(r) / Real(2L);
  return half_r * log(Real::pi()) - lgamma(half_r + Real(1L));
}

Real chi_hat(const EuclideanLattice& L) {
  return arith_degree(L) + chi_euclid(static_cast<long>(L.rank()));
}

// ---------------------------------------------------------------------------
// Enumeration of {x : x^T G x <= 1}. Only one of +-x is visited: the one whose
// last nonzero coordinate is positive. The count is 2 * found + 1.

namespace {

constexpr double kBoundaryMargin = 0x1p-30;
constexpr std::size_t kFlushEvery = 1024;

struct CapHit {};

class NodeBudget {
 public:
  NodeBudget(std::atomic<std::size_t>& shared, std::size_t cap) : shared_(shared), cap_(cap) {}
  ~NodeBudget() = default;

  void tick() {
    ++visited_;
    if (++pending_ == kFlushEvery) flush();
  }
  void flush() {
    const std::size_t total = shared_.fetch_add(pending_) + pending_;
    pending_ = 0;
    if (total > cap_) throw CapHit{};
  }
  std::size_t visited() const { return visited_; }

 private:
  std::atomic<std::size_t>& shared_;
  std::size_t cap_;
  std::size_t pending_ = 0;
  std::size_t visited_ = 0;
};

Rational quadratic_form(const RatMatrix& g, const std::vector<Integer>& x) {
  Rational q = 0;
  const std::size_t r = x.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < r; ++j)
      if (x[j] != 0) row += g(i, j) * x[j];
    q += row * x[i];
  }
  return q;
}

Integer round_rational(const Rational& c) {
  Integer num = 2 * c.get_num() + c.get_den();
  Integer den = 2 * c.get_den();
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

class ExactEnumerator {
 public:
  explicit ExactEnumerator(const ExactLDLT& f) : f_(f), r_(f.D.size()) {}

  // Counts half-space vectors below the top-level choice x_{r-1} = top.
  std::uint64_t run_top(const Integer& top, NodeBudget& budget, std::uint64_t& found) {
    x_.assign(r_, Integer(0));
    const std::size_t i = r_ - 1;
    Rational used = f_.D[i] * top * top;
    if (used > 1) return 0;
    budget.tick();
    x_[i] = top;
    if (i == 0) {
      if (top != 0) ++found;
    } else {
      descend(i - 1, Rational(1) - used, top == 0, budget, found);
    }
    return found;
  }

  // Largest x >= 0 with D_{r-1} x^2 <= 1.
  long top_bound() const {
    const Rational& d = f_.D[r_ - 1];
    long x = 0;
    while (d * (x + 1) * (x + 1) <= 1) ++x;
    return x;
  }

 private:
  void descend(std::size_t i, const Rational& remaining, bool zero_above, NodeBudget& budget,
               std::uint64_t& found) {
    Rational c = 0;
    if (!zero_above) {
      for (std::size_t j = i + 1; j < r_; ++j)
        if (x_[j] != 0) c -= f_.L(j, i) * x_[j];
    }
    const Rational& d = f_.D[i];
    auto visit = [&](const Integer& v) -> bool {
      Rational diff = v - c;
      Rational used = d * diff * diff;
      if (used > remaining) return false;
      budget.tick();
      x_[i] = v;
      if (i == 0) {
        if (!(zero_above && v == 0)) ++found;
      } else {
        descend(i - 1, remaining - used, zero_above && v == 0, budget, found);
      }
      return true;
    };
    const Integer start = zero_above ? Integer(0) : round_rational(c);
    for (Integer v = start; visit(v); ++v) {
    }
    if (!zero_above) {
      for (Integer v = start - 1; visit(v); --v) {
      }
    }
    x_[i] = 0;
  }

  const ExactLDLT& f_;
  std::size_t r_;
  std::vector<Integer> x_;
};

struct FloatFactor {
  std::size_t r = 0;
  std::vector<long double> L;  // row-major unit lower
  std::vector<long double> D;
};

// LDL^T in long double; empty optional when the conditioning estimate is too
// large for the boundary margin to absorb rounding.
std::optional<FloatFactor> float_factor(const RatMatrix& g) {
  FloatFactor f;
  f.r = g.rows();
  const std::size_t n = f.r;
  f.L.assign(n * n, 0.0L);
  f.D.assign(n, 0.0L);
  long double max_diag = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      long double acc = static_cast<long double>(g(i, j).get_d());
      for (std::size_t l = 0; l < j; ++l) acc -= f.L[i * n + l] * f.L[j * n + l] * f.D[l];
      f.L[i * n + j] = acc / f.D[j];
    }
    long double acc = static_cast<long double>(g(i, i).get_d());
    max_diag = std::max(max_diag, acc);
    for (std::size_t j = 0; j < i; ++j) acc -= f.L[i * n + j] * f.L[i * n + j] * f.D[j];
    if (!(acc > 0.0L)) return std::nullopt;
    f.D[i] = acc;
  }
  const long double min_d = *std::min_element(f.D.begin(), f.D.end());
  const long double condition = max_diag / min_d * static_cast<long double>(n);
  if (condition > 0x1p21L) return std::nullopt;
  return f;
}

class FloatEnumerator {
 public:
  FloatEnumerator(const FloatFactor& f, const RatMatrix& gram) : f_(f), gram_(gram), r_(f.r) {}

  long top_bound() const {
    return static_cast<long>(std::floor(std::sqrt((1.0L + kBoundaryMargin) / f_.D[r_ - 1])));
  }

  void run_top(long top, NodeBudget& budget, std::uint64_t& found) {
    x_.assign(r_, 0);
    const std::size_t i = r_ - 1;
    const long double limit = 1.0L + kBoundaryMargin;
    const long double used = f_.D[i] * static_cast<long double>(top) * top;
    if (used > limit) return;
    budget.tick();
    x_[i] = top;
    if (i == 0) {
      if (top != 0) accept(limit - used, found);
    } else {
      descend(i - 1, limit - used, top == 0, budget, found);
    }
  }

 private:
  void accept(long double remaining, std::uint64_t& found) {
    const long double q = 1.0L + kBoundaryMargin - remaining;
    if (q <= 1.0L - kBoundaryMargin) {
      ++found;
      return;
    }
    std::vector<Integer> xi(x_.begin(), x_.end());
    if (quadratic_form(gram_, xi) <= 1) ++found;
  }

  void descend(std::size_t i, long double remaining, bool zero_above, NodeBudget& budget,
               std::uint64_t& found) {
    long double c = 0.0L;
    if (!zero_above)
      for (std::size_t j = i + 1; j < r_; ++j) c -= f_.L[j * r_ + i] * static_cast<long double>(x_[j]);
    const long double t = std::sqrt(std::max(0.0L, remaining) / f_.D[i]);
    const long lo = zero_above ? 0 : static_cast<long>(std::ceil(c - t));
    const long hi = static_cast<long>(std::floor(c + t));
    for (long v = lo; v <= hi; ++v) {
      const long double diff = static_cast<long double>(v) - c;
      const long double used = f_.D[i] * diff * diff;
      if (used > remaining) continue;
      budget.tick();
      x_[i] = v;
      if (i == 0) {
        if (!(zero_above && v == 0)) accept(remaining - used, found);
      } else {
        descend(i - 1, remaining - used, zero_above && v == 0, budget, found);
      }
    }
    x_[i] = 0;
  }

  const FloatFactor& f_;
  const RatMatrix& gram_;
  std::size_t r_;
  std::vector<long> x_;
};

constexpr std::size_t kExactRankLimit = 32;

template <typename Enumerator, typename Top>
PointCount enumerate_tops(Enumerator& proto, long top_bound, const EnumerationOptions& opts,
                          EnumerationPath path) {
  const std::size_t tasks = static_cast<std::size_t>(top_bound) + 1;
  std::vector<std::uint64_t> found(tasks, 0);
  std::vector<std::size_t> visited(tasks, 0);
  std::atomic<std::size_t> shared{0};
  try {
    parallel_for(tasks, opts.threads, [&](std::size_t t) {
      Enumerator local = proto;
      NodeBudget budget(shared, opts.cap);
      try {
        local.run_top(Top(static_cast<long>(t)), budget, found[t]);
        budget.flush();
      } catch (const CapHit&) {
        visited[t] = budget.visited();
        throw;
      }
      visited[t] = budget.visited();
    });
  } catch (const CapHit&) {
    Integer lower = 1;
    for (std::uint64_t v : found) lower += 2 * Integer(static_cast<unsigned long>(v));
    throw CapExceeded("lattice point enumeration exceeded the node cap of " + std::to_string(opts.cap) +
                          "; at least " + lower.get_str() + " points",
                      lower);
  }
  PointCount out;
  out.count = 1;
  for (std::uint64_t v : found) out.count += 2 * Integer(static_cast<unsigned long>(v));
  for (std::size_t v : visited) out.nodes += v;
  out.log = log(Real(out.count));
  out.path = path;
  return out;
}

}  // namespace

PointCount h0_count(const EuclideanLattice& L, const EnumerationOptions& opts) {
  const std::size_t r = L.rank();
  if (r == 0) return PointCount{Integer(1), Real(0L), 0, EnumerationPath::Exact};

  EnumerationPath path = opts.path;
  std::optional<FloatFactor> ff;
  if (path != EnumerationPath::Exact && (path == EnumerationPath::CertifiedFloat || r > kExactRankLimit)) {
    ff = float_factor(L.gram());
    if (ff) {
      path = EnumerationPath::CertifiedFloat;
    } else if (path == EnumerationPath::CertifiedFloat) {
      throw PrecisionFailure("gram too ill-conditioned for the certified floating-point enumeration");
    } else {
      path = EnumerationPath::Exact;
    }
  } else {
    path = EnumerationPath::Exact;
  }

  if (path == EnumerationPath::Exact) {
    const ExactLDLT f = ldlt_exact(L.gram());
    ExactEnumerator proto(f);
    return enumerate_tops<ExactEnumerator, Integer>(proto, proto.top_bound(), opts, path);
  }
  FloatEnumerator proto(*ff, L.gram());
  return enumerate_tops<FloatEnumerator, long>(proto, proto.top_bound(), opts, path);
}

EuclideanLattice dual_lattice(const EuclideanLattice& L) {
  if (L.rank() == 0) return L;
  return EuclideanLattice(inverse(L.gram()));
}

PointCount h1_count(const EuclideanLattice& L, const EnumerationOptions& opts) {
  return h0_count(dual_lattice(L), opts);
}

namespace {

void check_rows(const EuclideanLattice& L, const IntMatrix& rows) {
  if (rows.cols() != L.rank()) {
    throw InvalidArgument("row matrix has " + std::to_string(rows.cols()) + " columns, lattice rank is " +
                          std::to_string(L.rank()));
  }
  if (rows.rows() == 0) return;
  if (rank_kernel(rows).rank != rows.rows()) {
    throw RankDeficient("row matrix does not have full row rank");
  }
}

}  // namespace

EuclideanLattice sublattice(const EuclideanLattice& L, const IntMatrix& rows) {
  check_rows(L, rows);
  const RatMatrix a = to_rational(rows);
  return EuclideanLattice(a * L.gram() * a.transpose());
}

QuotientLattice quotient_lattice_with_basis(const EuclideanLattice& L, const IntMatrix& rows) {
  check_rows(L, rows);
  const std::size_t r = L.rank();
  if (rows.rows() == 0) return QuotientLattice{L, IntMatrix::identity(r), true};

  Completion c = unimodular_completion(rows);
  if (!c.saturated) {
    std::string divs;
    for (const Integer& e : c.divisors) {
      if (e == 1) continue;
      if (!divs.empty()) divs += ", ";
      divs += e.get_str();
    }
    throw NotSaturated("row span is not saturated; elementary divisors > 1: " + divs);
  }
  const RatMatrix& g = L.gram();
  const RatMatrix a = to_rational(rows);
  const RatMatrix b = to_rational(c.complement);
  const RatMatrix ga = g * a.transpose();
  const RatMatrix projection = g - ga * inverse(a * ga) * ga.transpose();
  return QuotientLattice{EuclideanLattice(b * projection * b.transpose()), std::move(c.complement),
                         c.pivot_based};
}

EuclideanLattice quotient_lattice(const EuclideanLattice& L, const IntMatrix& rows) {
  return quotient_lattice_with_basis(L, rows).lattice;
}

LatticeInvariants invariants(const EuclideanLattice& L, const EnumerationOptions& opts) {
  LatticeInvariants inv;
  inv.degree = arith_degree(L);
  inv.chi = chi_hat(L);
  PointCount h0 = h0_count(L, opts);
  PointCount h1 = h1_count(L, opts);
  inv.h0_count = std::move(h0.count);
  inv.h0 = std::move(h0.log);
  inv.h1_count = std::move(h1.count);
  inv.h1 = std::move(h1.log);
  inv.rr_discrepancy = inv.h0 - inv.degree - inv.h1;
  return inv;
}

std::string gram_to_json(const EuclideanLattice& L) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < L.rank(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < L.rank(); ++j) row.push_back(L.gram()(i, j).get_str());
    rows.push_back(std::move(row));
  }
  nlohmann::json doc = {{"rank", L.rank()}, {"gram", std::move(rows)}};
  return doc.dump();
}

EuclideanLattice gram_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gram JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rank") || !doc.contains("gram")) {
    throw ParseError("gram JSON: expected an object with \"rank\" and \"gram\"");
  }
  const auto& jr = doc["rank"];
  if (!jr.is_number_unsigned()) throw ParseError("gram JSON: rank must be a non-negative integer");
  const std::size_t r = jr.get<std::size_t>();
  const auto& jg = doc["gram"];
  if (!jg.is_array() || jg.size() != r) throw ParseError("gram JSON: gram must have rank rows");
  RatMatrix g(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    if (!jg[i].is_array() || jg[i].size() != r) throw ParseError("gram JSON: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < r; ++j) {
      const auto& e = jg[i][j];
      std::string s;
      if (e.is_string()) {
        s = e.get<std::string>();
      } else if (e.is_number_integer()) {
        s = std::to_string(e.get<long long>());
      } else {
        throw ParseError("gram JSON: entries must be rational strings or integers");
      }
      Rational q;
      if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw ParseError("gram JSON: bad rational '" + s + "'");
      q.canonicalize();
      g(i, j) = q;
    }
  }
  return EuclideanLattice(std::move(g));
}

}  // namespace arakelab
