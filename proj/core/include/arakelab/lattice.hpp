#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arakelab/matrix.hpp"
#include "arakelab/real.hpp"

namespace arakelab {

/// Free Z-module of rank r with a fixed basis and an exact rational Gram
/// matrix. Construction verifies symmetry and positive definiteness (all
/// leading principal minors positive, by fraction-free elimination); the
/// minors are kept so that exact determinants come for free.
class EuclideanLattice {
 public:
  EuclideanLattice() : EuclideanLattice(RatMatrix(0, 0)) {}
  explicit EuclideanLattice(RatMatrix gram);
  explicit EuclideanLattice(const IntMatrix& gram) : EuclideanLattice(to_rational(gram)) {}

  static EuclideanLattice standard(std::size_t rank);

  std::size_t rank() const noexcept { return gram_.rows(); }
  const RatMatrix& gram() const noexcept { return gram_; }

  // det of the leading i x i block, for i = 1..rank.
  const std::vector<Rational>& leading_minors() const noexcept { return minors_; }
  Rational determinant() const { return minors_.empty() ? Rational(1) : minors_.back(); }

  friend bool operator==(const EuclideanLattice& a, const EuclideanLattice& b) {
    return a.gram_ == b.gram_;
  }

 private:
  RatMatrix gram_;
  std::vector<Rational> minors_;
};

enum class DetMode { Exact, Float };

struct LogDet {
  std::optional<Rational> det;  // set in exact mode
  Real log_det;
  Real error;                   // absolute error bound on log_det
};

// Exact mode: fraction-free determinant. Float mode: LDL^T at the working
// precision, cross-checked at 64 extra bits; the discrepancy is reported as
// the error and must not exceed 2^-64 relative.
LogDet log_det_gram(const EuclideanLattice& L, DetMode mode, long precision_bits = kDefaultPrecisionBits);

// log det of every leading principal block of a symmetric positive definite
// matrix, from one floating-point LDL^T. Throws NotPositiveDefinite or
// PrecisionFailure.
std::vector<LogDet> leading_log_dets_float(const RatMatrix& gram, long precision_bits);

// Exact leading minors of an integer symmetric matrix; on_minor(i) fires when
// minor i+1 is known.
std::vector<LogDet> leading_log_dets_exact(const IntMatrix& gram, long precision_bits,
                                           const std::function<void(std::size_t)>& on_minor = {});

// -1/2 log det(gram).
Real arith_degree(const EuclideanLattice& L);

// -log(Gamma(r/2 + 1) pi^{-r/2}).
Real chi_euclid(long r);

// arith_degree(L) + chi_euclid(rank).
Real chi_hat(const EuclideanLattice& L);

enum class EnumerationPath { Auto, Exact, CertifiedFloat };

struct EnumerationOptions {
  std::size_t cap = 10'000'000;  // search-tree node budget
  unsigned threads = 1;
  EnumerationPath path = EnumerationPath::Auto;
};

struct PointCount {
  Integer count;  // #{v : v^T G v <= 1}, always odd
  Real log;       // log(count)
  std::size_t nodes = 0;
  EnumerationPath path = EnumerationPath::Exact;
};

// Fincke-Pohst enumeration of the closed unit ball. Throws CapExceeded with
// the points found so far as lower bound.
PointCount h0_count(const EuclideanLattice& L, const EnumerationOptions& opts = {});

// Gram of the dual basis: gram^{-1}.
EuclideanLattice dual_lattice(const EuclideanLattice& L);

// h0_count(dual_lattice(L)).
PointCount h1_count(const EuclideanLattice& L, const EnumerationOptions& opts = {});

// Sublattice spanned by the rows of A (s x r, full row rank): gram A G A^T.
EuclideanLattice sublattice(const EuclideanLattice& L, const IntMatrix& rows);

struct QuotientLattice {
  EuclideanLattice lattice;
  IntMatrix complement;  // B: rows map to the quotient basis
  bool pivot_based = false;
};

// Quotient by the saturated row span of A with the induced (minimal coset
// representative) norm: gram_Q = B (G - G A^T (A G A^T)^{-1} A G) B^T, where B
// completes A to a unimodular basis. Throws NotSaturated naming the
// elementary divisors > 1, or RankDeficient.
QuotientLattice quotient_lattice_with_basis(const EuclideanLattice& L, const IntMatrix& rows);
EuclideanLattice quotient_lattice(const EuclideanLattice& L, const IntMatrix& rows);

struct LatticeInvariants {
  Real degree;
  Real chi;
  Integer h0_count;
  Real h0;
  Integer h1_count;
  Real h1;
  Real rr_discrepancy;  // h0 - degree - h1
};

LatticeInvariants invariants(const EuclideanLattice& L, const EnumerationOptions& opts = {});

// {"rank": r, "gram": [["p/q", ...], ...]}
std::string gram_to_json(const EuclideanLattice& L);
EuclideanLattice gram_from_json(const std::string& json_text);

}  // namespace arakelab
