#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "arakelab/matrix.hpp"

namespace arakelab {

// Fraction-free (Bareiss) elimination without pivoting. Returns the leading
// principal minors det(M[0..i, 0..i]) for i = 0..n-1. `on_minor(i)` is
// invoked as soon as minor i is final. Throws NotPositiveDefinite when a
// leading minor vanishes, since no pivoting is performed.
std::vector<Integer> bareiss_leading_minors(IntMatrix m,
                                            const std::function<void(std::size_t)>& on_minor = {});

Integer bareiss_determinant(IntMatrix m);

// Exact determinant of a rational square matrix: clear denominators, then Bareiss
// with row pivoting.
Rational determinant(const RatMatrix& m);

// Smallest positive integer D with D * m integral.
Integer common_denominator(const RatMatrix& m);

struct ExactLDLT {
  RatMatrix L;                // unit lower triangular
  std::vector<Rational> D;    // diagonal
};

// G = L diag(D) L^T exactly. Throws NotPositiveDefinite unless every D_i > 0.
ExactLDLT ldlt_exact(const RatMatrix& gram);

bool is_symmetric(const RatMatrix& m);

// Exact inverse; throws RankDeficient when singular.
RatMatrix inverse(const RatMatrix& m);

struct RankKernel {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_columns;
  // Rows form a basis of {a : M a = 0}, one vector per free column,
  // normalized to a primitive integer vector.
  IntMatrix kernel_basis;
};

// Fraction-free row echelon form, then back substitution for the kernel.
RankKernel rank_kernel(const IntMatrix& m);

struct HermiteForm {
  IntMatrix H;                       // row-style HNF, nonzero rows only
  std::vector<std::size_t> pivots;   // pivot column of each row
};

// Row Hermite normal form: echelon, positive pivots, entries above each pivot
// reduced into [0, pivot).
HermiteForm hermite_normal_form(const IntMatrix& a);

// Elementary divisors (nonzero diagonal of the Smith normal form), ascending
// in divisibility order.
std::vector<Integer> elementary_divisors(const IntMatrix& a);

struct Completion {
  IntMatrix complement;          // (r - s) x r
  std::vector<Integer> divisors; // elementary divisors of A
  bool saturated = false;        // all elementary divisors are 1
  bool pivot_based = false;      // complement made of unit vectors at HNF non-pivots
};

// For A (s x r) of full row rank, finds B with [A; B] unimodular whenever the
// row span of A is saturated. Prefers unit vectors at the non-pivot columns of
// the HNF of A (possible when all pivots are 1); otherwise falls back to the
// inverse of a unimodular column transform. When A is not saturated only
// `divisors` and `saturated` are meaningful.
Completion unimodular_completion(const IntMatrix& a);

}  // namespace arakelab
