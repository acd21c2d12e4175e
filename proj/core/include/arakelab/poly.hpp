#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arakelab/matrix.hpp"

namespace arakelab {

// Exponent vector a = (a_0, ..., a_N) of the monomial x^a.
class ExponentIndex {
 public:
  ExponentIndex() = default;
  explicit ExponentIndex(std::vector<int> a);

  std::size_t size() const noexcept { return a_.size(); }
  int total() const noexcept { return total_; }
  int operator[](std::size_t i) const { return a_[i]; }
  const std::vector<int>& exponents() const noexcept { return a_; }

  friend ExponentIndex operator+(const ExponentIndex& x, const ExponentIndex& y);
  friend bool operator==(const ExponentIndex& x, const ExponentIndex& y) = default;

 private:
  std::vector<int> a_;
  int total_ = 0;
};

// Graded-lexicographic order with x0 heaviest: lower total degree first, then
// larger a0 first, then larger a1, and so on. For N = 1, k = 2 this yields
// x0^2, x0*x1, x1^2.
struct GradedLexBefore {
  bool operator()(const ExponentIndex& x, const ExponentIndex& y) const;
};

// All of N^{N+1}_k (exponents of N+1 variables summing to k) in graded-lex order.
std::vector<ExponentIndex> enumerate_exponents(int N, int k);

// Position of `a` in enumerate_exponents(a.size() - 1, a.total()).
std::size_t graded_lex_rank(const ExponentIndex& a);

// C(n, k) as an exact integer; zero when k < 0 or k > n.
Integer binomial(long n, long k);

// Number of monomials of degree k in N+1 variables, C(k+N, N).
std::size_t monomial_count(int N, int k);

/// Nonzero homogeneous form with integer coefficients in nvars = N+1 variables.
class HomogeneousPolynomial {
 public:
  using Terms = std::map<ExponentIndex, Integer, GradedLexBefore>;

  // Sums duplicate exponents and drops zero coefficients. Throws
  // InvalidArgument for an empty/zero result, mixed degrees, or a wrong
  // exponent length.
  HomogeneousPolynomial(int nvars, const std::vector<std::pair<std::vector<int>, Integer>>& terms);

  static HomogeneousPolynomial monomial(const ExponentIndex& a, Integer coef = 1);

  int nvars() const noexcept { return nvars_; }
  int N() const noexcept { return nvars_ - 1; }
  int degree() const noexcept { return degree_; }
  const Terms& terms() const noexcept { return terms_; }

  // b_m, zero when m is not in the support.
  Integer coefficient(const ExponentIndex& m) const;

  friend bool operator==(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g) {
    return f.nvars_ == g.nvars_ && f.terms_ == g.terms_;
  }

 private:
  HomogeneousPolynomial(int nvars, int degree, Terms terms);
  friend HomogeneousPolynomial poly_mul(const HomogeneousPolynomial&, const HomogeneousPolynomial&);

  int nvars_ = 0;
  int degree_ = 0;
  Terms terms_;
};

HomogeneousPolynomial poly_mul(const HomogeneousPolynomial& f, const HomogeneousPolynomial& g);

// Multiplies every coefficient by `lambda` (nonzero).
HomogeneousPolynomial scale(const HomogeneousPolynomial& f, const Integer& lambda);

/// f(1, z_1, ..., z_N): exponent vectors over the N affine variables.
struct DehomogenizedPolynomial {
  int nvars = 0;   // N
  int degree = 0;  // homogeneous degree d of the source form
  std::map<std::vector<int>, Integer> coeffs;
};

DehomogenizedPolynomial dehomogenize(const HomogeneousPolynomial& f);

// Inverse of dehomogenize for a target degree d >= every affine total degree.
HomogeneousPolynomial rehomogenize(const DehomogenizedPolynomial& g, int d);

// Parses e.g. "x0 + 3*x1^2*x2" in N+1 variables x0..xN.
HomogeneousPolynomial parse_poly(std::string_view text, int N);

// Like parse_poly with N inferred as the largest variable index used.
HomogeneousPolynomial parse_poly(std::string_view text);

std::string to_string(const HomogeneousPolynomial& f);

// {"nvars": N+1, "terms": [{"exp": [...], "coef": "decimal"}]}
std::string poly_to_json(const HomogeneousPolynomial& f);
HomogeneousPolynomial poly_from_json(std::string_view json_text);

}  // namespace arakelab
