#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arakelab/matrix.hpp"
#include "arakelab/poly.hpp"
#include "arakelab/real.hpp"

namespace arakelab {

/// Fourier coefficients c_nu = integral over S of |f|^2 z^{-nu} d(mu_inf) of the
/// dehomogenized form, i.e. the symbol of the multilevel Toeplitz matrices
/// built from f. Only nonzero entries are stored.
struct AutocorrelationTable {
  int N = 0;
  std::map<std::vector<int>, Integer> entries;

  Integer at(const std::vector<int>& nu) const;
  Integer c0() const { return at(std::vector<int>(static_cast<std::size_t>(N), 0)); }
};

// c_nu = sum_m b_m b_{m+nu}, exact.
AutocorrelationTable autocorrelation(const HomogeneousPolynomial& f);

enum class QuadratureMethod { Grid, JensenGrid };

std::string to_string(QuadratureMethod m);

struct QuadratureResult {
  Real value;
  Real est_error;
  long grid = 1;  // nodes per outer axis (1 when no outer grid is needed)
  QuadratureMethod method = QuadratureMethod::JensenGrid;
  std::uint64_t seed = 0;
  long precision_bits = kDefaultPrecisionBits;
  int inner_variable = 0;  // 1-based affine variable integrated by Jensen's formula; 0 if none
};

struct QuadratureOptions {
  long precision_bits = kDefaultPrecisionBits;
  long grid = 0;  // outer nodes per axis; 0 picks a default by dimension
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Default outer-grid size per axis for N affine variables.
long default_outer_grid(int N);

/// L(f) = integral over S of log|f|^2 d(mu_inf) = 2 m(f).
///
/// The affine variable of largest degree is integrated exactly via Jensen's
/// formula (certified root inclusion); the remaining N-1 variables use a
/// trapezoidal grid with a seeded random phase offset. est_error combines the
/// difference to the nested half-resolution grid, the worst root-inclusion
/// bound and a working-precision rounding floor.
QuadratureResult height_target(const HomogeneousPolynomial& f, const QuadratureOptions& opts = {});
QuadratureResult height_target(const HomogeneousPolynomial& f, long precision_bits);

// |trapezoidal integral of |f|^2 over S - c_0|. The grid is exact for
// trigonometric polynomials of the relevant degree, so only rounding remains.
Real quadrature_selfcheck(const HomogeneousPolynomial& f, const QuadratureOptions& opts = {});

// Plain N-dimensional trapezoidal rule for L(f) in double precision with a
// seeded phase offset. Independent of the Jensen path; used as a cross-check.
QuadratureResult raw_grid_height(const HomogeneousPolynomial& f, long grid, std::uint64_t seed);

// Uniform [0,1) offsets from a mt19937_64 stream; identical on every platform.
std::vector<double> phase_offsets(std::uint64_t seed, std::size_t count);

}  // namespace arakelab
