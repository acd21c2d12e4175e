#pragma once

#include <span>
#include <vector>

#include "arakelab/real.hpp"

namespace arakelab {

/// Approximate zeros of a univariate complex polynomial together with
/// inclusion disks: the union of the disks contains every zero, and each
/// connected component of m disks contains exactly m zeros (counted with
/// multiplicity).
struct RootInclusion {
  std::vector<Complex> centers;
  std::vector<Real> radii;
};

// coeffs[i] multiplies z^i; the leading coefficient must be nonzero.
// Aberth-Ehrlich iteration at the working precision, followed by
// Weierstrass-correction inclusion radii.
RootInclusion isolate_roots(std::span<const Complex> coeffs);

struct JensenValue {
  Real value;  // mean of log|p| over the unit circle
  Real error;  // certified bound on |value - exact|, excluding final rounding
};

// Jensen's formula: mean of log|p(e^{it})| = log|a_D| + sum log max(1, |root|).
// Throws PrecisionFailure when the inclusion disks are too wide to pin the
// result to the required tolerance.
JensenValue jensen_mean_log(std::span<const Complex> coeffs, const Real& tolerance);

}  // namespace arakelab
