#include "arakelab/roots.hpp"

#include <numeric>
#include <string>

#include "arakelab/errors.hpp"

namespace arakelab {

namespace {

struct Eval {
  Complex p;
  Complex dp;
  Real magnitude;  // sum |a_j| |z|^j, scale of the rounding error in p
};

Eval horner(std::span<const Complex> a, const Complex& z) {
  const std::size_t D = a.size() - 1;
  Eval e{a[D], Complex(Real(0L)), a[D].abs()};
  const Real zabs = z.abs();
  for (std::size_t i = D; i-- > 0;) {
    e.dp = e.dp * z + e.p;
    e.p = e.p * z + a[i];
    e.magnitude = e.magnitude * zabs + a[i].abs();
  }
  return e;
}

// Fujiwara's bound: every zero satisfies |z| <= 2 max |a_i / a_D|^{1/(D-i)}.
Real root_bound(std::span<const Complex> a) {
  const std::size_t D = a.size() - 1;
  const Real lead = a[D].abs();
  Real best(0L);
  for (std::size_t i = 0; i < D; ++i) {
    const Real r = a[i].abs() / lead;
    if (r.is_zero()) continue;
    const Real root = exp(log(r) / Real(static_cast<long>(D - i)));
    best = max(best, root);
  }
  return Real(2L) * best;
}

std::size_t find(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

RootInclusion isolate_roots(std::span<const Complex> coeffs) {
  if (coeffs.empty() || coeffs.back().is_zero()) {
    throw InvalidArgument("isolate_roots: leading coefficient must be nonzero");
  }
  const std::size_t D = coeffs.size() - 1;
  const long prec = working_precision();
  RootInclusion out;
  if (D == 0) return out;

  if (D == 1) {
    Complex z = Complex(-coeffs[0].re, -coeffs[0].im) / coeffs[1];
    out.centers.push_back(z);
  } else {
    Real radius = root_bound(coeffs) / Real(2L);
    if (radius.is_zero()) radius = ulp_scale(prec / 2);
    const Real two_pi = Real(2L) * Real::pi();
    for (std::size_t i = 0; i < D; ++i) {
      // Offset angle avoids symmetric starting configurations.
      const Real angle = two_pi * Real(static_cast<long>(i)) / Real(static_cast<long>(D)) + Real(0.4);
      out.centers.push_back(Complex::polar_unit(angle) * radius);
    }
    const Real stop = ulp_scale(prec - 6);
    const long max_iter = 60 + 2 * prec;
    for (long it = 0; it < max_iter; ++it) {
      Real worst(0L);
      for (std::size_t i = 0; i < D; ++i) {
        Complex& zi = out.centers[i];
        const Eval e = horner(coeffs, zi);
        if (e.p.is_zero()) continue;
        if (e.dp.is_zero()) {
          zi += Complex(ulp_scale(prec / 4), ulp_scale(prec / 3));
          worst = Real(1L);
          continue;
        }
        const Complex ratio = e.p / e.dp;
        Complex s(Real(0L));
        for (std::size_t j = 0; j < D; ++j) {
          if (j == i) continue;
          const Complex diff = zi - out.centers[j];
          if (diff.is_zero()) continue;
          s += Complex(Real(1L)) / diff;
        }
        const Complex denom = Complex(Real(1L)) - ratio * s;
        const Complex w = denom.is_zero() ? ratio : ratio / denom;
        zi -= w;
        worst = max(worst, w.abs() / max(Real(1L), zi.abs()));
      }
      if (worst <= stop) break;
    }
  }

  // Inclusion radii D * |W_i| with W_i = p(z_i) / (a_D prod_{j != i} (z_i - z_j)),
  // where |p(z_i)| is inflated by its rounding error bound.
  const Real lead = coeffs[D].abs();
  const Real rounding = ulp_scale(prec - 2) * Real(static_cast<long>(2 * D + 2));
  for (std::size_t i = 0; i < D; ++i) {
    const Eval e = horner(coeffs, out.centers[i]);
    Real pz = e.p.abs() + rounding * e.magnitude;
    Real prod = lead;
    for (std::size_t j = 0; j < D; ++j) {
      if (j != i) prod *= (out.centers[i] - out.centers[j]).abs();
    }
    if (prod.is_zero()) {
      out.radii.push_back(Real(1L) / Real(0L));
    } else {
      out.radii.push_back(Real(static_cast<long>(D)) * pz / prod);
    }
  }
  return out;
}

JensenValue jensen_mean_log(std::span<const Complex> coeffs, const Real& tolerance) {
  const RootInclusion inc = isolate_roots(coeffs);
  const std::size_t D = inc.centers.size();
  JensenValue out{log(coeffs.back().abs()), Real(0L)};
  for (const Complex& z : inc.centers) {
    const Real r = z.abs();
    if (r > Real(1L)) out.value += log(r);
  }

  // Group overlapping disks; every zero lies within the component's total
  // diameter of its paired center, and log+ |.| is 1-Lipschitz.
  std::vector<std::size_t> parent(D);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = i + 1; j < D; ++j) {
      if ((inc.centers[i] - inc.centers[j]).abs() <= inc.radii[i] + inc.radii[j]) {
        parent[find(parent, i)] = find(parent, j);
      }
    }
  }
  std::vector<Real> diameter(D, Real(0L));
  std::vector<long> members(D, 0);
  for (std::size_t i = 0; i < D; ++i) {
    const std::size_t r = find(parent, i);
    diameter[r] += Real(2L) * inc.radii[i];
    ++members[r];
  }
  for (std::size_t i = 0; i < D; ++i) {
    if (members[i] > 0) out.error += Real(members[i]) * diameter[i];
  }
  if (!out.error.is_finite() || out.error > tolerance) {
    throw PrecisionFailure("root isolation failed at " + std::to_string(working_precision()) +
                           " bits: Jensen error bound " + out.error.to_string(6) +
                           " exceeds tolerance " + tolerance.to_string(6));
  }
  return out;
}

}  // namespace arakelab
