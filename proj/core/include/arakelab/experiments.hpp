#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arakelab/lattice.hpp"
#include "arakelab/poly.hpp"
#include "arakelab/real.hpp"
#include "arakelab/torus.hpp"

namespace arakelab {

struct KRange {
  long kmin = 1;
  long kmax = 1;
  long kstep = 1;

  std::vector<long> values() const;  // validates kmin <= kmax, kstep >= 1
};

struct ConvergencePoint {
  long k = 0;
  Real value;
  Real err;                         // absolute error bound on value
  std::optional<Real> target;       // overrides the report target for this row
  std::optional<double> runtime_ms;
  std::map<std::string, std::string> extra;  // JSON only
};

struct ReportTarget {
  std::string name;
  Real value;
  std::string provenance;  // "quadrature", "closed-form", "bound", ...
};

struct ConvergenceReport {
  std::string label;
  std::string normalization;
  std::vector<ConvergencePoint> points;  // sorted by k
  Real target;
  std::string target_provenance;
  std::vector<ReportTarget> alternative_targets;
  std::optional<Real> extrapolated;  // two-point Richardson, advisory
  bool trend_only = false;
  std::vector<std::string> notes;
  std::map<std::string, std::string> metadata;
};

// "k,value,target,err,runtime_ms" with 17 significant digits; runtime_ms is
// "NA" unless include_timings, so that reruns are byte-identical.
std::string report_to_csv(const ConvergenceReport& r, bool include_timings = false);
// {"schema": 1, ...}; every real is a decimal string of at least 30 digits.
std::string report_to_json(const ConvergenceReport& r, bool include_timings = false);

std::string quadrature_to_csv(const QuadratureResult& q);
std::string quadrature_to_json(const QuadratureResult& q, const HomogeneousPolynomial& f);

// Decimal string with max(30, round-trip) significant digits.
std::string json_real(const Real& x);

// T from s = T + C log(k)/k through the last two points.
std::optional<Real> richardson_log_over_k(const std::vector<ConvergencePoint>& points);

struct ExperimentOptions {
  long precision_bits = kDefaultPrecisionBits;
  std::uint64_t seed = 0;
  std::size_t cap = 10'000'000;
  unsigned threads = 1;
  long quadrature_grid = 0;  // 0: default per dimension
};

enum class SzegoMode { Auto, Exact, Float };

// s_k = log det fsub_gram(f, k + d) / C(k+N, N), the Gram over affine
// exponents of total degree <= k. All points come from one factorization of
// the largest Gram, whose leading blocks are the smaller ones.
ConvergenceReport szego_experiment(const HomogeneousPolynomial& f, const KRange& ks, SzegoMode mode,
                                   const ExperimentOptions& opts = {});

// Size up to which SzegoMode::Auto uses exact determinants.
inline constexpr std::size_t kSzegoExactLimit = 256;

struct VolumeReports {
  ConvergenceReport degree;
  ConvergenceReport h0;
  ConvergenceReport h1;
};

// (N!/k^N) deg, h0, h1 of the canonical hypersurface quotient.
VolumeReports volume_experiment(const HomogeneousPolynomial& f, const KRange& ks,
                                const ExperimentOptions& opts = {});

struct H1LemmaReport {
  ConvergenceReport report;  // (N!/k^N) h1
  bool bounds_hold = true;   // h1 <= log ternary count <= log 3 * dim ker C_k everywhere
};

H1LemmaReport h1_lemma_experiment(const HomogeneousPolynomial& f, const KRange& ks,
                                  const ExperimentOptions& opts = {});

// (1/k^N) (chi_euclid(C(k+N,N)) - chi_euclid(C(k-d+N,N))).
ConvergenceReport stirling_experiment(int N, int d, const KRange& ks, const ExperimentOptions& opts = {});

struct MetricFamilyReport {
  ConvergenceReport report;        // rows indexed by p
  bool proportionality_holds = true;  // over every p with a rational scale
};

MetricFamilyReport metric_family_experiment(const HomogeneousPolynomial& f, int k, const std::vector<int>& p_list,
                                            const ExperimentOptions& opts = {});

// (N!/k^N) (h0 - deg - h1) of the canonical quotient.
ConvergenceReport rr_discrepancy_experiment(const HomogeneousPolynomial& f, const KRange& ks,
                                            const ExperimentOptions& opts = {});

// N! / k^N.
Real volume_normalization(int N, long k);

}  // namespace arakelab
