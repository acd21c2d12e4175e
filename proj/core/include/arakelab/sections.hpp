#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arakelab/lattice.hpp"
#include "arakelab/matrix.hpp"
#include "arakelab/poly.hpp"
#include "arakelab/real.hpp"

namespace arakelab {

struct MetricSpec {
  enum class Kind { Canonical, Lp, FubiniStudy };
  Kind kind = Kind::Canonical;
  int p = 0;  // only for Lp, p >= 1

  static MetricSpec canonical() { return {}; }
  static MetricSpec lp(int p);
  static MetricSpec fubini_study() { return {Kind::FubiniStudy, 0}; }

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct MeasureSpec {
  enum class Kind { TorusHaar, FubiniStudyVolume };
  Kind kind = Kind::TorusHaar;

  static MeasureSpec torus_haar() { return {}; }
  static MeasureSpec fubini_study_volume() { return {Kind::FubiniStudyVolume}; }

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

std::string to_string(const MetricSpec& m);
std::string to_string(const MeasureSpec& m);

// Degree-k sections of O(k) on P^N with a supported (metric, measure) pair:
// (canonical, torus), (lp, torus) or (Fubini-Study, Fubini-Study volume).
class SectionSpace {
 public:
  SectionSpace(int N, int k, MetricSpec metric = MetricSpec::canonical(),
               MeasureSpec measure = MeasureSpec::torus_haar());

  int N() const noexcept { return N_; }
  int k() const noexcept { return k_; }
  const MetricSpec& metric() const noexcept { return metric_; }
  const MeasureSpec& measure() const noexcept { return measure_; }
  const std::vector<ExponentIndex>& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.size(); }

  // Same metric and measure in another degree.
  SectionSpace with_degree(int k) const { return SectionSpace(N_, k, metric_, measure_); }

 private:
  int N_;
  int k_;
  MetricSpec metric_;
  MeasureSpec measure_;
  std::vector<ExponentIndex> basis_;
};

// The lp monomial norm^2 (N+1)^(-2k/p): exact when it is rational.
struct LpScale {
  std::optional<Rational> exact;
  Real value;
};
LpScale lp_scale(int N, int k, int p);

// <x^a, x^a>; the monomials are pairwise orthogonal for every supported pair.
Real monomial_weight(const SectionSpace& S, const ExponentIndex& a);

// Diagonal monomial gram. Throws UnsupportedMetric when an lp scale is
// irrational and therefore has no exact rational gram.
EuclideanLattice monomial_gram(const SectionSpace& S);

struct MultiplicationMatrix {
  HomogeneousPolynomial f;
  int k = 0;
  IntMatrix entries;  // rows: degree k-d monomials mu; columns: degree k monomials nu; b_{nu - mu}
};

MultiplicationMatrix build_Ck(const HomogeneousPolynomial& f, int k);

struct CkRankKernel {
  std::size_t rank = 0;
  std::size_t kernel_dim = 0;
  IntMatrix kernel_basis;  // primitive integer rows spanning {a : C a = 0}
};

// Throws RankDeficient if the rank differs from C(k-d+N, N).
CkRankKernel ck_rank_kernel(const MultiplicationMatrix& C);

// #{a in {-1,0,1}^cols : C a = 0}, including a = 0. Throws CapExceeded after
// `cap` search nodes with the solutions found so far as lower bound.
Integer ternary_kernel_count(const MultiplicationMatrix& C, std::size_t cap);

// Canonical gram of {f x^mu : |mu| = k - d}: entry (mu, mu') is the
// autocorrelation coefficient at the affine offset mu - mu'. Leading blocks
// are the grams of smaller k.
IntMatrix fsub_gram_matrix(const HomogeneousPolynomial& f, int k);

// Gram of f * H^0(O(k - d)) inside S (degree k).
EuclideanLattice fsub_gram(const HomogeneousPolynomial& f, int k, const SectionSpace& S);

// H^0(O(k)) / f H^0(O(k - d)) with the quotient norm; throws NotSaturated
// if the rows of C_k were not saturated.
EuclideanLattice hypersurface_quotient(const HomogeneousPolynomial& f, int k, const SectionSpace& S);

// max ||s(x)||_{k phi} over grid^N seeded sample points, minus a rounding
// allowance, so a certified lower bound of the sup norm. s lists coefficients
// in S.basis() order.
Real sup_norm_lower_bound(const std::vector<Integer>& s, const SectionSpace& S, long grid,
                          std::uint64_t seed);

// Upper bound on (sup - sup_norm_lower_bound) for the torus metrics, from a
// Lipschitz estimate of the section on a grid of the given size. Throws
// UnsupportedMetric for Fubini-Study.
Real sup_grid_gap(const std::vector<Integer>& s, const SectionSpace& S, long grid);

// L^2 norm (sum_a s_a^2 <x^a, x^a>)^(1/2).
Real section_l2_norm(const std::vector<Integer>& s, const SectionSpace& S);

}  // namespace arakelab
