#include "arakelab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "arakelab/errors.hpp"
#include "arakelab/parallel.hpp"
#include "arakelab/roots.hpp"

namespace arakelab {

Integer AutocorrelationTable::at(const std::vector<int>& nu) const {
  auto it = entries.find(nu);
  return it == entries.end() ? Integer(0) : it->second;
}

AutocorrelationTable autocorrelation(const HomogeneousPolynomial& f) {
  const DehomogenizedPolynomial g = dehomogenize(f);
  AutocorrelationTable t;
  t.N = g.nvars;
  for (const auto& [alpha, ba] : g.coeffs) {
    for (const auto& [beta, bb] : g.coeffs) {
      // c_nu = sum_beta b_{beta + nu} b_beta, so alpha = beta + nu.
      std::vector<int> nu(alpha.size());
      for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = alpha[i] - beta[i];
      t.entries[nu] += ba * bb;
    }
  }
  std::erase_if(t.entries, [](const auto& e) { return e.second == 0; });
  return t;
}

std::string to_string(QuadratureMethod m) {
  return m == QuadratureMethod::Grid ? "grid" : "jensen-grid";
}

long default_outer_grid(int N) {
  switch (N) {
    case 0:
    case 1:
      return 1;
    case 2:
      return 4096;
    case 3:
      return 256;
    case 4:
      return 32;
    default:
      return 8;
  }
}

std::vector<double> phase_offsets(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 gen(seed);
  std::vector<double> out(count);
  for (auto& o : out) o = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return out;
}

namespace {

// Decodes node index n into per-axis indices in base `grid` (axis 0 fastest).
void node_digits(std::size_t n, long grid, std::vector<long>& digits) {
  for (auto& d : digits) {
    d = static_cast<long>(n % static_cast<std::size_t>(grid));
    n /= static_cast<std::size_t>(grid);
  }
}

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// table[t][e] = exp(i * 2 pi (t + phase) / grid)^e for e <= max_power.
std::vector<std::vector<Complex>> unit_power_table(long grid, double phase, int max_power) {
  const Real two_pi = Real(2L) * Real::pi();
  std::vector<std::vector<Complex>> table(static_cast<std::size_t>(grid));
  for (long t = 0; t < grid; ++t) {
    const Real angle = two_pi * (Real(t) + Real(phase)) / Real(grid);
    const Complex z = Complex::polar_unit(angle);
    auto& row = table[static_cast<std::size_t>(t)];
    row.reserve(static_cast<std::size_t>(max_power) + 1);
    row.emplace_back(Real(1L), Real(0L));
    for (int e = 1; e <= max_power; ++e) row.push_back(row.back() * z);
  }
  return table;
}

Real rounding_floor(long prec, const Real& value) {
  return ulp_scale(prec - 20) * (Real(1L) + abs(value));
}

}  // namespace

QuadratureResult height_target(const HomogeneousPolynomial& f, long precision_bits) {
  QuadratureOptions opts;
  opts.precision_bits = precision_bits;
  return height_target(f, opts);
}

QuadratureResult height_target(const HomogeneousPolynomial& f, const QuadratureOptions& opts) {
  const long prec = opts.precision_bits;
  if (prec < 64) throw InvalidArgument("height_target: precision must be at least 64 bits");
  PrecisionGuard guard(prec);
  const DehomogenizedPolynomial g = dehomogenize(f);
  const int N = g.nvars;

  QuadratureResult res;
  res.seed = opts.seed;
  res.precision_bits = prec;
  res.method = QuadratureMethod::JensenGrid;

  if (N == 0) {
    const Real c(g.coeffs.begin()->second);
    res.value = log(c * c);
    res.est_error = rounding_floor(prec, res.value);
    return res;
  }

  // Innermost variable: the one of largest degree, ties broken towards the last.
  std::vector<int> deg(static_cast<std::size_t>(N), 0);
  for (const auto& [alpha, c] : g.coeffs)
    for (int i = 0; i < N; ++i) deg[static_cast<std::size_t>(i)] = std::max(deg[static_cast<std::size_t>(i)], alpha[static_cast<std::size_t>(i)]);
  int inner = N - 1;
  for (int i = N - 1; i >= 0; --i)
    if (deg[static_cast<std::size_t>(i)] > deg[static_cast<std::size_t>(inner)]) inner = i;
  res.inner_variable = inner + 1;

  // Coefficients of z_inner^e as polynomials in the outer variables.
  struct OuterTerm {
    std::vector<int> exps;
    Integer coef;
  };
  const int top = deg[static_cast<std::size_t>(inner)];
  std::vector<std::vector<OuterTerm>> by_power(static_cast<std::size_t>(top) + 1);
  for (const auto& [alpha, c] : g.coeffs) {
    std::vector<int> outer;
    for (int i = 0; i < N; ++i)
      if (i != inner) outer.push_back(alpha[static_cast<std::size_t>(i)]);
    by_power[static_cast<std::size_t>(alpha[static_cast<std::size_t>(inner)])].push_back({std::move(outer), c});
  }
  // z_inner^low divides f; it has modulus one on S.
  std::size_t low = 0;
  while (by_power[low].empty()) ++low;

  const Real tolerance = ulp_scale(prec / 4);
  const int outer_dims = N - 1;
  const long grid = outer_dims == 0 ? 1 : (opts.grid > 0 ? opts.grid : default_outer_grid(N));
  if (outer_dims > 0 && (grid < 2 || grid % 2 != 0)) {
    throw InvalidArgument("height_target: outer grid must be even and >= 2");
  }
  res.grid = grid;

  const auto offsets = phase_offsets(opts.seed, static_cast<std::size_t>(outer_dims));
  std::vector<std::vector<std::vector<Complex>>> tables;
  {
    int max_outer = 0;
    for (int i = 0; i < N; ++i)
      if (i != inner) max_outer = std::max(max_outer, deg[static_cast<std::size_t>(i)]);
    for (int j = 0; j < outer_dims; ++j) {
      tables.push_back(unit_power_table(grid, offsets[static_cast<std::size_t>(j)], max_outer));
    }
  }

  const std::size_t nodes = ipow(static_cast<std::size_t>(grid), static_cast<std::size_t>(outer_dims));
  std::vector<Real> node_value(nodes);
  std::vector<Real> node_error(nodes);

  parallel_for(nodes, opts.threads, [&](std::size_t n) {
    PrecisionGuard local(prec);
    std::vector<long> idx(static_cast<std::size_t>(outer_dims));
    node_digits(n, grid, idx);
    std::vector<Complex> coeffs;
    for (std::size_t e = low; e < by_power.size(); ++e) {
      Complex a(Real(0L), Real(0L));
      for (const auto& term : by_power[e]) {
        Complex m(Real(term.coef), Real(0L));
        for (int j = 0; j < outer_dims; ++j) {
          const auto uj = static_cast<std::size_t>(j);
          m *= tables[uj][static_cast<std::size_t>(idx[uj])][static_cast<std::size_t>(term.exps[uj])];
        }
        a += m;
      }
      coeffs.push_back(std::move(a));
    }
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    if (coeffs.empty()) {
      throw PrecisionFailure("f vanishes identically on an outer quadrature fiber; change --seed");
    }
    const JensenValue jv = jensen_mean_log(coeffs, tolerance);
    node_value[n] = jv.value;
    node_error[n] = jv.error;
  });

  // Fixed-order reduction: full grid, and the nested grid of all-even indices.
  Real sum_full(0L);
  Real sum_half(0L);
  Real worst(0L);
  std::vector<long> idx(static_cast<std::size_t>(outer_dims));
  for (std::size_t n = 0; n < nodes; ++n) {
    sum_full += node_value[n];
    worst = max(worst, node_error[n]);
    node_digits(n, grid, idx);
    if (std::all_of(idx.begin(), idx.end(), [](long d) { return d % 2 == 0; })) sum_half += node_value[n];
  }
  const Real q_full = sum_full / Real(static_cast<long>(nodes));
  res.value = Real(2L) * q_full;
  Real discretization(0L);
  if (outer_dims > 0) {
    const Real q_half = sum_half / Real(static_cast<long>(nodes / ipow(2, static_cast<std::size_t>(outer_dims))));
    discretization = abs(q_full - q_half);
  }
  res.est_error = Real(2L) * (discretization + worst) + rounding_floor(prec, res.value);
  return res;
}

Real quadrature_selfcheck(const HomogeneousPolynomial& f, const QuadratureOptions& opts) {
  PrecisionGuard guard(opts.precision_bits);
  const DehomogenizedPolynomial g = dehomogenize(f);
  const int N = g.nvars;
  const AutocorrelationTable table = autocorrelation(f);
  const Real c0(table.c0());
  if (N == 0) {
    const Real c(g.coeffs.begin()->second);
    return abs(c * c - c0);
  }
  // Exact for |f|^2 once grid > degree in each variable.
  long grid = N <= 2 ? 256 : 8;
  while (grid <= 2L * g.degree) grid *= 2;
  const auto offsets = phase_offsets(opts.seed, static_cast<std::size_t>(N));
  std::vector<std::vector<std::vector<Complex>>> tables;
  for (int j = 0; j < N; ++j) tables.push_back(unit_power_table(grid, offsets[static_cast<std::size_t>(j)], g.degree));

  const std::size_t nodes = ipow(static_cast<std::size_t>(grid), static_cast<std::size_t>(N));
  std::vector<Real> values(nodes);
  const long prec = opts.precision_bits;
  parallel_for(nodes, opts.threads, [&](std::size_t n) {
    PrecisionGuard local(prec);
    std::vector<long> idx(static_cast<std::size_t>(N));
    node_digits(n, grid, idx);
    Complex v(Real(0L), Real(0L));
    for (const auto& [alpha, c] : g.coeffs) {
      Complex m(Real(c), Real(0L));
      for (int j = 0; j < N; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        m *= tables[uj][static_cast<std::size_t>(idx[uj])][static_cast<std::size_t>(alpha[uj])];
      }
      v += m;
    }
    values[n] = v.norm2();
  });
  Real sum(0L);
  for (const Real& v : values) sum += v;
  return abs(sum / Real(static_cast<long>(nodes)) - c0);
}

QuadratureResult raw_grid_height(const HomogeneousPolynomial& f, long grid, std::uint64_t seed) {
  if (grid < 2 || grid % 2 != 0) throw InvalidArgument("raw_grid_height: grid must be even and >= 2");
  const DehomogenizedPolynomial g = dehomogenize(f);
  const int N = g.nvars;
  QuadratureResult res;
  res.method = QuadratureMethod::Grid;
  res.seed = seed;
  res.precision_bits = 53;
  if (N == 0) {
    const double c = g.coeffs.begin()->second.get_d();
    res.value = Real(std::log(c * c));
    res.est_error = Real(0L);
    return res;
  }
  res.grid = grid;
  const auto offsets = phase_offsets(seed, static_cast<std::size_t>(N));
  const double two_pi = 2.0 * std::acos(-1.0);
  // pw[j][t][e] = z_j(t)^e
  std::vector<std::vector<std::vector<std::complex<double>>>> pw(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    auto& axis = pw[static_cast<std::size_t>(j)];
    axis.resize(static_cast<std::size_t>(grid));
    for (long t = 0; t < grid; ++t) {
      const double th = two_pi * (static_cast<double>(t) + offsets[static_cast<std::size_t>(j)]) / static_cast<double>(grid);
      const std::complex<double> z = std::polar(1.0, th);
      auto& row = axis[static_cast<std::size_t>(t)];
      row.push_back(1.0);
      for (int e = 1; e <= g.degree; ++e) row.push_back(row.back() * z);
    }
  }
  std::vector<std::pair<std::vector<int>, double>> terms;
  for (const auto& [alpha, c] : g.coeffs) terms.emplace_back(alpha, c.get_d());

  const std::size_t nodes = ipow(static_cast<std::size_t>(grid), static_cast<std::size_t>(N));
  double sum_full = 0.0;
  double sum_half = 0.0;
  std::vector<long> idx(static_cast<std::size_t>(N));
  for (std::size_t n = 0; n < nodes; ++n) {
    node_digits(n, grid, idx);
    std::complex<double> v = 0.0;
    for (const auto& [alpha, c] : terms) {
      std::complex<double> m = c;
      for (int j = 0; j < N; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        m *= pw[uj][static_cast<std::size_t>(idx[uj])][static_cast<std::size_t>(alpha[uj])];
      }
      v += m;
    }
    const double lv = std::log(std::norm(v));
    sum_full += lv;
    if (std::all_of(idx.begin(), idx.end(), [](long d) { return d % 2 == 0; })) sum_half += lv;
  }
  const double q_full = sum_full / static_cast<double>(nodes);
  const double q_half = sum_half / static_cast<double>(nodes / ipow(2, static_cast<std::size_t>(N)));
  res.value = Real(q_full);
  res.est_error = Real(std::abs(q_full - q_half));
  return res;
}

}  // namespace arakelab
