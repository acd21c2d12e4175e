#include "arakelab/exact_linalg.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "arakelab/errors.hpp"

namespace arakelab {

namespace {

struct Gcdext {
  Integer g, x, y;  // g = x a + y b, g >= 0
};

Gcdext gcdext(const Integer& a, const Integer& b) {
  Gcdext r;
  mpz_gcdext(r.g.get_mpz_t(), r.x.get_mpz_t(), r.y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

void swap_rows(IntMatrix& m, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(i, c), m(j, c));
}

// rows (p, q) <- (x p + y q, u p + v q)
void combine_rows(IntMatrix& m, std::size_t p, std::size_t q, const Integer& x, const Integer& y,
                  const Integer& u, const Integer& v) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (m(p, c) == 0 && m(q, c) == 0) continue;
    Integer np = x * m(p, c) + y * m(q, c);
    Integer nq = u * m(p, c) + v * m(q, c);
    m(p, c) = std::move(np);
    m(q, c) = std::move(nq);
  }
}

void combine_cols(IntMatrix& m, std::size_t p, std::size_t q, const Integer& x, const Integer& y,
                  const Integer& u, const Integer& v) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m(r, p) == 0 && m(r, q) == 0) continue;
    Integer np = x * m(r, p) + y * m(r, q);
    Integer nq = u * m(r, p) + v * m(r, q);
    m(r, p) = std::move(np);
    m(r, q) = std::move(nq);
  }
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

std::vector<Integer> bareiss_leading_minors(IntMatrix m, const std::function<void(std::size_t)>& on_minor) {
  if (!m.square()) throw InvalidArgument("bareiss: matrix must be square");
  const std::size_t n = m.rows();
  std::vector<Integer> minors;
  minors.reserve(n);
  if (n == 0) return minors;
  Integer prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const Integer pivot = m(k, k);
    if (pivot == 0) {
      throw NotPositiveDefinite("leading principal minor " + std::to_string(k + 1) + " vanishes");
    }
    minors.push_back(pivot);
    if (on_minor) on_minor(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Integer& mik = m(i, k);
      const bool eliminate = mik != 0;
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer& mij = m(i, j);
        if (!eliminate) {
          if (mij != 0 && pivot != prev) {
            mij *= pivot;
            mpz_divexact(mij.get_mpz_t(), mij.get_mpz_t(), prev.get_mpz_t());
          }
          continue;
        }
        const Integer& mkj = m(k, j);
        if (mij == 0 && mkj == 0) continue;
        Integer v = pivot * mij - mik * mkj;
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        mij = std::move(v);
      }
      m(i, k) = 0;
    }
    prev = pivot;
  }
  return minors;
}

Integer bareiss_determinant(IntMatrix m) {
  if (!m.square()) throw InvalidArgument("determinant: matrix must be square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      swap_rows(m, k, p);
      sign = -sign;
    }
    const Integer pivot = m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Integer mik = m(i, k);
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = pivot * m(i, j) - mik * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = std::move(v);
      }
      m(i, k) = 0;
    }
    prev = pivot;
  }
  return sign * m(n - 1, n - 1);
}

Integer common_denominator(const RatMatrix& m) {
  Integer d = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), m(i, j).get_den_mpz_t());
  return d;
}

Rational determinant(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("determinant: matrix must be square");
  const Integer d = common_denominator(m);
  IntMatrix im(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rational v = m(i, j) * d;
      im(i, j) = v.get_num();
    }
  Integer dn;
  mpz_pow_ui(dn.get_mpz_t(), d.get_mpz_t(), m.rows());
  Rational r(bareiss_determinant(std::move(im)), dn);
  r.canonicalize();
  return r;
}

bool is_symmetric(const RatMatrix& m) {
  if (!m.square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

ExactLDLT ldlt_exact(const RatMatrix& gram) {
  if (!is_symmetric(gram)) throw NotPositiveDefinite("gram matrix is not symmetric");
  const std::size_t n = gram.rows();
  ExactLDLT f{RatMatrix(n, n, Rational(0)), std::vector<Rational>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    Rational dj = gram(j, j);
    for (std::size_t l = 0; l < j; ++l) {
      if (f.L(j, l) != 0) dj -= f.L(j, l) * f.L(j, l) * f.D[l];
    }
    if (dj <= 0) {
      throw NotPositiveDefinite("gram matrix is not positive definite (pivot " + std::to_string(j) +
                                " = " + dj.get_str() + ")");
    }
    f.D[j] = dj;
    f.L(j, j) = 1;
    for (std::size_t i = j + 1; i < n; ++i) {
      Rational v = gram(i, j);
      for (std::size_t l = 0; l < j; ++l) {
        if (f.L(i, l) != 0 && f.L(j, l) != 0) v -= f.L(i, l) * f.L(j, l) * f.D[l];
      }
      if (v != 0) f.L(i, j) = v / dj;
    }
  }
  return f;
}

RatMatrix inverse(const RatMatrix& m) {
  if (!m.square()) throw InvalidArgument("inverse: matrix must be square");
  const std::size_t n = m.rows();
  RatMatrix a = m;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw RankDeficient("inverse: matrix is singular");
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    }
    const Rational piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      if (a(c, j) != 0) a(c, j) /= piv;
      if (inv(c, j) != 0) inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational factor = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (a(c, j) != 0) a(i, j) -= factor * a(c, j);
        if (inv(c, j) != 0) inv(i, j) -= factor * inv(c, j);
      }
    }
  }
  return inv;
}

RankKernel rank_kernel(const IntMatrix& input) {
  IntMatrix m = input;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  RankKernel out;
  Integer prev = 1;
  std::size_t r = 0;
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    swap_rows(m, r, p);
    const Integer pivot = m(r, c);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const Integer mic = m(i, c);
      for (std::size_t j = c + 1; j < cols; ++j) {
        if (mic == 0 && m(i, j) == 0) continue;
        Integer v = pivot * m(i, j) - mic * m(r, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = std::move(v);
      }
      m(i, c) = 0;
    }
    // Rows above r keep their values; Bareiss scaling applies to the trailing block.
    prev = pivot;
    out.pivot_columns.push_back(c);
    is_pivot[c] = true;
    ++r;
  }
  out.rank = r;

  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  out.kernel_basis = IntMatrix(free_cols.size(), cols, Integer(0));
  for (std::size_t fi = 0; fi < free_cols.size(); ++fi) {
    std::vector<Rational> a(cols, Rational(0));
    a[free_cols[fi]] = 1;
    for (std::size_t t = r; t-- > 0;) {
      const std::size_t pc = out.pivot_columns[t];
      Rational s = 0;
      for (std::size_t j = pc + 1; j < cols; ++j)
        if (m(t, j) != 0 && a[j] != 0) s += Rational(m(t, j)) * a[j];
      a[pc] = -s / Rational(m(t, pc));
    }
    Integer den = 1;
    for (const auto& v : a) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
    Integer g = 0;
    std::vector<Integer> iv(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      const Rational scaled = a[j] * den;
      iv[j] = scaled.get_num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), iv[j].get_mpz_t());
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (g > 1) mpz_divexact(iv[j].get_mpz_t(), iv[j].get_mpz_t(), g.get_mpz_t());
      out.kernel_basis(fi, j) = iv[j];
    }
  }
  return out;
}

HermiteForm hermite_normal_form(const IntMatrix& a) {
  IntMatrix h = a;
  const std::size_t rows = h.rows();
  const std::size_t cols = h.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (h(i, c) == 0) continue;
      if (h(r, c) == 0) {
        swap_rows(h, r, i);
        continue;
      }
      const Integer x = h(r, c);
      const Integer y = h(i, c);
      const Gcdext e = gcdext(x, y);
      combine_rows(h, r, i, e.x, e.y, Integer(-y / e.g), Integer(x / e.g));
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      for (std::size_t j = 0; j < cols; ++j) h(r, j) = -h(r, j);
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (h(i, c) == 0) continue;
      const Integer q = floor_div(h(i, c), h(r, c));
      if (q == 0) continue;
      for (std::size_t j = c; j < cols; ++j) h(i, j) -= q * h(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  HermiteForm out{IntMatrix(r, cols), pivots};
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.H(i, j) = h(i, j);
  return out;
}

std::vector<Integer> elementary_divisors(const IntMatrix& a) {
  IntMatrix m = a;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<Integer> out;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (m(i, j) != 0 && (pi == rows || abs(m(i, j)) < abs(m(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) return out;
      swap_rows(m, t, pi);
      if (pj != t)
        for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, t), m(i, pj));
      const Integer p = m(t, t);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m(i, t) == 0) continue;
        const Integer q = floor_div(m(i, t), p);
        for (std::size_t j = t; j < cols; ++j) m(i, j) -= q * m(t, j);
        if (m(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m(t, j) == 0) continue;
        const Integer q = floor_div(m(t, j), p);
        for (std::size_t i = t; i < rows; ++i) m(i, j) -= q * m(i, t);
        if (m(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce p | every remaining entry.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (m(i, j) % p != 0) {
            for (std::size_t jj = t; jj < cols; ++jj) m(t, jj) += m(i, jj);
            divides = false;
            break;
          }
      if (divides) break;
    }
    out.push_back(abs(m(t, t)));
  }
  return out;
}

Completion unimodular_completion(const IntMatrix& a) {
  const std::size_t s = a.rows();
  const std::size_t r = a.cols();
  Completion out;
  const HermiteForm hnf = hermite_normal_form(a);
  if (hnf.pivots.size() != s) {
    throw RankDeficient("rows are linearly dependent: rank " + std::to_string(hnf.pivots.size()) +
                        " < " + std::to_string(s));
  }
  bool unit_pivots = true;
  for (std::size_t i = 0; i < s; ++i) unit_pivots = unit_pivots && hnf.H(i, hnf.pivots[i]) == 1;
  if (unit_pivots) {
    out.saturated = true;
    out.pivot_based = true;
    out.divisors.assign(s, Integer(1));
    out.complement = IntMatrix(r - s, r, Integer(0));
    std::vector<bool> is_pivot(r, false);
    for (std::size_t c : hnf.pivots) is_pivot[c] = true;
    std::size_t row = 0;
    for (std::size_t c = 0; c < r; ++c)
      if (!is_pivot[c]) out.complement(row++, c) = 1;
    return out;
  }

  out.divisors = elementary_divisors(a);
  out.saturated = std::all_of(out.divisors.begin(), out.divisors.end(), [](const Integer& d) { return d == 1; });
  if (!out.saturated) return out;

  // Column operations A V = [H 0] with V unimodular; track W = V^{-1}.
  IntMatrix m = a;
  IntMatrix w = IntMatrix::identity(r);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t q = i + 1; q < r; ++q) {
      if (m(i, q) == 0) continue;
      const Integer x = m(i, i);
      const Integer y = m(i, q);
      const Gcdext e = gcdext(x, y);
      const Integer xg = x / e.g;
      const Integer yg = y / e.g;
      combine_cols(m, i, q, e.x, e.y, Integer(-yg), xg);
      combine_rows(w, i, q, xg, yg, Integer(-e.y), e.x);
    }
  }
  out.complement = IntMatrix(r - s, r);
  for (std::size_t i = s; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) out.complement(i - s, j) = w(i, j);
  return out;
}

}  // namespace arakelab
