#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace arakelab {

inline constexpr long kDefaultPrecisionBits = 128;

// Precision (in bits) used for newly constructed Reals on the calling thread.
long working_precision() noexcept;

// Sets the calling thread's working precision for the guard's lifetime.
// Worker threads start at kDefaultPrecisionBits and must install their own.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(long bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  long saved_;
};

/// Arbitrary-precision binary floating-point number (MPFR, round-to-nearest).
///
/// A freshly constructed value takes the thread's working precision; the
/// result of a binary operation takes the larger precision of its operands.
class Real {
 public:
  Real();
  Real(long v);  // NOLINT(google-explicit-constructor)
  Real(int v) : Real(static_cast<long>(v)) {}  // NOLINT
  explicit Real(double v);
  explicit Real(const mpz_class& v);
  explicit Real(const mpq_class& v);
  explicit Real(std::string_view decimal);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  static Real with_precision(long bits);
  static Real pi();
  static Real nan();

  long precision() const noexcept { return static_cast<long>(mpfr_get_prec(v_)); }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long exponent2() const noexcept;  // e with 0.5 <= |x| / 2^e < 1; 0 for zero

  // Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits) const;
  // Enough digits to round-trip the value at its precision.
  std::string to_string() const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  Real operator-() const;

  friend bool operator==(const Real& a, const Real& b) noexcept {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept;

  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get() noexcept { return v_; }

 private:
  struct Uninit {};
  Real(Uninit, long bits);
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real lgamma(const Real& x);  // log |Gamma(x)|
Real pow(const Real& x, const Real& y);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real ldexp(const Real& x, long e);  // x * 2^e, exact

// 2^-bits at the working precision.
Real ulp_scale(long bits);

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(Real r) : re(std::move(r)), im(0L) {}

  static Complex polar_unit(const Real& angle);  // e^{i angle}

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& s);

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& s) { return a *= s; }

  Real norm2() const;  // |z|^2
  Real abs() const;
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

}  // namespace arakelab
