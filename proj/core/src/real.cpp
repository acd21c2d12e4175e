#include "arakelab/real.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace arakelab {

namespace {

thread_local long t_precision = kDefaultPrecisionBits;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

long max_prec(const Real& a, const Real& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

long working_precision() noexcept { return t_precision; }

PrecisionGuard::PrecisionGuard(long bits) : saved_(t_precision) {
  if (bits < MPFR_PREC_MIN || bits > 1L << 20) {
    throw std::invalid_argument("precision out of range: " + std::to_string(bits));
  }
  t_precision = bits;
}

PrecisionGuard::~PrecisionGuard() { t_precision = saved_; }

Real::Real(Uninit, long bits) { mpfr_init2(v_, bits); }

Real::Real() : Real(Uninit{}, t_precision) { mpfr_set_zero(v_, 1); }

Real::Real(long v) : Real(Uninit{}, t_precision) { mpfr_set_si(v_, v, kRnd); }

Real::Real(double v) : Real(Uninit{}, t_precision) { mpfr_set_d(v_, v, kRnd); }

Real::Real(const mpz_class& v) : Real(Uninit{}, t_precision) {
  mpfr_set_z(v_, v.get_mpz_t(), kRnd);
}

Real::Real(const mpq_class& v) : Real(Uninit{}, t_precision) {
  mpfr_set_q(v_, v.get_mpq_t(), kRnd);
}

Real::Real(std::string_view decimal) : Real(Uninit{}, t_precision) {
  std::string s(decimal);
  if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

Real::Real(const Real& other) : Real(Uninit{}, other.precision()) {
  mpfr_set(v_, other.v_, kRnd);
}

Real::Real(Real&& other) noexcept : Real(Uninit{}, MPFR_PREC_MIN) {
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (precision() != other.precision()) mpfr_set_prec(v_, other.precision());
    mpfr_set(v_, other.v_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_precision(long bits) {
  Real r(Uninit{}, bits);
  mpfr_set_zero(r.v_, 1);
  return r;
}

Real Real::pi() {
  Real r(Uninit{}, t_precision);
  mpfr_const_pi(r.v_, kRnd);
  return r;
}

Real Real::nan() {
  Real r(Uninit{}, t_precision);
  mpfr_set_nan(r.v_);
  return r;
}

long Real::exponent2() const noexcept {
  if (!mpfr_regular_p(v_)) return 0;
  return static_cast<long>(mpfr_get_exp(v_));
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* raw = nullptr;
  if (mpfr_asprintf(&raw, "%.*Rg", digits, v_) < 0) {
    throw std::runtime_error("mpfr_asprintf failed");
  }
  std::unique_ptr<char, decltype(&mpfr_free_str)> guard(raw, &mpfr_free_str);
  return std::string(raw);
}

std::string Real::to_string() const {
  // ceil(prec * log10(2)) + 1 digits round-trip.
  const int digits = static_cast<int>(std::ceil(precision() * 0.30102999566398120)) + 1;
  return to_string(digits);
}

Real& Real::operator+=(const Real& o) {
  const long p = max_prec(*this, o);
  if (p > precision()) mpfr_prec_round(v_, p, kRnd);
  mpfr_add(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  const long p = max_prec(*this, o);
  if (p > precision()) mpfr_prec_round(v_, p, kRnd);
  mpfr_sub(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  const long p = max_prec(*this, o);
  if (p > precision()) mpfr_prec_round(v_, p, kRnd);
  mpfr_mul(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  const long p = max_prec(*this, o);
  if (p > precision()) mpfr_prec_round(v_, p, kRnd);
  mpfr_div(v_, v_, o.v_, kRnd);
  return *this;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, kRnd);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

namespace {

template <typename Fn>
Real unary(const Real& x, Fn fn) {
  Real r = Real::with_precision(x.precision());
  fn(r.get(), x.get(), kRnd);
  return r;
}

}  // namespace

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }

Real lgamma(const Real& x) {
  Real r = Real::with_precision(x.precision());
  int sign = 0;
  mpfr_lgamma(r.get(), &sign, x.get(), kRnd);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r = Real::with_precision(max_prec(x, y));
  mpfr_pow(r.get(), x.get(), y.get(), kRnd);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Real ldexp(const Real& x, long e) {
  Real r(x);
  mpfr_mul_2si(r.get(), r.get(), e, kRnd);
  return r;
}

Real ulp_scale(long bits) { return ldexp(Real(1L), -bits); }

Complex Complex::polar_unit(const Real& angle) {
  Complex z;
  z.re = Real::with_precision(angle.precision());
  z.im = Real::with_precision(angle.precision());
  mpfr_sin_cos(z.im.get(), z.re.get(), angle.get(), kRnd);
  return z;
}

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  Real i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  const Real d = o.norm2();
  Real r = (re * o.re + im * o.im) / d;
  Real i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator*=(const Real& s) {
  re *= s;
  im *= s;
  return *this;
}

Real Complex::norm2() const { return re * re + im * im; }

Real Complex::abs() const {
  Real r = Real::with_precision(std::max(re.precision(), im.precision()));
  mpfr_hypot(r.get(), re.get(), im.get(), kRnd);
  return r;
}

}  // namespace arakelab
