#pragma once

#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace arakelab {

// Every failure raised by the library derives from Error. The CLI maps each
// subclass onto a distinct exit code and JSON error kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Malformed input: mismatched variable counts, bad dimensions, zero polynomial.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_positive_definite"; }
};

class RankDeficient : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "rank_deficient"; }
};

// Row span of a sublattice is not saturated; the quotient would carry torsion.
class NotSaturated : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_saturated"; }
};

class UnsupportedMetric : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported_metric"; }
};

// A search exceeded its node budget. lower_bound is the count found so far.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, mpz_class lower_bound)
      : Error(what), lower_bound_(std::move(lower_bound)) {}
  const char* kind() const noexcept override { return "cap_exceeded"; }
  const mpz_class& lower_bound() const noexcept { return lower_bound_; }

 private:
  mpz_class lower_bound_;
};

// Working precision is insufficient to certify a numerical result.
class PrecisionFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precision"; }
};

}  // namespace arakelab
