#pragma once

#include <cmath>
#include <string>

#include "arakelab/real.hpp"

namespace testing {

inline bool close(const arakelab::Real& a, const arakelab::Real& b, const arakelab::Real& tol) {
  return arakelab::abs(a - b) <= tol;
}

inline bool close(const arakelab::Real& a, const std::string& decimal, double tol) {
  return arakelab::abs(a - arakelab::Real(decimal)) <= arakelab::Real(tol);
}

}  // namespace testing
