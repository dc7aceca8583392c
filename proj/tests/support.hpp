#ifndef SERI_TESTS_SUPPORT_HPP
#define SERI_TESTS_SUPPORT_HPP

#include <cmath>

#include "seri/enumerate.hpp"

namespace seri::testing {

using seri::for_each_history;

/// Binomial three-sigma check.
inline bool within_sigmas(double estimate, double target, double stderr_, double k = 3.0) {
  return std::abs(estimate - target) <= k * stderr_;
}

}  // namespace seri::testing

#endif
