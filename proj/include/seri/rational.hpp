#ifndef SERI_RATIONAL_HPP
#define SERI_RATIONAL_HPP

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace seri {

/// Exact arithmetic for oracle checks on small trees.
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

}  // namespace seri

#endif  // SERI_RATIONAL_HPP
