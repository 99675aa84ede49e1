#ifndef RCCS_RATIONAL_HPP
#define RCCS_RATIONAL_HPP

#include <gmpxx.h>

#include <string>

namespace rccs {

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. All bisimulation verdicts in this library are computed
/// without any floating point.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Renders "num/den", or just "num" for integers.
inline std::string to_string(const Rational& r) {
    return r.get_str();
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }
inline bool is_one(const Rational& r) { return r == 1; }

} // namespace rccs

#endif
