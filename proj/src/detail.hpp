#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "cridx/errors.hpp"

namespace cridx::detail {

inline constexpr double kRealResidueTol = 1e-12;

// log and sqrt only accept positive reals; the tiny imaginary part left by
// complex arithmetic on a real quantity is dropped.
inline double positive_real_argument(std::complex<double> a, const char* fn) {
    if (std::abs(a.imag()) > kRealResidueTol * (1.0 + std::abs(a)) || !(a.real() > 0.0)) {
        throw DomainError(std::string(fn) + " of a non-positive or non-real argument");
    }
    return a.real();
}

inline void check_nonzero_divisor(std::complex<double> d) {
    if (d == std::complex<double>(0.0, 0.0)) throw DomainError("division by zero");
}

}  // namespace cridx::detail
