#pragma once

#include <cmath>

// Small stable scalar kernels shared by the block-formula evaluators.

namespace kdvist::detail {

// sin(x)/x, stable at 0
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sinh(x)/x, stable at 0
inline double sinch(double x) { return x == 0.0 ? 1.0 : std::sinh(x) / x; }

// (cos x - sinc x)/x^2 = sinc'(x)/x; analytic, value -1/3 at 0
inline double sinc_g(double x) {
    const double x2 = x * x;
    if (x2 < 1e-4) return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0;
    return (std::cos(x) - sinc(x)) / x2;
}

// (cosh x - sinch x)/x^2; analytic, value +1/3 at 0
inline double sinch_g(double x) {
    const double x2 = x * x;
    if (x2 < 1e-4) return 1.0 / 3.0 + x2 / 30.0 + x2 * x2 / 840.0;
    return (std::cosh(x) - sinch(x)) / x2;
}

}  // namespace kdvist::detail
