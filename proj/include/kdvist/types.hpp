#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdvist {

using cplx = std::complex<double>;

constexpr double PI = 3.141592653589793238462643383279502884;

// A scattering formula was evaluated at (or numerically too close to) one of
// its poles.  `block` is the 1-based index of the offending block, or 0 when
// the pole belongs to a composed quantity rather than a single block.
struct pole_error : std::runtime_error {
    int block;
    explicit pole_error(const std::string& what, int block_index = 0)
        : std::runtime_error(what), block(block_index) {}
};

// Input data violated a documented precondition (bad profile, non-power-of-two
// Haar length, invalid bound state, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerically stabilized evaluation still broke down (failed factorization,
// overflow of a quantity that should have been representable).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kdvist
