#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kdvist/blocks.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Initial profiles and their reduction to block potentials, plus the Haar
// system on the dyadic partition of the (rescaled) support.
// ---------------------------------------------------------------------------

// A finite nonpositive potential with bounded support [xmin, xmax]; `v`
// evaluates it anywhere inside the support.
struct SampledPotential {
    std::function<double(double)> v;
    double xmin = 0.0;
    double xmax = 0.0;
};

// Built-in profiles on [xmin, xmax]:
//   "block" — constant depth: V = -amplitude on the whole support,
//   "sech2" — V(x) = -amplitude * sech^2(x / width).
// amplitude must be >= 0 (the well depth magnitude).
SampledPotential named_profile(const std::string& name, double amplitude, double width,
                               double xmin, double xmax);

// Piecewise-linear interpolant of (x, v) samples; x strictly increasing,
// support [x_front, x_back].
SampledPotential tabulated_profile(std::vector<std::pair<double, double>> samples);

// Reads "x,v" rows (comma or whitespace separated; '#' comments and blank
// lines skipped) and builds the tabulated profile.
SampledPotential csv_profile(const std::string& path);

enum class BlockRule { midpoint, cell_average };

// Uniform partition of the support into n_blocks cells; depth per cell by
// midpoint sample or trapezoid-integrated average.  Values that are positive
// beyond round-off are rejected (with the offending location); tiny positive
// round-off is clamped to zero.
BlockPotential to_blocks(const SampledPotential& profile, int n_blocks, BlockRule rule);

// Coefficients c_r of the values vector in the unnormalized Haar basis on
// the dyadic partition into 2^level cells: r = 0 is the scaling function
// (all ones), r = 2^j + k is the wavelet supported on the k-th dyadic
// subinterval of scale j (+1 on its first half, -1 on its second).
struct HaarCoefficients {
    std::vector<double> coeffs;
    int level = 0;
};

// Fast pyramid transform, O(2^n); length must be a power of two (no
// implicit padding).  Recovers c with values = W c for the explicit basis
// matrix W whose r-th column lists the r-th Haar function's cell values.
HaarCoefficients haar_forward(const std::vector<double>& values);

// Exact inverse of haar_forward (round-trip to round-off).
std::vector<double> haar_inverse(const HaarCoefficients& coeffs);

// Cell averages at 2^level cells -> forward transform -> zero every
// coefficient with |c_r| < threshold -> inverse -> clamp to <= 0 -> blocks.
// The Haar work happens on the support rescaled to [0,1]; emitting the
// blocks on the original cells undoes the scaling.
BlockPotential haar_compress(const SampledPotential& profile, int level, double threshold);

}  // namespace kdvist
