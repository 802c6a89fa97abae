#pragma once

#include <functional>

#include "kdvist/blocks.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Independent reference procedures.  Nothing here uses the block recursion
// machinery, so agreement between these and the fast paths is a meaningful
// cross-check rather than a tautology.
// ---------------------------------------------------------------------------

// Residue of f at `center` by the trapezoid rule on a circle of the given
// radius: (r/n) sum_j f(center + r e^{i th_j}) e^{i th_j}.  Exponentially
// accurate in n for f meromorphic with only the one (isolated) pole strictly
// inside the circle; with no pole enclosed it returns ~0.
cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius,
                     int n_nodes = 64);

// Scattering entries a = 1/T and b = -R/T obtained by integrating
// -phi'' + V phi = k^2 phi across the support with classical RK4 and reading
// the plane-wave coefficients off at the right edge.  The march starts at the
// left edge with phi = e^{-ikx} (the transmitted wave) and steps are aligned
// to block boundaries so V is smooth inside every step; global error is
// O(max_step^4).  k = 0 makes the retrieval singular and throws.
struct ABPair {
    cplx a, b;
};

ABPair ab_by_integration(cplx k, const BlockPotential& pot, double max_step = 1e-3);

// Norming constant of a known bound state by direct L2 normalization: the
// decaying solution is integrated from the right edge (phi = e^{-kappa x}
// there) leftwards, |phi|^2 is accumulated along the way, and the two
// exponential tails are added in closed form.  The left tail assumes clean
// e^{+kappa x} decay, which only holds if kappa is exactly a bound state;
// decay_mismatch = |phi'(A) - kappa phi(A)| / |kappa phi(A)| measures how
// true that is (small = trustworthy).
//
// c2 is the square-normalization reading 1/||phi||^2 (the one consistent
// with the closed-form single-block constants); c2_alt = 1/||phi|| is kept
// because some references quote the constant on that scale.
struct NormingL2 {
    double c2;
    double c2_alt;
    double decay_mismatch;
};

NormingL2 norming_by_L2(double kappa, const BlockPotential& pot, double max_step = 1e-3);

}  // namespace kdvist
