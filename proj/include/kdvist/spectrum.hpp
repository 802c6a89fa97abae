#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kdvist/blocks.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Bound-state location and norming constants for a block potential.
//
// Bound states k = i*kappa are located on the positive imaginary axis, where
// every target function in sight is real; candidate kappas come from a
// finite-dimensional matrix estimate of H = -d^2/dx^2 + V (or from the
// caller) and are polished by safeguarded 1-D root iterations.
// ---------------------------------------------------------------------------

// The discrete spectrum in original coordinates: kappas strictly descending,
// every c^2 positive.  method_tags records how each norming value was
// produced.
struct DiscreteSpectrum {
    std::vector<double> kappas;
    std::vector<double> norming;  // c_n^2
    std::vector<std::string> method_tags;
};

struct SeedEstimates {
    std::vector<double> kappas_guess;  // descending, clamped to (0, max_n a_n]
    std::string source;                // "spectral-matrix" or "user"
};

// kappa estimates from a periodic Fourier pseudospectral matrix for
// H = -d^2/dx^2 + V on [xmin, xmax] (original coordinates): kappa = sqrt(-l)
// over the negative eigenvalues l.  grid_size must be a power of two >= 64
// and the domain must contain the support of the potential.  A transparent
// potential yields an empty estimate list.
SeedEstimates spectral_seed(const BlockPotential& pot, int grid_size, double xmin, double xmax);

// The same matrix estimate applied to an arbitrary potential V(x) sampled at
// the Fourier nodes — useful to compare a block discretization against its
// smooth parent profile.  No clamping is applied to the estimates.
SeedEstimates spectral_seed_profile(const std::function<double(double)>& V, int grid_size,
                                    double xmin, double xmax);

// Which axis-real function's zeros certify the bound states:
//   inv_R  — zeros of 1 / R_{1..N},
//   inv_B  — zeros of 1 / B_N (via the scale-free pq ratio),
//   q_zero — zeros of q_N, cross-checked against the exceptional points
//            (a zero there is discarded unless B_N really has a pole).
enum class BoundMethod { inv_R, inv_B, q_zero };

struct RootDiagnostics {
    std::vector<double> failed_seeds;           // no bracket / no convergence
    std::vector<double> discarded_exceptional;  // q_zero roots vetoed
    int deduplicated = 0;                       // merged root pairs
};

// Polishes every seed on the imaginary axis (bracket expansion + safeguarded
// Brent; q_zero adds a Newton step with the analytic derivative), then runs
// a supplementary fine scan on (0, lowest root) for shallow states that the
// seeds missed — they cluster towards kappa = 0.  With no seeds at all the
// scan covers (0, max_n a_n).  fine_scan_step <= 0 picks a default.  Roots
// are deduplicated (gap 1e-8 * kappa_max) and returned descending.
std::vector<double> find_bound_states(const BlockPotential& pot, const SeedEstimates& seeds,
                                      BoundMethod method, RootDiagnostics* diag = nullptr,
                                      double fine_scan_step = 0.0);

// How to turn bound states into norming constants:
//   residue  — residue of B_N at i*kappa divided by i*A_N (exact up to the
//              root-finding error),
//   ab_ratio — c^2 = i b(i kappa) / a'(i kappa) with a' by a central
//              difference of width eta on the axis (a = 1/T, b = -R/T from
//              the transition product).
enum class NormingMethod { residue, ab_ratio };

// c_n^2 for the given bound states, translated to original coordinates
// (c^2_orig = c^2_canonical * e^{2 kappa offset}).  kappas must be genuine
// bound states; a nonpositive or non-finite result throws invalid_input.
DiscreteSpectrum norming_constants(const BlockPotential& pot, const std::vector<double>& kappas,
                                   NormingMethod method, double eta = 1e-3);

}  // namespace kdvist
