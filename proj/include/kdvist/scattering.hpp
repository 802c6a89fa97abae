#pragma once

#include <vector>

#include "kdvist/blocks.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Closed-form scattering data for a single constant well V = -a^2 of width h.
//
// With z = k/a, s = sqrt(z^2 + 1) and
//
//   omega = z + s,   xi = exp(i (omega + 1/omega) a h) = exp(2 i mu h),
//   mu    = a s     (so a(omega - 1/omega) = 2k, a(omega + 1/omega) = 2 mu),
//
// the right-edge-at-origin well has
//
//   R0 = omega^2 (1 - xi) / (xi - omega^4)
//   T0 = (1 - omega^4) e^{i a h / omega} / (xi - omega^4)
//   L0 = R0 e^{-i a h (omega - 1/omega)} = R0 e^{-2 i k h}.
//
// The sign of the exponent in xi matters: with e^{+2 i mu h} the poles of R0
// on the positive imaginary axis (xi = omega^4) reduce exactly to the
// explicit bound-state condition below, which is the convention all of the
// well-known block-well spectra satisfy.  (The alternative minus sign yields
// a different, wrong, spectral condition.)
//
// Branch: R0, T0, L0 e^{2ikh} are invariant under the sheet swap
// (omega, xi) -> (-1/omega, 1/xi), because omega(z - s) = -1 forces
// omega + 1/omega = 2s and the formulas are symmetric under s -> -s.  Hence
// the principal sqrt can be used for s everywhere in the complex plane: the
// apparent cut of s never shows in R0/T0, which come out meromorphic in C and
// continuous across the imaginary segment [-ia, ia].
// ---------------------------------------------------------------------------

struct BranchedAux {
    cplx omega;
    cplx xi;
    cplx mu;  // a * sqrt((k/a)^2 + 1); xi = exp(2 i mu h)
};

// omega, xi (and mu) for wavenumber k on a well of depth root a, width h.
// Throws invalid_input for a <= 0 (a transparent block has no omega).
BranchedAux omega_xi(cplx k, const BlockWell& well);

// R, L, T (plus the k -> -k continuations R~, T~) for one well at its actual
// position.  Position enters through the shift laws only:
//   R_n = R0 e^{2 i k b_left},  L_n = R0 e^{-2 i k b_right},  T_n = T0,
// where the well occupies [-b_right_abs - h ...] — concretely, for a well
// on [-b_n, -b_{n-1}] (right_edge = -b_{n-1}): R = R0 e^{2ik b_{n-1}},
// L = R0 e^{-2ik b_n}.
struct ScatteringEvaluation {
    cplx k;
    cplx R, L, T;
    cplx R_tilde, T_tilde;
};

// Scattering data of a single well at position well.right_edge.  a = 0 gives
// identity scattering (R = L = 0, T = 1).  Throws pole_error if k is
// numerically at a pole (xi = omega^4).
ScatteringEvaluation block_scattering(cplx k, const BlockWell& well);

// Origin-shifted block quantities used by the recursions: R0 and its
// k -> -k continuation R0~ = omega^2 (1 - xi)/(xi omega^4 - 1), optionally
// with analytic k-derivatives (quotient rule on omega' = omega/mu,
// xi' = 2 i h k xi / mu).
struct BlockR0 {
    cplx R0, Rt0;    // R0 and R0~
    cplx dR0, dRt0;  // d/dk (only when requested)
};

BlockR0 block_R0(cplx k, double a, double h, bool with_derivative);

// Fast all-real path for k = i*kappa (kappa > 0), where R0 and R0~ are real.
// Uses the cancellation-free factored forms
//   R0  = -P / (P (1 - 2 y^2) - 2 y C)
//   R0~ = -P / (P (1 - 2 y^2) + 2 y C)
// with y = kappa/a, and for y <= 1: P = a h sinc(a h e), C = cos(a h e),
// e = sqrt((1-y)(1+y)); for y > 1 the hyperbolic continuation.  Smooth
// through the removable point y = 1 (value ah/(ah+2)).  Derivatives d/dkappa
// are real; d/dk = -i d/dkappa.
struct BlockR0Axis {
    double R0, Rt0;
    double dR0, dRt0;  // d/dkappa (only when requested)
};

BlockR0Axis block_R0_axis(double kappa, double a, double h, bool with_derivative);

// All bound states 0 < kappa < a of the single well (descending), i.e. the
// roots of
//   (a h / pi) sqrt(1 - y^2) - (2/pi) arctan(y / sqrt(1 - y^2)) = n - 1,
//   y = kappa / a,  n = 1 .. ceil(a h / pi),
// each bracketed by bisection (the left side is strictly decreasing in y)
// and polished by Newton to residual < 1e-14.
std::vector<double> block_bound_states(const BlockWell& well);

// Exact norming constants c_n^2 = 2 kappa_n (1 - (kappa_n/a)^2)/(2 + h kappa_n)
// for the well *with right edge at 0*.  kappas must lie in (0, a).
std::vector<double> block_norming_constants(const BlockWell& well,
                                            const std::vector<double>& kappas);

}  // namespace kdvist
