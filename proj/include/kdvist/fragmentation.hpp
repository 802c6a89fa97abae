#pragma once

#include <array>
#include <vector>

#include "kdvist/blocks.hpp"
#include "kdvist/scattering.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Layer stripping across N blocks.  Blocks are numbered 1..N right to left
// (wells[0] touches x = 0), matching the b_0 = 0 < b_1 < ... < b_N grid.
//
// Three independent evaluation routes are provided for the same scattering
// data; their agreement is a test oracle, and each has a role:
//   * compose_lambda  — transition-matrix product (a = 1/T, b = -R/T entries),
//   * recursion_step  — the R/A/B recursions (needed for A_N in the residue
//                       normalization),
//   * pq_propagate    — the linear (p, q) form of the B recursion, whose
//                       zeros of q_N locate bound states and whose derivative
//                       gives residues.
//
// Everything is evaluated either at general complex k or on the positive
// imaginary axis k = i*kappa, where all quantities are real; the *_axis
// variants keep the arithmetic exactly real (root finding needs clean signs).
// ---------------------------------------------------------------------------

struct TransitionMatrix {
    std::array<std::array<cplx, 2>, 2> m{{{cplx(1.0), cplx(0.0)}, {cplx(0.0), cplx(1.0)}}};

    cplx a() const { return m[0][0]; }  // 1/T
    cplx b() const { return m[0][1]; }  // -R/T
    cplx R() const { return -m[0][1] / m[0][0]; }
    cplx T() const { return 1.0 / m[0][0]; }
    cplx L() const { return m[1][0] / m[0][0]; }
};

// Lambda = Lambda_N ... Lambda_1 with each factor built from the positioned
// block scattering data.  Valid for real k and, by meromorphic continuation,
// everywhere the factors are finite.  Throws pole_error (with the block
// index) if a factor is evaluated at one of its poles.
TransitionMatrix compose_lambda(cplx k, const BlockPotential& pot);

// Same product at k = i*kappa in all-real arithmetic.  The entries a and b
// can grow like e^{kappa * span}, so the product tracks a power-of-two scale:
// actual_entry = m[i][j] * 2^log2_scale.  a = 1/T and b = -R/T are analytic
// in the upper half plane, so no pole can be hit (kappa > 0).
struct LambdaAxis {
    std::array<std::array<double, 2>, 2> m;
    long log2_scale = 0;
};

LambdaAxis compose_lambda_axis(double kappa, const BlockPotential& pot);

// State of the coupled R/A recursions after absorbing blocks 1..n.  The
// tilde quantities are co-propagated (the R step needs R~_{1..n}); A~ is the
// k -> -k continuation of A.  B_n = A_n * R_{1..n} is kept for convenience.
template <class Scalar>
struct RecursionStateT {
    Scalar R_cur{}, Rt_cur{};  // R_{1..n}, R~_{1..n}
    Scalar A_cur{}, At_cur{};  // A_n, A~_n
    Scalar B_cur{};            // B_n = A_n R_{1..n}
    int n = 0;
};

using RecursionState = RecursionStateT<cplx>;
using RecursionStateAxis = RecursionStateT<double>;

// Runs the recursion over the first `levels` blocks (levels = N for the full
// potential).  Zero-depth blocks contribute pure phases.  Throws pole_error
// if a step denominator vanishes.
RecursionState run_recursion(cplx k, const BlockPotential& pot, int levels);
RecursionStateAxis run_recursion_axis(double kappa, const BlockPotential& pot, int levels);

// L_{1..n} recovered from the state: B_n e^{-2 i k b_n}.
cplx left_reflection(const RecursionState& state, cplx k, double b_n);

// A_N(i*kappa) for the full potential, used by the residue normalization
// c^2 = Res / (i A_N).  Runs the chain to level N-1 and applies one A step,
// so it stays finite at bound states of the full potential.  If an
// intermediate partial potential happens to share the bound state (the chain
// blows up), the evaluation is retried at kappa*(1 + 1e-9); *perturbed is set
// when provided.
double a_last_axis(double kappa, const BlockPotential& pot, bool* perturbed = nullptr);

// (p, q) linear form.  p/q and the derivative slots share one power-of-two
// scale factor: true_p = p * 2^log2_scale etc.; all ratios are scale-free.
// The axis variant's derivative slots hold d/dkappa (real); d/dk = -i d/dkappa.
template <class Scalar>
struct PQStateT {
    Scalar p{}, q{};
    Scalar dp{}, dq{};
    long log2_scale = 0;
    int n = 0;
};

using PQState = PQStateT<cplx>;
using PQStateAxis = PQStateT<double>;

PQState pq_propagate(cplx k, const BlockPotential& pot, bool with_derivative);
PQStateAxis pq_propagate_axis(double kappa, const BlockPotential& pot, bool with_derivative);

// B_N from a propagated pq state (scale-free ratio): -R0_N/R0~_N * p/q.
cplx pq_B(const PQState& st, cplx k, const BlockPotential& pot);
double pq_B_axis(const PQStateAxis& st, double kappa, const BlockPotential& pot);

// Imaginary-axis points where det(M_{N-1}...M_1) vanishes: kappa = a_N
// together with sqrt(a_n^2 - (pi m / h_n)^2) for 1 <= n <= N-1 and
// 0 <= m <= floor(a_n h_n / pi) (real values only); deduplicated, descending.
// At these kappa a zero of q_N does not certify a pole of B_N.
std::vector<double> exceptional_points(const BlockPotential& pot);

// Res_{k = i kappa} B_N = -(R0_N/R0~_N) p_N / q'_N, evaluated on-axis with
// analytic derivatives.  kappa must be a simple zero of q_N away from
// exceptional points and from poles of R0~_N; violations throw.
cplx residue_B(double kappa, const BlockPotential& pot);

// c^2 = Res_{k=i kappa} B_N / (i A_N(i kappa)); positive for a genuine bound
// state of the (canonical-frame) potential.  Note: this is the norming
// constant of the right-edge-at-zero frame; callers translate by
// e^{2 kappa offset} for original coordinates.
double norming_from_residue(double kappa, const BlockPotential& pot);

}  // namespace kdvist
