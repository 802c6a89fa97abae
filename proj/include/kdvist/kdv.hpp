#pragma once

#include <utility>
#include <vector>

#include "kdvist/spectrum.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Time evolution of the scattering data and large-time reconstruction of the
// KdV solution u_t - 6 u u_x + u_xxx = 0 from bound states and norming
// constants: each bound state kappa_n contributes a soliton of depth
// -2 kappa_n^2 travelling at speed 4 kappa_n^2, with phases fixed by the
// norming constants and the pairwise interaction factors.
// ---------------------------------------------------------------------------

// Scattering data evolved to time t.  kappas are strictly descending (so the
// first soliton is the deepest and fastest); norming0 holds c_n^2 at time
// zero; gammas holds the positive phase factors
//   gamma_n = (2 kappa_n / c_n^2) * prod_{m<n} ((k_n+k_m)/(k_n-k_m))^2,
// with log_sqrt_gamma the numerically stable logs used in evaluation.
struct SolitonTrain {
    std::vector<double> kappas;
    std::vector<double> norming0;
    std::vector<double> gammas;
    std::vector<double> log_sqrt_gamma;
    double t = 0.0;
};

// Reflectionless approximation of the Marchenko kernel at time t:
// terms hold (c_n^2(t), kappa_n) with c_n^2(t) = c_n^2 e^{8 kappa_n^3 t}.
struct GLMKernelApprox {
    std::vector<std::pair<double, double>> terms;
};

// Evolve the scattering data to time t >= 0: kappas are constant in time and
// c_n^2(t) = c_n^2 e^{8 kappa_n^3 t}; the phase factors gamma_n are computed
// from the time-zero data in log space.  Throws invalid_input for t < 0,
// non-descending or coincident kappas, or nonpositive norming constants.
SolitonTrain evolve(const DiscreteSpectrum& spectrum, double t);

// Large-time closed form: the pointwise sum of single solitons
//   u(x,t) = -2 sum_n kappa_n^2 sech^2(kappa_n x - 4 kappa_n^3 t
//                                      + log sqrt(gamma_n)),
// evaluated with an overflow-safe sech^2.
std::vector<double> u_asymptotic(const SolitonTrain& train, const std::vector<double>& xs);

// log det(I + C(x,t)) for the Gram-type kernel matrix
//   C_mn = c_m c_n e^{-(k_m+k_n) x + 4 (k_m^3+k_n^3) t} / (k_m + k_n),
// computed through a symmetric rescaling so that the Cholesky factorization
// never sees the (potentially astronomically large) raw entries.  Always
// positive; throws numerical_error if the factorization breaks down.
double log_det_kernel_matrix(const DiscreteSpectrum& spectrum, double t, double x);

// Reconstruction through the determinant formula
//   u(x,t) = -2 d^2/dx^2 log det(I + C(x,t)),
// with the second derivative taken as a central difference of spacing dx.
std::vector<double> u_determinant(const DiscreteSpectrum& spectrum, double t,
                                  const std::vector<double>& xs, double dx = 1e-3);

// Evolved kernel terms (c_n^2(t), kappa_n); all positive.
GLMKernelApprox glm_terms(const DiscreteSpectrum& spectrum, double t);

// Reflectionless Marchenko kernel F(x,t) = sum_n c_n^2(t) e^{-kappa_n x}.
double glm_kernel(const DiscreteSpectrum& spectrum, double t, double x);

}  // namespace kdvist
