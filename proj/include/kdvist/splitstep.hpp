#pragma once

#include <vector>

#include "kdvist/discretize.hpp"
#include "kdvist/types.hpp"

namespace kdvist {

// ---------------------------------------------------------------------------
// Direct time integration of KdV, u_t - 6 u u_x + u_xxx = 0, as an
// independent baseline for the scattering-based reconstructions.  Strang
// splitting on a periodic domain: the linear flow u_t = -u_xxx is advanced
// exactly in Fourier space, the nonlinear flow u_t = 6 u u_x = 3 (u^2)_x is
// advanced pseudo-spectrally with classical RK4 and 2/3-rule dealiasing.
// ---------------------------------------------------------------------------

struct SplitStepResult {
    std::vector<double> xs;  // periodic grid nodes (ascending)
    std::vector<double> u;   // u(x, t_end) at those nodes
    double mass0 = 0.0;      // integral of u dx at t = 0
    double mass1 = 0.0;      // ... and at t_end
    double momentum0 = 0.0;  // integral of u^2 dx at t = 0
    double momentum1 = 0.0;  // ... and at t_end
    int steps = 0;
    double dt = 0.0;         // actual step used (t_end / steps)
};

// Integrate from u(x,0) = profile values (zero outside the profile support)
// to t_end.  The periodic domain is pad_factor times the support width, with
// a quarter of the slack on the left and three quarters on the right, since
// solitary waves travel right.  The requested dt is rounded so that an
// integer number of steps lands exactly on t_end.  Throws invalid_input for
// bad parameters and numerical_error (with the failing step and time in the
// message) if the field stops being finite or grows beyond all physical
// bounds.
SplitStepResult split_step_kdv(const SampledPotential& u0, double t_end, double dt,
                               int grid, double pad_factor = 4.0);

}  // namespace kdvist
