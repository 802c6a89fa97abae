#include "kdvist/oracles.hpp"

#include <cmath>
#include <vector>

namespace kdvist {

namespace {

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// One classical RK4 step of y' = f(x, y) for a 2-vector (phi, phi').
template <class F>
void rk4_step(const F& f, double x, double h, cplx& u, cplx& v) {
    cplx k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    f(x, u, v, k1u, k1v);
    f(x + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
    f(x + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
    f(x + h, u + h * k3u, v + h * k3v, k4u, k4v);
    u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius,
                     int n_nodes) {
    if (!(radius > 0.0)) throw invalid_input("contour_residue: radius must be positive");
    if (n_nodes < 4) throw invalid_input("contour_residue: need at least 4 nodes");
    cplx acc = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
        const double th = 2.0 * PI * j / n_nodes;
        const cplx e = std::polar(1.0, th);
        acc += f(center + radius * e) * e;
    }
    return acc * (radius / static_cast<double>(n_nodes));
}

ABPair ab_by_integration(cplx k, const BlockPotential& pot, double max_step) {
    pot.validate();
    if (k == cplx(0.0)) throw invalid_input("ab_by_integration: k = 0 is singular");
    if (!(max_step > 0.0)) throw invalid_input("ab_by_integration: max_step must be positive");

    const cplx iu(0.0, 1.0);
    const cplx k2 = k * k;
    const double alpha = -pot.grid.back();  // left edge (canonical frame)

    // phi = e^{-ikx} for x <= alpha; march to the right edge at 0
    cplx u = std::exp(-iu * k * alpha);
    cplx v = -iu * k * u;

    // Walk blocks left to right: wells are stored right to left.
    for (int i = static_cast<int>(pot.wells.size()) - 1; i >= 0; --i) {
        const BlockWell& w = pot.wells[i];
        const double V = -w.depth_root * w.depth_root;
        const int n = std::max(1, static_cast<int>(std::ceil(w.width / max_step)));
        const double h = w.width / n;
        auto rhs = [&](double, const cplx& phi, const cplx& dphi, cplx& du, cplx& dv) {
            du = dphi;
            dv = (V - k2) * phi;
        };
        double x = w.left_edge();
        for (int s = 0; s < n; ++s, x += h) rk4_step(rhs, x, h, u, v);
        if (!finite(u) || !finite(v))
            throw pole_error("ab_by_integration: solution overflowed", i);
    }

    // At x = 0: phi = a e^{-ikx} + b e^{+ikx}; solve the 2x2 system.
    ABPair out;
    out.a = 0.5 * (u + iu * v / k);
    out.b = 0.5 * (-u + iu * v / k);
    return out;
}

NormingL2 norming_by_L2(double kappa, const BlockPotential& pot, double max_step) {
    pot.validate();
    if (!(kappa > 0.0)) throw invalid_input("norming_by_L2: kappa must be positive");
    if (!(max_step > 0.0)) throw invalid_input("norming_by_L2: max_step must be positive");

    const double kap2 = kappa * kappa;

    // March leftwards from 0 with phi = e^{-kappa x} there.  Real arithmetic:
    // the decaying solution at k = i kappa is real.  Accumulate I = int phi^2
    // as a third ODE component so the quadrature shares RK4's accuracy.
    double u = 1.0, v = -kappa, I = 0.0;
    for (std::size_t i = 0; i < pot.wells.size(); ++i) {  // right to left
        const BlockWell& w = pot.wells[i];
        const double V = -w.depth_root * w.depth_root;
        const int n = std::max(1, static_cast<int>(std::ceil(w.width / max_step)));
        const double h = -w.width / n;  // negative: leftward
        for (int s = 0; s < n; ++s) {
            // RK4 on (u, v, I)' = (v, (V + kappa^2) u, u^2)
            auto f = [&](double uu, double vv, double& du, double& dv, double& dI) {
                du = vv;
                dv = (V + kap2) * uu;
                dI = uu * uu;
            };
            double k1u, k1v, k1I, k2u, k2v, k2I, k3u, k3v, k3I, k4u, k4v, k4I;
            f(u, v, k1u, k1v, k1I);
            f(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v, k2I);
            f(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v, k3I);
            f(u + h * k3u, v + h * k3v, k4u, k4v, k4I);
            u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            I += (h / 6.0) * (k1I + 2.0 * k2I + 2.0 * k3I + k4I);
        }
        if (!std::isfinite(u) || !std::isfinite(v))
            throw pole_error("norming_by_L2: solution overflowed", static_cast<int>(i));
    }
    I = -I;  // leftward march accumulated with negative steps

    // Tails: e^{-2 kappa x} on [0, inf) integrates to 1/(2 kappa); on the
    // left, phi ~ phi(A) e^{kappa (x - A)} contributes phi(A)^2/(2 kappa).
    const double right_tail = 1.0 / (2.0 * kappa);
    const double left_tail = u * u / (2.0 * kappa);
    const double norm2 = I + right_tail + left_tail;

    NormingL2 out;
    out.decay_mismatch = std::abs(v - kappa * u) / std::max(1e-300, std::abs(kappa * u));
    out.c2 = 1.0 / norm2;
    out.c2_alt = 1.0 / std::sqrt(norm2);
    return out;
}

}  // namespace kdvist
