#include "kdvist/scattering.hpp"

#include <cmath>

#include "kdvist/detail/kernels.hpp"

namespace kdvist {

using detail::sinc;
using detail::sinc_g;
using detail::sinch;
using detail::sinch_g;

namespace {

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

BranchedAux omega_xi(cplx k, const BlockWell& well) {
    const double a = well.depth_root, h = well.width;
    if (!(a > 0.0)) throw invalid_input("omega_xi: transparent block (a = 0) has no omega");
    const cplx z = k / a;
    const cplx s = std::sqrt(z * z + 1.0);  // either sheet works, see header
    BranchedAux aux;
    aux.omega = z + s;
    aux.mu = a * s;
    aux.xi = std::exp(cplx(0.0, 2.0 * h) * aux.mu);
    return aux;
}

ScatteringEvaluation block_scattering(cplx k, const BlockWell& well) {
    ScatteringEvaluation ev;
    ev.k = k;
    if (well.depth_root == 0.0) {  // transparent stretch
        ev.R = ev.L = ev.R_tilde = 0.0;
        ev.T = ev.T_tilde = 1.0;
        return ev;
    }
    const double a = well.depth_root, h = well.width;
    const BranchedAux aux = omega_xi(k, well);
    const cplx w2 = aux.omega * aux.omega, w4 = w2 * w2, xi = aux.xi;
    const cplx D = xi - w4;       // denominator of R0/T0
    const cplx Dt = xi * w4 - 1.0;  // denominator of R0~
    const cplx R0 = w2 * (1.0 - xi) / D;
    const cplx T0 = (1.0 - w4) * std::exp(cplx(0.0, a * h) / aux.omega) / D;
    // tilde continuation: conj on the real axis, meromorphic everywhere
    const cplx Rt0 = w2 * (1.0 - xi) / Dt;
    const cplx Tt0 = xi * (1.0 - w4) * std::exp(cplx(0.0, -a * h) / aux.omega) / (-Dt);

    const double re = well.right_edge;  // <= 0
    const cplx shiftR = std::exp(cplx(0.0, -2.0) * k * re);
    ev.R = R0 * shiftR;
    ev.L = R0 * std::exp(cplx(0.0, 2.0) * k * well.left_edge());
    ev.T = T0;
    ev.R_tilde = Rt0 / shiftR;
    ev.T_tilde = Tt0;
    if (!finite(ev.R) || !finite(ev.T))
        throw pole_error("block_scattering: k is a pole of the block formulas");
    return ev;
}

BlockR0 block_R0(cplx k, double a, double h, bool with_derivative) {
    if (!(a > 0.0)) throw invalid_input("block_R0: a must be positive");
    const cplx z = k / a;
    const cplx s = std::sqrt(z * z + 1.0);
    const cplx omega = z + s, mu = a * s;
    const cplx xi = std::exp(cplx(0.0, 2.0 * h) * mu);
    const cplx w2 = omega * omega, w4 = w2 * w2;
    const cplx N = w2 * (1.0 - xi);
    const cplx D = xi - w4, Dt = xi * w4 - 1.0;

    BlockR0 out;
    out.R0 = N / D;
    out.Rt0 = N / Dt;
    out.dR0 = out.dRt0 = 0.0;
    if (!with_derivative) return out;

    if (std::abs(mu) > 1e-6 * a) {
        const cplx dw = omega / mu;                   // d omega / dk
        const cplx dxi = cplx(0.0, 2.0 * h) * (k / mu) * xi;  // d xi / dk
        const cplx dN = 2.0 * omega * dw * (1.0 - xi) - w2 * dxi;
        const cplx dD = dxi - 4.0 * w2 * omega * dw;
        const cplx dDt = dxi * w4 + 4.0 * xi * w2 * omega * dw;
        out.dR0 = (dN * D - N * dD) / (D * D);
        out.dRt0 = (dN * Dt - N * dDt) / (Dt * Dt);
    } else {
        // branch point k = +-ia: R0 is analytic there but omega' blows up;
        // fall back to a high-order difference along the real direction
        const double d = 1e-4 * std::max(1.0, std::abs(k));
        auto r = [&](cplx kk) { return block_R0(kk, a, h, false); };
        const BlockR0 p1 = r(k + d), m1 = r(k - d), p2 = r(k + 2.0 * d), m2 = r(k - 2.0 * d);
        out.dR0 = (8.0 * (p1.R0 - m1.R0) - (p2.R0 - m2.R0)) / (12.0 * d);
        out.dRt0 = (8.0 * (p1.Rt0 - m1.Rt0) - (p2.Rt0 - m2.Rt0)) / (12.0 * d);
    }
    return out;
}

BlockR0Axis block_R0_axis(double kappa, double a, double h, bool with_derivative) {
    if (!(a > 0.0)) throw invalid_input("block_R0_axis: a must be positive");
    if (!(kappa > 0.0)) throw invalid_input("block_R0_axis: kappa must be positive");
    const double y = kappa / a, ah = a * h;
    BlockR0Axis out{0.0, 0.0, 0.0, 0.0};

    double P, C, dP = 0.0, dC = 0.0;  // dP, dC are d/dkappa
    if (y <= 1.0) {
        const double eps = std::sqrt((1.0 - y) * (1.0 + y));
        const double x = ah * eps;
        P = ah * sinc(x);
        C = std::cos(x);
        if (with_derivative) {
            dP = -a * a * h * h * h * y * sinc_g(x);
            dC = a * h * h * y * sinc(x);
        }
    } else {
        const double eps = std::sqrt((y - 1.0) * (y + 1.0));
        const double x = ah * eps;
        if (x > 300.0) {
            // avoid cosh overflow: work with Q = P/C = ah tanh(x)/x
            const double Q = ah * std::tanh(x) / x;
            const double f = 1.0 - 2.0 * y * y;
            out.R0 = -Q / (Q * f - 2.0 * y);
            out.Rt0 = -Q / (Q * f + 2.0 * y);
            if (with_derivative) {
                const double dx = h * y / eps;  // d x / dkappa (sech^2 term underflows)
                const double dQ = -(Q / x) * dx;
                const double dD = dQ * f + Q * (-4.0 * y / a) - 2.0 / a;
                const double dDt = dQ * f + Q * (-4.0 * y / a) + 2.0 / a;
                const double D = Q * f - 2.0 * y, Dt = Q * f + 2.0 * y;
                out.dR0 = (Q * dD - dQ * D) / (D * D);
                out.dRt0 = (Q * dDt - dQ * Dt) / (Dt * Dt);
            }
            return out;
        }
        P = ah * sinch(x);
        C = std::cosh(x);
        if (with_derivative) {
            dP = a * a * h * h * h * y * sinch_g(x);
            dC = a * h * h * y * sinch(x);
        }
    }

    const double f = 1.0 - 2.0 * y * y;
    const double D = P * f - 2.0 * y * C;
    const double Dt = P * f + 2.0 * y * C;
    out.R0 = -P / D;
    out.Rt0 = -P / Dt;
    if (with_derivative) {
        const double df = -4.0 * y / a;
        const double dD = dP * f + P * df - (2.0 / a) * C - 2.0 * y * dC;
        const double dDt = dP * f + P * df + (2.0 / a) * C + 2.0 * y * dC;
        out.dR0 = (P * dD - dP * D) / (D * D);
        out.dRt0 = (P * dDt - dP * Dt) / (Dt * Dt);
    }
    return out;
}

std::vector<double> block_bound_states(const BlockWell& well) {
    const double a = well.depth_root, h = well.width;
    if (!(a > 0.0) || !(h > 0.0))
        throw invalid_input("block_bound_states: need a > 0 and h > 0");
    const double ah = a * h;
    // f(y) = (ah/pi) sqrt(1-y^2) - (2/pi) arctan(y/sqrt(1-y^2)); strictly
    // decreasing from ah/pi at y=0 to -1 at y=1, so each target n-1 has
    // exactly one root.
    auto f = [&](double y) {
        const double e = std::sqrt(std::max(0.0, (1.0 - y) * (1.0 + y)));
        const double at = (e == 0.0) ? PI / 2.0 : std::atan(y / e);
        return (ah / PI) * e - (2.0 / PI) * at;
    };
    const int K = static_cast<int>(std::ceil(ah / PI));
    std::vector<double> kappas;
    kappas.reserve(K);
    for (int n = 1; n <= K; ++n) {
        const double target = n - 1.0;
        double lo = 0.0, hi = 1.0;  // f(lo) >= target > f(hi)
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) >= target ? lo : hi) = mid;
        }
        double y = 0.5 * (lo + hi);
        // Newton polish: f'(y) = -(ah*y + 2) / (pi*sqrt(1-y^2))
        for (int it = 0; it < 3; ++it) {
            const double e = std::sqrt(std::max(1e-300, (1.0 - y) * (1.0 + y)));
            const double step = (f(y) - target) * PI * e / (ah * y + 2.0);
            y += step;
            y = std::min(1.0, std::max(0.0, y));
        }
        kappas.push_back(a * y);
    }
    return kappas;  // n = 1 is the largest root: already descending
}

std::vector<double> block_norming_constants(const BlockWell& well,
                                            const std::vector<double>& kappas) {
    const double a = well.depth_root, h = well.width;
    std::vector<double> c2;
    c2.reserve(kappas.size());
    for (double kap : kappas) {
        if (!(kap > 0.0) || !(kap < a))
            throw invalid_input("block_norming_constants: kappa must lie in (0, a)");
        const double y = kap / a;
        c2.push_back(2.0 * kap * (1.0 - y * y) / (2.0 + h * kap));
    }
    return c2;
}

}  // namespace kdvist
