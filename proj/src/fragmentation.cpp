#include "kdvist/fragmentation.hpp"

#include <algorithm>
#include <cmath>

#include "kdvist/detail/kernels.hpp"

// Layer stripping.  Conventions used throughout this file:
//
// The recursions absorb blocks right to left (storage order).  Every step
// consumes the *origin-shifted* block values R0_{n+1}, R0~_{n+1} — never the
// values at the block's actual position.  All position bookkeeping lives in
// the aggregates themselves: R_{1..n} carries its natural phases, and
//
//   A_n = (L_{1..n} / R_{1..n}) e^{2 i k b_n},   B_n = A_n R_{1..n},
//
// so B across a transparent stretch of width g just picks up e^{2ikg}, and a
// transparent stretch of width g adjoining x = 0 enters only through the
// seed A = e^{-2ikg} (the seed B is the origin-shifted R0 of the first real
// block either way).  On the axis (k = i kappa) the phases become real
// exponentials e^{-2 kappa g} and every quantity in sight is real.
//
// The recursions also need the ratio R0 / R0~.  Both reflection coefficients
// share the numerator -P (which vanishes at the block's transparency
// points), so the ratio is computed as D~/D directly — the quotient of the
// two denominators — to stay finite where P = 0.

namespace kdvist {

using detail::sinc;
using detail::sinch;

namespace {

inline bool fin(double x) { return std::isfinite(x); }
inline bool fin(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// --- ratio R0 / R0~ = D~/D, unpositioned --------------------------------

cplx ratio_DtD(cplx k, const BlockWell& w) {
    const BranchedAux aux = omega_xi(k, w);
    const cplx w2 = aux.omega * aux.omega, w4 = w2 * w2;
    return (aux.xi * w4 - 1.0) / (aux.xi - w4);
}

double ratio_DtD_axis(double kappa, double a, double h) {
    const double y = kappa / a, ah = a * h, f = 1.0 - 2.0 * y * y;
    if (y > 1.0) {
        const double x = ah * std::sqrt((y - 1.0) * (y + 1.0));
        if (x > 300.0) {  // cosh would overflow; divide through by it
            const double Q = ah * std::tanh(x) / x;
            return (Q * f + 2.0 * y) / (Q * f - 2.0 * y);
        }
        const double P = ah * sinch(x), C = std::cosh(x);
        return (P * f + 2.0 * y * C) / (P * f - 2.0 * y * C);
    }
    const double x = ah * std::sqrt((1.0 - y) * (1.0 + y));
    const double P = ah * sinc(x), C = std::cos(x);
    return (P * f + 2.0 * y * C) / (P * f - 2.0 * y * C);
}

// --- origin-shifted block values, generic over the evaluation point -------

template <class S>
struct BlockVals {
    S R0{}, Rt0{};    // origin-shifted reflection data
    S dR0{}, dRt0{};  // derivatives (only when requested)
    S ratio{};        // R0 / Rt0, safe at transparency points
};

// Complex evaluation point; derivatives are d/dk.
struct CtxC {
    using S = cplx;
    cplx k;
    const BlockPotential* pot;
    bool wd;

    S gap(double g) const { return std::exp(cplx(0.0, 2.0 * g) * k); }
    S dlog_gap(double g) const { return cplx(0.0, 2.0 * g); }

    BlockVals<S> own(int i) const {
        const BlockWell& w = pot->wells[i];
        const BlockR0 br = block_R0(k, w.depth_root, w.width, wd);
        BlockVals<S> bv;
        bv.R0 = br.R0;
        bv.Rt0 = br.Rt0;
        if (wd) {
            bv.dR0 = br.dR0;
            bv.dRt0 = br.dRt0;
        }
        bv.ratio = ratio_DtD(k, w);
        return bv;
    }
};

// On-axis point k = i kappa; everything real, derivatives are d/dkappa.
struct CtxA {
    using S = double;
    double kappa;
    const BlockPotential* pot;
    bool wd;

    S gap(double g) const { return std::exp(-2.0 * kappa * g); }
    S dlog_gap(double g) const { return -2.0 * g; }

    BlockVals<S> own(int i) const {
        const BlockWell& w = pot->wells[i];
        const BlockR0Axis br = block_R0_axis(kappa, w.depth_root, w.width, wd);
        BlockVals<S> bv;
        bv.R0 = br.R0;
        bv.Rt0 = br.Rt0;
        if (wd) {
            bv.dR0 = br.dR0;
            bv.dRt0 = br.dRt0;
        }
        bv.ratio = ratio_DtD_axis(kappa, w.depth_root, w.width);
        return bv;
    }
};

// --- aggregate R/A recursion ----------------------------------------------

template <class Ctx>
RecursionStateT<typename Ctx::S> chain(const Ctx& c, const BlockPotential& pot, int levels) {
    using S = typename Ctx::S;
    RecursionStateT<S> st;
    bool started = false;
    double lead_gap = 0.0;

    for (int i = 0; i < levels; ++i) {
        const BlockWell& w = pot.wells[i];
        if (w.depth_root == 0.0) {
            if (!started) {
                lead_gap += w.width;
            } else {
                const S gp = c.gap(w.width);
                st.A_cur *= gp;
                st.At_cur /= gp;
                st.B_cur *= gp;
            }
            st.n = i + 1;
            continue;
        }
        const BlockVals<S> pb = c.own(i);
        if (!started) {
            // Seed on the first real block: its aggregate R carries the
            // phase of the transparent stretch of width g separating it from
            // x = 0, while A = e^{-2ikg} cancels that phase in B = A R.
            const S gl = c.gap(lead_gap);
            st.R_cur = pb.R0 * gl;
            st.Rt_cur = pb.Rt0 / gl;
            st.A_cur = S(1.0) / gl;
            st.At_cur = gl;
            st.B_cur = pb.R0;
            started = true;
        } else {
            const S R = st.R_cur, Rt = st.Rt_cur, A = st.A_cur, At = st.At_cur;
            const S Rn = -(R / Rt) * (A * pb.R0 - Rt) / (S(1.0) - A * pb.R0 * R);
            const S An = pb.ratio * (Rt / R) * (A * R - pb.Rt0) / (A * pb.R0 - Rt);
            const S Rtn = -(Rt / R) * (At * pb.Rt0 - R) / (S(1.0) - At * pb.Rt0 * Rt);
            const S Atn = (S(1.0) / pb.ratio) * (R / Rt) * (At * Rt - pb.R0) / (At * pb.Rt0 - R);
            st.R_cur = Rn;
            st.Rt_cur = Rtn;
            st.A_cur = An;
            st.At_cur = Atn;
            st.B_cur = An * Rn;
        }
        st.n = i + 1;
        if (!fin(st.R_cur) || !fin(st.Rt_cur) || !fin(st.A_cur) || !fin(st.At_cur) ||
            !fin(st.B_cur))
            throw pole_error("layer-stripping recursion hit a pole", i);
    }

    if (!started) {  // nothing but transparent stretches
        const S gl = c.gap(lead_gap);
        st.R_cur = st.Rt_cur = st.B_cur = S(0.0);
        st.A_cur = S(1.0) / gl;
        st.At_cur = gl;
        st.n = levels;
    }
    return st;
}

int check_levels(const BlockPotential& pot, int levels) {
    pot.validate();
    if (levels < 0 || levels > static_cast<int>(pot.wells.size()))
        throw invalid_input("recursion levels out of range");
    return levels;
}

int last_nonzero(const BlockPotential& pot) {
    for (int i = static_cast<int>(pot.wells.size()) - 1; i >= 0; --i)
        if (pot.wells[i].depth_root != 0.0) return i;
    return -1;
}

// --- (p, q) propagation ----------------------------------------------------

template <class S>
void pq_rescale(PQStateT<S>& st) {
    const double m = std::max(std::max(std::abs(st.p), std::abs(st.q)),
                              std::max(std::abs(st.dp), std::abs(st.dq)));
    if (m > 0.0 && (m > 1e100 || m < 1e-100)) {
        const int e = std::ilogb(m);
        const double f = std::ldexp(1.0, -e);
        st.p *= f;
        st.q *= f;
        st.dp *= f;
        st.dq *= f;
        st.log2_scale += e;
    }
}

template <class Ctx>
PQStateT<typename Ctx::S> pq_chain(const Ctx& c, const BlockPotential& pot) {
    using S = typename Ctx::S;
    pot.validate();
    const int N = static_cast<int>(pot.wells.size());
    int j0 = -1;
    for (int i = 0; i < N; ++i)
        if (pot.wells[i].depth_root != 0.0) {
            j0 = i;
            break;
        }
    if (j0 < 0) throw invalid_input("pq chain needs at least one nonzero block");

    PQStateT<S> st;
    {
        // Seed (p, q) = (-R0~, 1) on the first real block; a transparent
        // stretch between it and x = 0 does not enter (B starts at the
        // origin-shifted R0 regardless).
        const BlockVals<S> pb = c.own(j0);
        st.p = -pb.Rt0;
        st.q = S(1.0);
        if (c.wd) {
            st.dp = -pb.dRt0;
            st.dq = S(0.0);
        }
        st.n = j0 + 1;
    }

    BlockVals<S> prev = c.own(j0);
    for (int i = j0 + 1; i < N; ++i) {
        const BlockWell& w = pot.wells[i];
        if (w.depth_root == 0.0) {
            const S G = c.gap(w.width);
            if (c.wd) st.dp = (st.dp + st.p * c.dlog_gap(w.width)) * G;
            st.p *= G;
            st.n = i + 1;
            continue;
        }
        const BlockVals<S> cur = c.own(i);

        S m11 = -prev.R0, m12 = -cur.Rt0 * prev.Rt0;
        S m21 = cur.R0 * prev.R0, m22 = prev.Rt0;
        S d11{}, d12{}, d21{}, d22{};
        if (c.wd) {
            d11 = -prev.dR0;
            d12 = -(cur.dRt0 * prev.Rt0 + cur.Rt0 * prev.dRt0);
            d21 = cur.dR0 * prev.R0 + cur.R0 * prev.dR0;
            d22 = prev.dRt0;
        }
        // Keep the factor itself in range; scaling M and M' together just
        // rescales the whole state, which the shared exponent absorbs.
        const double mm = std::max(std::max(std::abs(m11), std::abs(m12)),
                                   std::max(std::abs(m21), std::abs(m22)));
        if (mm > 1e100) {
            const int e = std::ilogb(mm);
            const double f = std::ldexp(1.0, -e);
            m11 *= f;
            m12 *= f;
            m21 *= f;
            m22 *= f;
            d11 *= f;
            d12 *= f;
            d21 *= f;
            d22 *= f;
            st.log2_scale += e;
        }

        const S p = st.p, q = st.q, dp = st.dp, dq = st.dq;
        st.p = m11 * p + m12 * q;
        st.q = m21 * p + m22 * q;
        if (c.wd) {
            st.dp = m11 * dp + m12 * dq + d11 * p + d12 * q;
            st.dq = m21 * dp + m22 * dq + d21 * p + d22 * q;
        }
        st.n = i + 1;
        pq_rescale(st);
        if (!fin(st.p) || !fin(st.q) || !fin(st.dp) || !fin(st.dq))
            throw pole_error("pq propagation hit a pole", i);
        prev = cur;
    }
    return st;
}

}  // namespace

// --- public wrappers -------------------------------------------------------

RecursionState run_recursion(cplx k, const BlockPotential& pot, int levels) {
    check_levels(pot, levels);
    return chain(CtxC{k, &pot, false}, pot, levels);
}

RecursionStateAxis run_recursion_axis(double kappa, const BlockPotential& pot, int levels) {
    check_levels(pot, levels);
    if (!(kappa > 0.0)) throw invalid_input("run_recursion_axis: kappa must be positive");
    return chain(CtxA{kappa, &pot, false}, pot, levels);
}

cplx left_reflection(const RecursionState& state, cplx k, double b_n) {
    return state.B_cur * std::exp(cplx(0.0, -2.0 * b_n) * k);
}

PQState pq_propagate(cplx k, const BlockPotential& pot, bool with_derivative) {
    return pq_chain(CtxC{k, &pot, with_derivative}, pot);
}

PQStateAxis pq_propagate_axis(double kappa, const BlockPotential& pot, bool with_derivative) {
    if (!(kappa > 0.0)) throw invalid_input("pq_propagate_axis: kappa must be positive");
    return pq_chain(CtxA{kappa, &pot, with_derivative}, pot);
}

cplx pq_B(const PQState& st, cplx k, const BlockPotential& pot) {
    const int j = last_nonzero(pot);
    if (j < 0) throw invalid_input("pq_B: potential has no nonzero block");
    return -ratio_DtD(k, pot.wells[j]) * (st.p / st.q);
}

double pq_B_axis(const PQStateAxis& st, double kappa, const BlockPotential& pot) {
    const int j = last_nonzero(pot);
    if (j < 0) throw invalid_input("pq_B_axis: potential has no nonzero block");
    const BlockWell& w = pot.wells[j];
    return -ratio_DtD_axis(kappa, w.depth_root, w.width) * (st.p / st.q);
}

// --- transition matrices ---------------------------------------------------

TransitionMatrix compose_lambda(cplx k, const BlockPotential& pot) {
    pot.validate();
    if (k == cplx(0.0)) throw invalid_input("compose_lambda: k = 0 is singular");
    TransitionMatrix out;  // identity
    const cplx iu(0.0, 1.0);
    for (std::size_t i = 0; i < pot.wells.size(); ++i) {
        const BlockWell& w = pot.wells[i];
        if (w.depth_root == 0.0) continue;
        const double a = w.depth_root, h = w.width;
        const double bp = pot.grid[i], bn = pot.grid[i + 1];

        // Entries straight from the closed forms (no R/T quotient, so bound
        // states of the single block are not spurious singularities):
        //   1/T   = (xi - w^4) e^{-iah/omega} / (1 - w^4)
        //   R/T   = w^2 (1 - xi) e^{-iah/omega} / (1 - w^4)
        //   1/T~  = (1 - xi w^4) e^{+iah/omega} / (xi (1 - w^4))
        const BranchedAux aux = omega_xi(k, w);
        const cplx w2 = aux.omega * aux.omega, w4 = w2 * w2, xi = aux.xi;
        const cplx em = std::exp(-iu * (a * h) / aux.omega);
        const cplx den = 1.0 - w4;
        const cplx RoverT = w2 * (1.0 - xi) * em / den;

        std::array<std::array<cplx, 2>, 2> f;
        f[0][0] = (xi - w4) * em / den;
        f[0][1] = -RoverT * std::exp(iu * (2.0 * bp) * k);
        f[1][0] = RoverT * std::exp(-iu * (2.0 * bn) * k);
        f[1][1] = (1.0 - xi * w4) / (xi * den * em);

        TransitionMatrix next;
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
                next.m[r][s] = f[r][0] * out.m[0][s] + f[r][1] * out.m[1][s];
                if (!fin(next.m[r][s]))
                    throw pole_error("transition factor is singular here (branch point?)",
                                     static_cast<int>(i));
            }
        out = next;
    }
    return out;
}

LambdaAxis compose_lambda_axis(double kappa, const BlockPotential& pot) {
    pot.validate();
    if (!(kappa > 0.0)) throw invalid_input("compose_lambda_axis: kappa must be positive");
    LambdaAxis out{{{{1.0, 0.0}, {0.0, 1.0}}}, 0};

    for (std::size_t i = 0; i < pot.wells.size(); ++i) {
        const BlockWell& w = pot.wells[i];
        if (w.depth_root == 0.0) continue;
        const double a = w.depth_root, h = w.width;
        const double bp = pot.grid[i];
        const double y = kappa / a, ah = a * h, ff = 1.0 - 2.0 * y * y;
        const double kh = kappa * h;

        // Pm = e^{-kappa h} P, Cm = e^{-kappa h} C, and the e^{+kappa h}
        // counterparts; assembled from one-sided exponentials when cosh
        // would overflow (x can approach kappa h from below).
        double Pm, Cm, Pp, Cp;
        if (y > 1.0) {
            const double x = ah * std::sqrt((y - 1.0) * (y + 1.0));
            if (x > 300.0) {
                const double Em = std::exp(x - kh), En = std::exp(-x - kh);
                const double Fp = std::exp(x + kh), Fn = std::exp(kh - x);
                Pm = ah * (Em - En) / (2.0 * x);
                Cm = 0.5 * (Em + En);
                Pp = ah * (Fp - Fn) / (2.0 * x);
                Cp = 0.5 * (Fp + Fn);
            } else {
                const double P = ah * sinch(x), C = std::cosh(x);
                const double em = std::exp(-kh), ep = std::exp(kh);
                Pm = P * em;
                Cm = C * em;
                Pp = P * ep;
                Cp = C * ep;
            }
        } else {
            const double x = ah * std::sqrt((1.0 - y) * (1.0 + y));
            const double P = ah * sinc(x), C = std::cos(x);
            const double em = std::exp(-kh), ep = std::exp(kh);
            Pm = P * em;
            Cm = C * em;
            Pp = P * ep;
            Cp = C * ep;
        }

        const double u = std::exp(-2.0 * kappa * bp);
        std::array<std::array<double, 2>, 2> f;
        f[0][0] = -(Pm * ff - 2.0 * y * Cm) / (2.0 * y);
        f[0][1] = -u * Pm / (2.0 * y);
        f[1][0] = (Pp / u) / (2.0 * y);
        f[1][1] = (Pp * ff + 2.0 * y * Cp) / (2.0 * y);

        LambdaAxis next;
        next.log2_scale = out.log2_scale;
        double mx = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
                next.m[r][s] = f[r][0] * out.m[0][s] + f[r][1] * out.m[1][s];
                if (!fin(next.m[r][s]))
                    throw pole_error("axis transition product overflowed",
                                     static_cast<int>(i));
                mx = std::max(mx, std::abs(next.m[r][s]));
            }
        if (mx > 1e150) {
            const int e = std::ilogb(mx);
            const double sc = std::ldexp(1.0, -e);
            for (auto& row : next.m)
                for (double& v : row) v *= sc;
            next.log2_scale += e;
        }
        out = next;
    }
    return out;
}

// --- bound-state bookkeeping ------------------------------------------------

std::vector<double> exceptional_points(const BlockPotential& pot) {
    pot.validate();
    std::vector<double> pts;
    const int jN = last_nonzero(pot);
    if (jN < 0) return pts;
    pts.push_back(pot.wells[jN].depth_root);  // kappa = a_N

    for (int i = 0; i < jN; ++i) {  // blocks 1..N-1
        const double a = pot.wells[i].depth_root, h = pot.wells[i].width;
        if (a == 0.0) continue;
        const int m_max = static_cast<int>(std::floor(a * h / PI));
        for (int m = 0; m <= m_max; ++m) {
            const double t = a * a - (PI * m / h) * (PI * m / h);
            if (t > 0.0) pts.push_back(std::sqrt(t));
        }
    }
    std::sort(pts.begin(), pts.end(), std::greater<double>());
    std::vector<double> dedup;
    for (double p : pts)
        if (dedup.empty() || std::abs(dedup.back() - p) > 1e-12 * std::max(1.0, p))
            dedup.push_back(p);
    return dedup;
}

namespace {

// Common core for residue_B / norming_from_residue: the purely imaginary
// residue is i*rho with rho real.
double residue_rho(double kappa, const BlockPotential& pot) {
    if (!(kappa > 0.0)) throw invalid_input("residue: kappa must be positive");
    for (double e : exceptional_points(pot))
        if (std::abs(kappa - e) < 1e-10 * std::max(1.0, kappa))
            throw invalid_input(
                "residue: kappa coincides with an exceptional point; a zero of q there "
                "does not certify a bound state");

    const int j = last_nonzero(pot);
    if (j < 0) throw invalid_input("residue: potential has no nonzero block");

    int nonzero_count = 0;
    for (const BlockWell& w : pot.wells)
        if (w.depth_root != 0.0) ++nonzero_count;
    if (nonzero_count == 1) {
        // One real block: q = 1 identically and the pole of B sits in the
        // closed-form prefactor, so use the single-block residue directly
        // (trailing transparent stretches contribute e^{-2 kappa g}).
        const BlockWell& w = pot.wells[j];
        if (!(kappa < w.depth_root))
            throw invalid_input("residue: kappa is not a bound state of the single block");
        const double y = kappa / w.depth_root;
        const double c2_own = 2.0 * kappa * (1.0 - y * y) / (2.0 + w.width * kappa);
        const double g_trail = pot.grid.back() - pot.grid[j + 1];
        return c2_own * std::exp(-2.0 * kappa * g_trail);
    }

    const PQStateAxis st = pq_propagate_axis(kappa, pot, true);
    if (st.dq == 0.0)
        throw invalid_input("residue: q has vanishing derivative; pole is not simple");

    // Res_{k = i kappa} B = -(R0_N/R0~_N) p / (dq/dk), and dq/dk = -i dq/dkappa.
    const BlockWell& wN = pot.wells[j];
    const double ratio = ratio_DtD_axis(kappa, wN.depth_root, wN.width);
    if (!std::isfinite(ratio) || std::abs(ratio) > 1e150 || ratio == 0.0)
        throw invalid_input("residue: kappa sits on a pole/zero of the last block's ratio");
    return -ratio * (st.p / st.dq);
}

double a_last_axis_core(double kappa, const BlockPotential& pot) {
    const int j = last_nonzero(pot);
    if (j < 0) throw invalid_input("a_last_axis: potential has no nonzero block");
    const CtxA c{kappa, &pot, false};

    bool has_prior = false;  // any nonzero block before j?
    for (int i = 0; i < j; ++i)
        if (pot.wells[i].depth_root != 0.0) {
            has_prior = true;
            break;
        }

    double A;
    const RecursionStateAxis st = chain(c, pot, j);
    if (!has_prior) {
        // Single nonzero block: A = e^{-2ikg} for the adjoining gap g.
        A = st.A_cur;
    } else {
        const BlockVals<double> pb = c.own(j);
        A = pb.ratio * (st.Rt_cur / st.R_cur) * (st.A_cur * st.R_cur - pb.Rt0) /
            (st.A_cur * pb.R0 - st.Rt_cur);
    }
    // Trailing transparent stretches only dephase A.
    for (std::size_t i = j + 1; i < pot.wells.size(); ++i) A *= c.gap(pot.wells[i].width);
    if (!std::isfinite(A)) throw pole_error("a_last_axis: intermediate pole", j);
    return A;
}

}  // namespace

double a_last_axis(double kappa, const BlockPotential& pot, bool* perturbed) {
    pot.validate();
    if (!(kappa > 0.0)) throw invalid_input("a_last_axis: kappa must be positive");
    if (perturbed) *perturbed = false;
    try {
        return a_last_axis_core(kappa, pot);
    } catch (const pole_error&) {
        // An intermediate partial potential shares the bound state; nudge off.
        if (perturbed) *perturbed = true;
        return a_last_axis_core(kappa * (1.0 + 1e-9), pot);
    }
}

cplx residue_B(double kappa, const BlockPotential& pot) {
    pot.validate();
    return cplx(0.0, residue_rho(kappa, pot));
}

double norming_from_residue(double kappa, const BlockPotential& pot) {
    pot.validate();
    const double rho = residue_rho(kappa, pot);
    const double A = a_last_axis(kappa, pot);
    const double c2 = rho / A;
    if (!(c2 > 0.0) || !std::isfinite(c2))
        throw invalid_input(
            "norming_from_residue: nonpositive norming constant; kappa is unlikely to be a "
            "bound state of this potential");
    return c2;
}

}  // namespace kdvist
