#include "kdvist/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "kdvist/fragmentation.hpp"

namespace kdvist {

namespace {

double max_depth_root(const BlockPotential& pot) {
    double m = 0.0;
    for (const BlockWell& w : pot.wells) m = std::max(m, w.depth_root);
    return m;
}

int count_nonzero(const BlockPotential& pot) {
    int n = 0;
    for (const BlockWell& w : pot.wells)
        if (w.depth_root != 0.0) ++n;
    return n;
}

// --- axis-real target functions ---------------------------------------------

// NaN marks an evaluation that hit a pole or other invalid point; the
// root-finding layers treat such samples as missing.
double eval_target(BoundMethod method, double kappa, const BlockPotential& pot) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        switch (method) {
            case BoundMethod::inv_R: {
                const RecursionStateAxis st =
                    run_recursion_axis(kappa, pot, static_cast<int>(pot.wells.size()));
                const double v = 1.0 / st.R_cur;
                return std::isfinite(v) ? v : nan;
            }
            case BoundMethod::inv_B: {
                const PQStateAxis st = pq_propagate_axis(kappa, pot, false);
                const double B = pq_B_axis(st, kappa, pot);
                const double v = 1.0 / B;
                return std::isfinite(v) ? v : nan;
            }
            case BoundMethod::q_zero: {
                const PQStateAxis st = pq_propagate_axis(kappa, pot, false);
                const double m = std::max(std::abs(st.p), std::abs(st.q));
                if (!(m > 0.0)) return nan;
                return st.q / m;  // scale-free, keeps the sign of q
            }
        }
    } catch (const pole_error&) {
    } catch (const invalid_input&) {
    }
    return nan;
}

// --- bracketed root polishing -----------------------------------------------

struct Bracket {
    double lo, hi, flo, fhi;
};

// Samples f on a geometric ladder seed +- reach and collects every interval
// between consecutive finite samples whose values change sign, ordered by
// distance from the seed.  A sign change may straddle a root OR a pole /
// plateau jump of the target; the caller tries them in order and keeps the
// first one whose refined point actually collapses f.
std::vector<Bracket> candidate_brackets(const std::function<double(double)>& f, double seed,
                                        double kap_floor, double kap_ceil,
                                        double half_width_max) {
    std::vector<std::pair<double, double>> samples;  // (position, finite value)
    auto probe = [&](double x) {
        if (x < kap_floor || x > kap_ceil) return;
        const double v = f(x);
        if (std::isfinite(v)) samples.emplace_back(x, v);
    };
    probe(seed);
    for (double reach = std::max(1e-6 * half_width_max, 1e-12); reach <= half_width_max;
         reach *= 2.0) {
        probe(seed - reach);
        probe(seed + reach);
    }
    std::sort(samples.begin(), samples.end());

    std::vector<Bracket> out;
    for (const auto& [x, v] : samples)  // an exact zero IS the root; a sign
        if (v == 0.0) out.push_back(Bracket{x, x, 0.0, 0.0});  // test would mask it
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& [xl, vl] = samples[i - 1];
        const auto& [xr, vr] = samples[i];
        if (vl * vr < 0.0) out.push_back(Bracket{xl, xr, vl, vr});
    }
    std::sort(out.begin(), out.end(), [seed](const Bracket& a, const Bracket& b) {
        const double da = std::min(std::abs(a.lo - seed), std::abs(a.hi - seed));
        const double db = std::min(std::abs(b.lo - seed), std::abs(b.hi - seed));
        return da < db;
    });
    return out;
}

// Classic Brent root bracketing; the bracket must straddle a sign change.
double brent(const std::function<double(double)>& f, Bracket br) {
    double a = br.lo, b = br.hi, fa = br.flo, fb = br.fhi;
    double c = a, fc = fa, d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 1e-300;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        const double fnb = f(b);
        if (!std::isfinite(fnb)) return b;  // pole grazed: best point so far
        fb = fnb;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
    }
    return b;
}

// Handful of Newton steps on q with the analytic derivative, keeping the
// iterate only while the residual improves.
double newton_polish_q(double kappa, const BlockPotential& pot) {
    for (int i = 0; i < 3; ++i) {
        try {
            const PQStateAxis st = pq_propagate_axis(kappa, pot, true);
            if (st.dq == 0.0) break;
            const double step = st.q / st.dq;
            const double next = kappa - step;
            if (!(next > 0.0) || !std::isfinite(next)) break;
            const PQStateAxis st2 = pq_propagate_axis(next, pot, false);
            if (std::abs(st2.q) >= std::abs(st.q)) break;
            kappa = next;
        } catch (const pole_error&) {
            break;
        }
    }
    return kappa;
}

// A zero of q at an exceptional point certifies nothing; keep it only if
// B_N actually has a pole there, i.e. 1/B_N changes sign across kappa AND
// collapses towards it (|1/B| grows with distance on both sides).  A mere
// sign change is not enough: 1/B also flips across its own poles, which is
// exactly what happens when p and q share a zero and B stays finite.
bool confirmed_pole_of_B(double kappa, const BlockPotential& pot) {
    const double d = 1e-7 * std::max(1.0, kappa);
    const double lo = eval_target(BoundMethod::inv_B, kappa - d, pot);
    const double hi = eval_target(BoundMethod::inv_B, kappa + d, pot);
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo * hi >= 0.0) return false;
    const double lo10 = eval_target(BoundMethod::inv_B, kappa - 10.0 * d, pot);
    const double hi10 = eval_target(BoundMethod::inv_B, kappa + 10.0 * d, pot);
    if (!std::isfinite(lo10) || !std::isfinite(hi10)) return false;
    return std::abs(lo10) > 3.0 * std::abs(lo) && std::abs(hi10) > 3.0 * std::abs(hi);
}

}  // namespace

// --- spectral seeding --------------------------------------------------------

SeedEstimates spectral_seed_profile(const std::function<double(double)>& V, int grid_size,
                                    double xmin, double xmax) {
    if (grid_size < 64 || (grid_size & (grid_size - 1)) != 0)
        throw invalid_input("spectral_seed: grid_size must be a power of two >= 64");
    if (!(xmax > xmin)) throw invalid_input("spectral_seed: empty domain");

    // Periodic Fourier second-derivative matrix on N points:
    //   D2_jj   = -pi^2 / (3 h^2) - 1/6,
    //   D2_jl   = -(-1)^{j-l} / (2 sin^2((j-l) h / 2)),     h = 2 pi / N,
    // scaled by (2 pi / L)^2 for a domain of length L.
    const int N = grid_size;
    const double L = xmax - xmin;
    const double h = 2.0 * PI / N;
    const double scale = (2.0 * PI / L) * (2.0 * PI / L);

    Eigen::MatrixXd H(N, N);
    for (int j = 0; j < N; ++j) {
        for (int l = 0; l < N; ++l) {
            if (j == l) {
                H(j, l) = scale * (PI * PI / (3.0 * h * h) + 1.0 / 6.0);  // -D2 diagonal
            } else {
                const double s = std::sin(0.5 * h * (j - l));
                const double sign = ((j - l) % 2 == 0) ? 1.0 : -1.0;
                H(j, l) = scale * sign / (2.0 * s * s);
            }
        }
        H(j, j) += V(xmin + L * j / N);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
        throw invalid_input("spectral_seed: eigensolver failed to converge");

    SeedEstimates out;
    out.source = "spectral-matrix";
    const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
    for (int i = 0; i < N && ev(i) < 0.0; ++i) {
        const double kap = std::sqrt(-ev(i));
        if (kap > 0.0) out.kappas_guess.push_back(kap);
    }
    std::sort(out.kappas_guess.begin(), out.kappas_guess.end(), std::greater<double>());
    return out;
}

SeedEstimates spectral_seed(const BlockPotential& pot, int grid_size, double xmin, double xmax) {
    pot.validate();
    const double sup_lo = pot.offset - pot.span(), sup_hi = pot.offset;
    if (xmax > xmin && (xmin > sup_lo || xmax < sup_hi))
        throw invalid_input("spectral_seed: domain must contain the support of the potential");

    SeedEstimates out = spectral_seed_profile(
        [&pot](double x) { return potential_value(pot, x); }, grid_size, xmin, xmax);
    // V >= -a_max^2 bounds the discrete spectrum of the block potential.
    const double a_max = max_depth_root(pot);
    for (double& kap : out.kappas_guess) kap = std::min(kap, a_max);
    std::erase_if(out.kappas_guess, [](double k) { return !(k > 0.0); });
    return out;
}

// --- root location ------------------------------------------------------------

std::vector<double> find_bound_states(const BlockPotential& pot, const SeedEstimates& seeds,
                                      BoundMethod method, RootDiagnostics* diag,
                                      double fine_scan_step) {
    pot.validate();
    const double a_max = max_depth_root(pot);
    if (a_max == 0.0) return {};

    // q is constant along a one-block chain (the pole of B_N lives in the
    // closed-form prefactor), so fall back to 1/R for the root search.
    BoundMethod eff = method;
    if (method == BoundMethod::q_zero && count_nonzero(pot) == 1) eff = BoundMethod::inv_R;

    const auto f = [&](double kap) { return eval_target(eff, kap, pot); };
    const double kap_floor = 1e-12 * std::max(1.0, a_max);
    const double kap_ceil = a_max * (1.0 - 1e-14);

    std::vector<double> roots;
    const std::vector<double> exc =
        (eff == BoundMethod::q_zero) ? exceptional_points(pot) : std::vector<double>{};

    // A sign change can also straddle a pole or a plateau jump of the target
    // (1/R flips across a zero of R; the normalized q jumps where p and q
    // share a zero); only a point where f itself collapses is a root.  At a
    // genuine root the refined |f| is many orders below both endpoints,
    // while at a pole/jump it matches or exceeds them.
    auto accept = [&](double root, const Bracket& br) -> bool {
        if (!(root > 0.0) || !std::isfinite(root)) return false;
        const double fr = f(root);
        const double ref = std::max(std::abs(br.flo), std::abs(br.fhi));
        return std::isfinite(fr) && std::abs(fr) <= 1e-2 * ref;
    };
    // A rejected q-zero sign change sitting on an exceptional point is the
    // textbook false positive; report it as discarded, not merely failed.
    auto note_reject = [&](double r) {
        if (!diag || !(r > 0.0) || !std::isfinite(r)) return;
        for (double e : exc)
            if (std::abs(r - e) < 1e-9 * std::max(1.0, e) && !confirmed_pole_of_B(r, pot)) {
                for (double d : diag->discarded_exceptional)
                    if (std::abs(d - r) < 1e-9 * std::max(1.0, r)) return;
                diag->discarded_exceptional.push_back(r);
                return;
            }
    };
    auto polish = [&](double seed) -> bool {
        seed = std::clamp(seed, kap_floor, kap_ceil);
        for (const Bracket& br :
             candidate_brackets(f, seed, kap_floor, kap_ceil, 0.05 * a_max)) {
            double root = brent(f, br);
            if (!accept(root, br)) {
                note_reject(root);
                continue;
            }
            if (eff == BoundMethod::q_zero) root = newton_polish_q(root, pot);
            roots.push_back(root);
            return true;
        }
        return false;
    };

    for (double s : seeds.kappas_guess)
        if (!polish(s) && diag) diag->failed_seeds.push_back(s);

    // Supplementary scan below the lowest certain point: shallow bound
    // states cluster towards kappa = 0 and matrix estimates miss them.
    double scan_hi = kap_ceil;
    for (double r : roots) scan_hi = std::min(scan_hi, r);
    for (double s : seeds.kappas_guess) scan_hi = std::min(scan_hi, s);
    const double step =
        fine_scan_step > 0.0 ? fine_scan_step : std::max(2e-3 * a_max, 1e-9);
    double prev_k = scan_hi * (1.0 - 1e-9);
    double prev_f = f(prev_k);
    for (double k = prev_k - step; k > kap_floor; k -= step) {
        const double fk = f(k);
        if (fk == 0.0) {
            roots.push_back(eff == BoundMethod::q_zero ? newton_polish_q(k, pot) : k);
        } else if (std::isfinite(fk) && std::isfinite(prev_f) && fk * prev_f < 0.0) {
            const Bracket br{k, prev_k, fk, prev_f};
            double root = brent(f, br);
            if (accept(root, br)) {
                if (eff == BoundMethod::q_zero) root = newton_polish_q(root, pot);
                roots.push_back(root);
            } else {
                note_reject(root);
            }
        }
        if (std::isfinite(fk)) {
            prev_k = k;
            prev_f = fk;
        }
    }

    // Deduplicate and screen q-zeros that sit on exceptional points.
    std::sort(roots.begin(), roots.end(), std::greater<double>());
    std::vector<double> out;
    const double gap = 1e-8 * a_max;
    for (double r : roots) {
        if (!out.empty() && out.back() - r <= gap) {
            if (diag) ++diag->deduplicated;
            continue;
        }
        out.push_back(r);
    }
    if (eff == BoundMethod::q_zero) {
        std::vector<double> kept;
        for (double r : out) {
            bool on_exceptional = false;
            for (double e : exc)
                if (std::abs(r - e) < 1e-10 * std::max(1.0, e)) on_exceptional = true;
            if (on_exceptional && !confirmed_pole_of_B(r, pot)) {
                if (diag) diag->discarded_exceptional.push_back(r);
                continue;
            }
            kept.push_back(r);
        }
        out = std::move(kept);
    }
    return out;
}

// --- norming constants ---------------------------------------------------------

namespace {

// Scale-aware central difference of a = 1/T on the axis: the three factors
// carry separate power-of-two exponents that must be aligned before mixing.
double ab_ratio_c2(double kappa, const BlockPotential& pot, double eta) {
    const double eta_eff = std::min(eta, kappa);  // keep kappa - eta/2 positive
    const LambdaAxis lp = compose_lambda_axis(kappa + 0.5 * eta_eff, pot);
    const LambdaAxis lm = compose_lambda_axis(kappa - 0.5 * eta_eff, pot);
    const LambdaAxis l0 = compose_lambda_axis(kappa, pot);

    const long smax = std::max(lp.log2_scale, lm.log2_scale);
    const double ap = std::ldexp(lp.m[0][0], static_cast<int>(lp.log2_scale - smax));
    const double am = std::ldexp(lm.m[0][0], static_cast<int>(lm.log2_scale - smax));
    const double b0 = std::ldexp(l0.m[0][1], static_cast<int>(l0.log2_scale - smax));
    const double da = ap - am;
    if (da == 0.0 || !std::isfinite(da))
        throw invalid_input("norming_constants: vanishing derivative of a; kappa is not a "
                            "simple zero of a");
    // c^2 = i b / a' with a' = (a_+ - a_-) / (i eta)  =>  c^2 = -eta b / (a_+ - a_-)
    return -eta_eff * b0 / da;
}

}  // namespace

DiscreteSpectrum norming_constants(const BlockPotential& pot, const std::vector<double>& kappas,
                                   NormingMethod method, double eta) {
    pot.validate();
    if (method == NormingMethod::ab_ratio && !(eta > 0.0))
        throw invalid_input("norming_constants: eta must be positive");

    struct Row {
        double kappa, c2;
        std::string tag;
    };
    std::vector<Row> rows;
    rows.reserve(kappas.size());
    for (double kap : kappas) {
        if (!(kap > 0.0) || !std::isfinite(kap))
            throw invalid_input("norming_constants: kappa must be positive and finite");
        double c2;
        std::string tag;
        if (method == NormingMethod::residue) {
            c2 = norming_from_residue(kap, pot);
            tag = "residue";
        } else {
            c2 = ab_ratio_c2(kap, pot, eta);
            std::ostringstream os;
            os << "ab_ratio(eta=" << eta << ")";
            tag = os.str();
        }
        c2 *= std::exp(2.0 * kap * pot.offset);  // back to original coordinates
        if (!(c2 > 0.0) || !std::isfinite(c2))
            throw invalid_input("norming_constants: nonpositive c^2; kappa is unlikely to be "
                                "a bound state of this potential");
        rows.push_back({kap, c2, std::move(tag)});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.kappa > b.kappa; });

    DiscreteSpectrum out;
    for (Row& r : rows) {
        out.kappas.push_back(r.kappa);
        out.norming.push_back(r.c2);
        out.method_tags.push_back(std::move(r.tag));
    }
    return out;
}

}  // namespace kdvist
