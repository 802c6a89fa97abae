#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kdvist/kdv.hpp"
#include "kdvist/types.hpp"

using namespace kdvist;

namespace {

// Frozen three-state reference data for the depth-4, width-4 well
// (cross-checked elsewhere against closed forms).
const std::vector<double> KAPPA_REF = {1.899448036751944, 1.571342556813314,
                                       0.876610362727433};
const std::vector<double> C2_REF = {0.038798932148319, 0.145167980693995,
                                    0.257227284424067};

DiscreteSpectrum three_state() { return {KAPPA_REF, C2_REF, {}}; }

DiscreteSpectrum one_soliton() { return {{1.0}, {2.0}, {}}; }

double naive_soliton(double kappa, double x, double t, double phase = 0.0) {
    const double c = std::cosh(kappa * x - 4.0 * kappa * kappa * kappa * t + phase);
    const double s = 1.0 / (c * c);
    return -2.0 * kappa * kappa * (std::isfinite(s) ? s : 0.0);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

}  // namespace

TEST_CASE("evolution preserves kappas and reduces to identity at time zero") {
    const SolitonTrain tr = evolve(three_state(), 0.0);
    CHECK(tr.t == 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(tr.kappas[i] == KAPPA_REF[i]);
        CHECK(tr.norming0[i] == C2_REF[i]);
        CHECK(tr.gammas[i] > 0.0);
        CHECK(std::isfinite(tr.gammas[i]));
    }
    // leading soliton has the bare phase factor 2*kappa/c^2 (empty product)
    CHECK(std::abs(tr.gammas[0] - 2.0 * KAPPA_REF[0] / C2_REF[0]) <
          1e-12 * tr.gammas[0]);
    // stored logs are consistent with the stored factors
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(std::exp(2.0 * tr.log_sqrt_gamma[i]) - tr.gammas[i]) <
              1e-12 * tr.gammas[i]);

    const SolitonTrain one = evolve(one_soliton(), 3.25);
    CHECK(std::abs(one.gammas[0] - 1.0) < 1e-14);
    CHECK(std::abs(one.log_sqrt_gamma[0]) < 1e-14);
}

TEST_CASE("evolution rejects malformed data") {
    CHECK_THROWS_AS(evolve({{1.5, 1.5}, {1.0, 1.0}, {}}, 0.0), invalid_input);
    CHECK_THROWS_AS(evolve({{0.5, 1.5}, {1.0, 1.0}, {}}, 0.0), invalid_input);
    CHECK_THROWS_AS(evolve(one_soliton(), -0.5), invalid_input);
    CHECK_THROWS_AS(evolve({{1.0}, {-2.0}, {}}, 0.0), invalid_input);
    CHECK_THROWS_AS(evolve({{1.0}, {2.0, 3.0}, {}}, 0.0), invalid_input);
    CHECK_THROWS_AS(evolve({{}, {}, {}}, 0.0), invalid_input);
}

TEST_CASE("one-soliton closed form is reproduced to near round-off") {
    for (double t : {0.0, 1.0, 7.5}) {
        const SolitonTrain tr = evolve(one_soliton(), t);
        const std::vector<double> xs = linspace(4.0 * t - 300.0, 4.0 * t + 300.0, 3001);
        const std::vector<double> u = u_asymptotic(tr, xs);
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(std::abs(u[i] - naive_soliton(1.0, xs[i], t)) < 1e-10);
    }
}

TEST_CASE("soliton minimum travels at speed four kappa squared") {
    const double kappa = 1.3, c2 = 0.9;
    const DiscreteSpectrum spec{{kappa}, {c2}, {}};
    auto argmin = [&](double t) {
        const double guess = 4.0 * kappa * kappa * t;
        const std::vector<double> xs = linspace(guess - 3.0, guess + 3.0, 60001);
        const std::vector<double> u = u_asymptotic(evolve(spec, t), xs);
        std::size_t best = 0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (u[i] < u[best]) best = i;
        return xs[best];
    };
    const double speed = argmin(6.0) - argmin(5.0);
    CHECK(std::abs(speed - 4.0 * kappa * kappa) < 5e-4);
}

TEST_CASE("deeper solitons run ahead at large time") {
    const double t = 6.0;
    const SolitonTrain tr = evolve(three_state(), t);
    std::vector<double> centers(3);
    for (std::size_t n = 0; n < 3; ++n) {
        const double k = tr.kappas[n];
        centers[n] = (4.0 * k * k * k * t - tr.log_sqrt_gamma[n]) / k;
        // each center is a local minimum with the single-soliton depth
        const std::vector<double> probe = {centers[n] - 0.01, centers[n], centers[n] + 0.01};
        const std::vector<double> u = u_asymptotic(tr, probe);
        CHECK(u[1] < u[0]);
        CHECK(u[1] < u[2]);
        CHECK(std::abs(u[1] + 2.0 * k * k) < 1e-3);
    }
    CHECK(centers[0] > centers[1]);
    CHECK(centers[1] > centers[2]);
}

TEST_CASE("asymptotic profile satisfies the KdV equation") {
    const DiscreteSpectrum spec{{1.1}, {0.7}, {}};
    const double t0 = 1.0, dt = 2.5e-4, h = 1e-3;
    const SolitonTrain trm = evolve(spec, t0 - dt);
    const SolitonTrain tr0 = evolve(spec, t0);
    const SolitonTrain trp = evolve(spec, t0 + dt);

    const double center =
        (4.0 * std::pow(1.1, 3) * t0 - tr0.log_sqrt_gamma[0]) / 1.1;
    double worst = 0.0;
    for (double x = center - 5.0; x <= center + 5.0; x += 0.05) {
        const std::vector<double> xs = {x - 2.0 * h, x - h, x, x + h, x + 2.0 * h};
        const std::vector<double> u = u_asymptotic(tr0, xs);
        const double ut = (u_asymptotic(trp, {x})[0] - u_asymptotic(trm, {x})[0]) / (2.0 * dt);
        const double ux = (u[3] - u[1]) / (2.0 * h);
        const double uxxx = (-u[0] + 2.0 * u[1] - 2.0 * u[3] + u[4]) / (2.0 * h * h * h);
        worst = std::max(worst, std::abs(ut - 6.0 * u[2] * ux + uxxx));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("kernel determinant is positive and decreasing in x") {
    const DiscreteSpectrum spec = three_state();
    double prev = -1.0;
    for (double x = 15.0; x >= -10.0; x -= 0.5) {
        const double g = log_det_kernel_matrix(spec, 1.0, x);
        CHECK(g > 0.0);  // det(I + C) > 1 for the Gram-type kernel
        CHECK(g > prev);
        prev = g;
    }
}

TEST_CASE("one-by-one determinant matches its explicit logarithm") {
    const DiscreteSpectrum spec = one_soliton();
    const double t = 2.0;
    for (double x = 4.0 * t - 8.0; x <= 4.0 * t + 8.0; x += 0.25) {
        const double g = log_det_kernel_matrix(spec, t, x);
        const double explicit_g = std::log1p((2.0 / 2.0) * std::exp(-2.0 * x + 8.0 * t));
        CHECK(std::abs(g - explicit_g) < 1e-12 * std::max(1.0, std::abs(explicit_g)));
    }
}

TEST_CASE("determinant reconstruction matches the one-soliton within stencil error") {
    const DiscreteSpectrum spec = one_soliton();
    for (double t : {0.0, 2.0}) {
        const std::vector<double> xs = linspace(4.0 * t - 8.0, 4.0 * t + 8.0, 321);
        const std::vector<double> u = u_determinant(spec, t, xs);
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(std::abs(u[i] - naive_soliton(1.0, xs[i], t)) < 1e-5);
    }
    CHECK_THROWS_AS(u_determinant(spec, 0.0, {0.0}, 0.0), invalid_input);
    CHECK_THROWS_AS(u_determinant(spec, 0.0, {0.0}, -1e-3), invalid_input);
}

TEST_CASE("determinant and asymptotic reconstructions converge together") {
    const DiscreteSpectrum spec = three_state();
    auto max_diff = [&](double t) {
        const double k1 = KAPPA_REF[0];
        const std::vector<double> xs =
            linspace(-5.0, 4.0 * k1 * k1 * t + 15.0, 1600);
        const std::vector<double> ud = u_determinant(spec, t, xs);
        const std::vector<double> ua = u_asymptotic(evolve(spec, t), xs);
        double diff = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            diff = std::max(diff, std::abs(ud[i] - ua[i]));
        return diff;
    };
    // the genuine gap decays fast (already ~1e-10 by t = 2); past t ~ 1.5 the
    // measured difference sits on the O(dx^2) stencil floor of the second
    // difference, so strict decay is asserted while above that floor and an
    // absolute bound afterwards
    double prev = 1e300;
    for (double t : {0.5, 1.0, 2.0}) {
        const double diff = max_diff(t);
        CHECK(diff < prev);
        prev = diff;
    }
    CHECK(prev < 1e-5);
    CHECK(max_diff(4.0) < 1e-5);
}

TEST_CASE("reflectionless kernel evaluates and decays") {
    CHECK(std::abs(glm_kernel(one_soliton(), 0.0, 0.0) - 2.0) < 1e-15);

    const DiscreteSpectrum spec = three_state();
    double prev = 1e300;
    for (double x = -5.0; x <= 10.0; x += 0.5) {
        const double f = glm_kernel(spec, 0.7, x);
        CHECK(f > 0.0);
        CHECK(f < prev);
        prev = f;
    }

    const GLMKernelApprox terms0 = glm_terms(spec, 0.0);
    REQUIRE(terms0.terms.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(terms0.terms[i].first == C2_REF[i]);
        CHECK(terms0.terms[i].second == KAPPA_REF[i]);
    }

    // diagonal kernel-matrix entry consistency for a single state:
    // log det(I + C) = log(1 + c^2(t) e^{-2 kappa x} / (2 kappa))
    const DiscreteSpectrum one = one_soliton();
    const double t = 1.25, x = 9.0;
    const double c2t = glm_terms(one, t).terms[0].first;
    const double g = log_det_kernel_matrix(one, t, x);
    CHECK(std::abs(g - std::log1p(c2t * std::exp(-2.0 * x) / 2.0)) < 1e-12);

    CHECK_THROWS_AS(glm_kernel(one, -1.0, 0.0), invalid_input);
}
