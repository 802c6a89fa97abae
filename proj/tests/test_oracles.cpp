#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "kdvist/blocks.hpp"
#include "kdvist/oracles.hpp"
#include "kdvist/scattering.hpp"

using namespace kdvist;

namespace {
double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }
}  // namespace

TEST_CASE("contour residue: simple pole, analytic clutter, empty circle") {
    auto f1 = [](cplx z) { return 1.0 / (z - cplx(0.0, 1.0)); };
    CHECK(std::abs(contour_residue(f1, cplx(0.0, 1.0), 0.3) - 1.0) < 1e-12);

    // analytic additions must not disturb the residue
    auto f2 = [](cplx z) { return 1.0 / (z - cplx(0.0, 1.0)) + z * z + std::exp(z); };
    CHECK(std::abs(contour_residue(f2, cplx(0.0, 1.0), 0.3) - 1.0) < 1e-10);

    // no pole inside: integral vanishes
    auto f3 = [](cplx z) { return std::exp(z); };
    CHECK(std::abs(contour_residue(f3, cplx(0.5, 0.2), 0.4)) < 1e-12);

    // radius independence for a shifted pole with weight 3.7
    const cplx z0(0.4, 1.3);
    auto f4 = [&](cplx z) { return 3.7 / (z - z0) + std::cos(z); };
    const cplx r1 = contour_residue(f4, z0, 0.2);
    const cplx r2 = contour_residue(f4, z0, 0.1);
    CHECK(std::abs(r1 - 3.7) < 1e-10);
    CHECK(std::abs(r1 - r2) < 1e-10);

    CHECK_THROWS_AS(contour_residue(f1, 0.0, -1.0), invalid_input);
}

TEST_CASE("direct integration: free potential gives a = 1, b = 0") {
    BlockPotential free_pot = make_block_potential({0.0}, {0.0, 2.0});
    for (double k : {0.37, 1.0, 4.2}) {
        const ABPair ab = ab_by_integration(cplx(k, 0.0), free_pot, 1e-3);
        CHECK(std::abs(ab.a - 1.0) < 1e-10);
        CHECK(std::abs(ab.b) < 1e-10);
    }
}

TEST_CASE("direct integration reproduces the closed-form block amplitudes") {
    const BlockPotential pot = single_block(0.8, -4.0, 0.0);
    const BlockWell& w = pot.wells[0];
    for (double k : {0.3, 1.0, 2.5}) {
        const ScatteringEvaluation ev = block_scattering(cplx(k, 0.0), w);
        const ABPair ab = ab_by_integration(cplx(k, 0.0), pot, 1e-3);
        CHECK(rel(ab.a, 1.0 / ev.T) < 1e-9);
        CHECK(rel(ab.b, -ev.R / ev.T) < 1e-9);
        // reflection/transmission read back out
        CHECK(rel(-ab.b / ab.a, ev.R) < 1e-9);
        CHECK(rel(1.0 / ab.a, ev.T) < 1e-9);
    }
}

TEST_CASE("direct integration converges at fourth order") {
    const BlockPotential pot = single_block(1.3, -3.0, 0.0);
    const BlockWell& w = pot.wells[0];
    const cplx k(0.9, 0.0);
    const ScatteringEvaluation ev = block_scattering(k, w);
    const cplx want = 1.0 / ev.T;

    const double e1 = std::abs(ab_by_integration(k, pot, 4e-3).a - want);
    const double e2 = std::abs(ab_by_integration(k, pot, 2e-3).a - want);
    CHECK(e1 > 0.0);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.0);  // classical RK4
    CHECK(order < 5.5);
}

TEST_CASE("direct integration at complex k matches the closed forms") {
    const BlockPotential pot = single_block(0.8, -4.0, 0.0);
    const BlockWell& w = pot.wells[0];
    for (cplx k : {cplx(0.5, 0.3), cplx(1.2, -0.2), cplx(0.05, 0.45)}) {
        const ScatteringEvaluation ev = block_scattering(k, w);
        const ABPair ab = ab_by_integration(k, pot, 1e-3);
        CHECK(rel(ab.a, 1.0 / ev.T) < 1e-8);
        CHECK(rel(ab.b, -ev.R / ev.T) < 1e-8);
    }
}

TEST_CASE("direct integration refuses k = 0") {
    const BlockPotential pot = single_block(0.8, -4.0, 0.0);
    CHECK_THROWS_AS(ab_by_integration(cplx(0.0, 0.0), pot), invalid_input);
}

TEST_CASE("L2 norming agrees with the closed-form constants on one block") {
    const BlockPotential pot = single_block(0.8, -4.0, 0.0);
    const BlockWell& w = pot.wells[0];
    const std::vector<double> kappas = block_bound_states(w);
    const std::vector<double> c2ref = block_norming_constants(w, kappas);
    REQUIRE(kappas.size() == 2);
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const NormingL2 r = norming_by_L2(kappas[i], pot, 5e-4);
        CHECK(r.decay_mismatch < 1e-6);
        CHECK(std::abs(r.c2 - c2ref[i]) / c2ref[i] < 1e-6);
    }

    // Deeper well, several levels
    const BlockPotential pot2 = single_block(2.0, -4.0, 0.0);
    const BlockWell& w2 = pot2.wells[0];
    const std::vector<double> ks2 = block_bound_states(w2);
    const std::vector<double> c2s2 = block_norming_constants(w2, ks2);
    for (std::size_t i = 0; i < ks2.size(); ++i) {
        const NormingL2 ri = norming_by_L2(ks2[i], pot2, 5e-4);
        CHECK(ri.decay_mismatch < 1e-5);
        CHECK(std::abs(ri.c2 - c2s2[i]) / c2s2[i] < 1e-5);
    }
}

TEST_CASE("L2 norming flags a kappa that is not a bound state") {
    const BlockPotential pot = single_block(0.8, -4.0, 0.0);
    const std::vector<double> kappas = block_bound_states(pot.wells[0]);
    const NormingL2 good = norming_by_L2(kappas[0], pot, 1e-3);
    const NormingL2 bad = norming_by_L2(kappas[0] * 1.01, pot, 1e-3);
    CHECK(good.decay_mismatch < 1e-6);
    CHECK(bad.decay_mismatch > 1e-3);  // growing admixture betrays itself
}
