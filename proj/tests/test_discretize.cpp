#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "kdvist/blocks.hpp"
#include "kdvist/discretize.hpp"
#include "kdvist/spectrum.hpp"

using namespace kdvist;

namespace {

double rel(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Explicit basis matrix: column r holds the r-th Haar function's values on
// the 2^n cells (r = 0 scaling function; r = 2^j + k the wavelet on the
// k-th dyadic subinterval of scale j).
std::vector<std::vector<double>> explicit_haar_matrix(int level) {
    const std::size_t n = std::size_t{1} << level;
    std::vector<std::vector<double>> W(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) W[i][0] = 1.0;
    for (int j = 0; j < level; ++j) {
        const std::size_t m = std::size_t{1} << j;
        const std::size_t span = n / m;
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < span / 2; ++i) W[k * span + i][m + k] = 1.0;
            for (std::size_t i = span / 2; i < span; ++i) W[k * span + i][m + k] = -1.0;
        }
    }
    return W;
}

}  // namespace

TEST_CASE("constant well discretizes exactly under both rules") {
    const SampledPotential prof = named_profile("block", 4.0, 1.0, -4.0, 0.0);
    for (BlockRule rule : {BlockRule::midpoint, BlockRule::cell_average}) {
        for (int nb : {1, 7, 64}) {
            const BlockPotential pot = to_blocks(prof, nb, rule);
            REQUIRE(static_cast<int>(pot.wells.size()) == nb);
            CHECK(pot.offset == 0.0);
            CHECK(pot.span() == 4.0);
            for (const BlockWell& w : pot.wells) CHECK(w.depth_root == 2.0);
        }
    }
}

TEST_CASE("midpoint sech2 blocks reproduce the reference experimental setup") {
    const SampledPotential prof = named_profile("sech2", 2.0, 1.0, -5.0, 5.0);
    const BlockPotential pot = to_blocks(prof, 1000, BlockRule::midpoint);
    REQUIRE(pot.wells.size() == 1000);
    CHECK(pot.offset == 5.0);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double mid = 5.0 - 0.5 * (pot.grid[i] + pot.grid[i + 1]);
        const double want = std::sqrt(2.0) / std::cosh(mid);
        CHECK(rel(pot.wells[i].depth_root, want) < 1e-14);
        CHECK(rel(pot.grid[i + 1] - pot.grid[i], 0.01) < 1e-12);
    }
}

TEST_CASE("cell average equals midpoint on a linear ramp") {
    const SampledPotential ramp{[](double x) { return -1.0 - x; }, 0.0, 1.0};
    const BlockPotential a = to_blocks(ramp, 1, BlockRule::cell_average);
    const BlockPotential m = to_blocks(ramp, 1, BlockRule::midpoint);
    CHECK(rel(a.wells[0].depth_root, m.wells[0].depth_root) < 1e-15);
    CHECK(rel(m.wells[0].depth_root, std::sqrt(1.5)) < 1e-15);
}

TEST_CASE("positive profile values are rejected with their location") {
    const SampledPotential bad =
        tabulated_profile({{0.0, -1.0}, {2.0, -1.0}, {3.0, 0.5}, {4.0, -1.0}});
    bool threw = false;
    try {
        to_blocks(bad, 8, BlockRule::midpoint);
    } catch (const invalid_input& e) {
        threw = true;
        CHECK(std::string(e.what()).find("x = ") != std::string::npos);
    }
    CHECK(threw);

    // positive within round-off is clamped, not rejected
    const SampledPotential tiny{[](double) { return 1e-15; }, 0.0, 1.0};
    const BlockPotential pot = to_blocks(tiny, 4, BlockRule::midpoint);
    for (const BlockWell& w : pot.wells) CHECK(w.depth_root == 0.0);
}

TEST_CASE("tabulated profiles interpolate linearly") {
    const SampledPotential p = tabulated_profile({{0.0, 0.0}, {1.0, -2.0}, {2.0, 0.0}});
    CHECK(p.xmin == 0.0);
    CHECK(p.xmax == 2.0);
    CHECK(rel(p.v(0.5), -1.0) < 1e-15);
    CHECK(rel(p.v(1.0), -2.0) < 1e-15);
    CHECK(rel(p.v(1.75), -0.5) < 1e-15);
    CHECK(p.v(-3.0) == 0.0);   // clamped to the boundary samples
    CHECK(p.v(9.0) == 0.0);
    CHECK_THROWS_AS(tabulated_profile({{0.0, -1.0}}), invalid_input);
    CHECK_THROWS_AS(tabulated_profile({{0.0, -1.0}, {0.0, -2.0}}), invalid_input);
}

TEST_CASE("csv profiles parse comments and mixed separators") {
    const char* path = "/tmp/kdvist_csv_test.csv";
    {
        std::ofstream out(path);
        out << "# x, v\n";
        out << "0.0, -1.0\n";
        out << "\n";
        out << "1.0\t-3.0  # tab separated\n";
        out << "2.0 -1.0\n";
    }
    const SampledPotential p = csv_profile(path);
    CHECK(p.xmin == 0.0);
    CHECK(p.xmax == 2.0);
    CHECK(rel(p.v(0.5), -2.0) < 1e-15);
    std::remove(path);
    CHECK_THROWS_AS(csv_profile("/tmp/kdvist_does_not_exist.csv"), invalid_input);
}

TEST_CASE("forward transform matches its defining examples") {
    const HaarCoefficients c1 = haar_forward(std::vector<double>(8, 5.0));
    CHECK(c1.level == 3);
    CHECK(c1.coeffs[0] == 5.0);
    for (std::size_t r = 1; r < 8; ++r) CHECK(c1.coeffs[r] == 0.0);

    const HaarCoefficients c2 = haar_forward({1.0, -1.0});
    CHECK(c2.level == 1);
    CHECK(c2.coeffs[0] == 0.0);
    CHECK(c2.coeffs[1] == 1.0);

    CHECK_THROWS_AS(haar_forward({1.0, 2.0, 3.0}), invalid_input);
    CHECK_THROWS_AS(haar_forward({}), invalid_input);
}

TEST_CASE("fast transform agrees with the explicit basis matrix") {
    const int level = 6;
    const std::size_t n = 64;
    const auto W = explicit_haar_matrix(level);

    std::mt19937 rng(20260819);
    std::uniform_real_distribution<double> depth(-3.0, 0.0);
    std::vector<double> v(n);
    for (double& x : v) x = depth(rng);

    const HaarCoefficients c = haar_forward(v);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += W[i][r] * c.coeffs[r];
        CHECK(std::abs(acc - v[i]) < 1e-12);
    }

    // orthogonality of the columns (exact: integer entries)
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = r + 1; s < n; ++s) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += W[i][r] * W[i][s];
            CHECK(dot == 0.0);
        }
    }

    // Parseval with the column-norm weights: ||v||^2 = sum c_r^2 ||col_r||^2
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += v[i] * v[i];
    for (std::size_t r = 0; r < n; ++r) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += W[i][r] * W[i][r];
        rhs += c.coeffs[r] * c.coeffs[r] * norm2;
    }
    CHECK(rel(lhs, rhs) < 1e-12);
}

TEST_CASE("inverse transform round-trips") {
    std::vector<double> c0(4, 0.0);
    c0[0] = 5.0;
    const std::vector<double> flat = haar_inverse({c0, 2});
    for (double x : flat) CHECK(x == 5.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> depth(-10.0, 0.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(128);
        for (double& x : v) x = depth(rng);
        const std::vector<double> back = haar_inverse(haar_forward(v));
        for (std::size_t i = 0; i < v.size(); ++i)
            worst = std::max(worst, std::abs(back[i] - v[i]));
    }
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(haar_inverse({{1.0, 2.0, 3.0}, 2}), invalid_input);
    CHECK_THROWS_AS(haar_inverse({{1.0, 2.0}, 2}), invalid_input);
}

TEST_CASE("thresholding error is bounded by the dropped mass") {
    const SampledPotential prof = named_profile("sech2", 2.0, 1.0, -5.0, 5.0);
    const std::size_t n = 256;
    std::vector<double> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -5.0 + 10.0 * (i + 0.5) / n;
        cells[i] = prof.v(x);
    }
    HaarCoefficients c = haar_forward(cells);
    const double tau = 1e-3;
    double dropped = 0.0;
    for (double& cr : c.coeffs)
        if (std::abs(cr) < tau) {
            dropped += std::abs(cr);
            cr = 0.0;
        }
    REQUIRE(dropped > 0.0);
    const std::vector<double> back = haar_inverse(c);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(back[i] - cells[i]) <= dropped * (1.0 + 1e-12));
}

TEST_CASE("zero threshold compression equals plain cell averaging") {
    const SampledPotential prof = named_profile("sech2", 2.0, 1.0, -5.0, 5.0);
    const BlockPotential a = haar_compress(prof, 8, 0.0);
    const BlockPotential b = to_blocks(prof, 256, BlockRule::cell_average);
    REQUIRE(a.wells.size() == b.wells.size());
    for (std::size_t i = 0; i < a.wells.size(); ++i)
        CHECK(std::abs(a.wells[i].depth_root - b.wells[i].depth_root) < 1e-13);
}

TEST_CASE("aligned block well survives compression exactly") {
    const SampledPotential prof = named_profile("block", 4.0, 1.0, -4.0, 0.0);
    const BlockPotential pot = haar_compress(prof, 5, 3.9);
    REQUIRE(pot.wells.size() == 32);
    for (const BlockWell& w : pot.wells) CHECK(w.depth_root == 2.0);
}

TEST_CASE("ten-percent compression barely moves the bound state") {
    const SampledPotential prof = named_profile("sech2", 2.0, 1.0, -5.0, 5.0);
    const int level = 10;
    const std::size_t n = std::size_t{1} << level;

    std::vector<double> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = -5.0 + 10.0 * i / n, hi = -5.0 + 10.0 * (i + 1) / n;
        cells[i] = prof.v(0.5 * (lo + hi));
    }
    HaarCoefficients c = haar_forward(cells);
    std::vector<double> mags;
    for (double cr : c.coeffs) mags.push_back(std::abs(cr));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    const std::size_t keep = n / 10;
    const double tau = 0.5 * (mags[keep - 1] + mags[keep]);

    const BlockPotential full = haar_compress(prof, level, 0.0);
    const BlockPotential compressed = haar_compress(prof, level, tau);

    const SeedEstimates seeds = spectral_seed(full, 128, -5.0, 5.0);
    const std::vector<double> k_full = find_bound_states(full, seeds, BoundMethod::inv_R);
    const std::vector<double> k_comp =
        find_bound_states(compressed, seeds, BoundMethod::inv_R);
    REQUIRE(k_full.size() == 1);
    REQUIRE(!k_comp.empty());
    CHECK(std::abs(k_full[0] - k_comp[0]) < 1e-3);
}

TEST_CASE("block approximation error halves with refinement") {
    const SampledPotential prof = named_profile("sech2", 2.0, 1.0, -2.0, 2.0);
    for (BlockRule rule : {BlockRule::midpoint, BlockRule::cell_average}) {
        double prev = 0.0;
        for (int nb : {8, 16, 32, 64}) {
            const BlockPotential pot = to_blocks(prof, nb, rule);
            // L2 error by per-cell quadrature (cells ordered right to left)
            double err2 = 0.0;
            const int sub = 64;
            for (std::size_t i = 0; i < pot.wells.size(); ++i) {
                const double hi = pot.offset - pot.grid[i];
                const double lo = pot.offset - pot.grid[i + 1];
                const double depth = -pot.wells[i].depth_root * pot.wells[i].depth_root;
                const double dx = (hi - lo) / sub;
                for (int q = 0; q < sub; ++q) {
                    const double x = lo + (q + 0.5) * dx;
                    const double d = prof.v(x) - depth;
                    err2 += d * d * dx;
                }
            }
            const double err = std::sqrt(err2);
            if (prev > 0.0) CHECK(err < 0.65 * prev);
            prev = err;
        }
    }
}
