#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "kdvist/types.hpp"

namespace kdvist {

// One constant well V = -a^2 on [right_edge - width, right_edge].
// a >= 0 (a = 0 is a transparent stretch), width > 0, right_edge <= 0.
struct BlockWell {
    double depth_root = 0.0;  // a, so the well value is -a^2
    double width = 0.0;       // h
    double right_edge = 0.0;  // b_right (<= 0)

    double left_edge() const { return right_edge - width; }
    double depth() const { return -depth_root * depth_root; }
};

// A compactly supported piecewise-constant potential: N contiguous wells
// tiling [-b_N, 0].  wells[n-1] occupies [-b_n, -b_{n-1}] with b_0 = 0, so
// wells are stored right-to-left (wells[0] touches x = 0).  grid holds
// b_0..b_N (nonnegative, strictly increasing).
//
// `offset` records a rigid translation applied to bring the user's support
// [xmin, xmax] to the canonical right-edge-at-zero frame: x_original =
// x_canonical + offset.  Scattering data is computed in the canonical frame;
// norming constants transform back as c^2_orig = c^2_canon * e^{2 kappa offset}
// (bound states are translation invariant).
struct BlockPotential {
    std::vector<BlockWell> wells;
    std::vector<double> grid;  // b_0 = 0 < b_1 < ... < b_N
    double offset = 0.0;       // original x of the canonical right edge

    std::size_t size() const { return wells.size(); }
    double span() const { return grid.empty() ? 0.0 : grid.back(); }

    // Validates the invariants (contiguous tiling, nonnegative depth roots,
    // increasing grid); throws invalid_input on violation.
    void validate() const;
};

// Builds a potential from depth roots a_1..a_N (right to left) and the grid
// b_0..b_N.  grid.size() must equal depth_roots.size() + 1 and grid[0] == 0.
BlockPotential make_block_potential(const std::vector<double>& depth_roots,
                                    const std::vector<double>& grid,
                                    double offset = 0.0);

// Uniform single-depth well: V = -a^2 on [xmin, xmax] as one block.
BlockPotential single_block(double a, double xmin, double xmax);

// Splits every block into `parts` equal sub-blocks (same potential, finer
// fragmentation) — used by refinement-invariance checks and the residue
// pipeline.
BlockPotential split_blocks(const BlockPotential& pot, int parts);

// V(x) evaluated in original coordinates (0 outside the support).
double potential_value(const BlockPotential& pot, double x);

}  // namespace kdvist
