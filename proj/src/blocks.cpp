#include "kdvist/blocks.hpp"

#include <algorithm>
#include <cmath>

namespace kdvist {

void BlockPotential::validate() const {
    if (grid.size() != wells.size() + 1)
        throw invalid_input("block potential: grid must have one more entry than wells");
    if (!grid.empty() && grid.front() != 0.0)
        throw invalid_input("block potential: grid must start at b_0 = 0");
    for (std::size_t n = 0; n + 1 < grid.size(); ++n)
        if (!(grid[n] < grid[n + 1]))
            throw invalid_input("block potential: grid values must be strictly increasing");
    for (std::size_t n = 0; n < wells.size(); ++n) {
        const BlockWell& w = wells[n];
        if (!(w.depth_root >= 0.0) || !std::isfinite(w.depth_root))
            throw invalid_input("block potential: depth root a_n must be finite and >= 0");
        const double h = grid[n + 1] - grid[n];
        if (std::abs(w.width - h) > 1e-12 * std::max(1.0, h))
            throw invalid_input("block potential: well width disagrees with grid");
        if (std::abs(w.right_edge + grid[n]) > 1e-12 * std::max(1.0, grid[n]))
            throw invalid_input("block potential: well position disagrees with grid");
    }
}

BlockPotential make_block_potential(const std::vector<double>& depth_roots,
                                    const std::vector<double>& grid,
                                    double offset) {
    if (grid.size() != depth_roots.size() + 1)
        throw invalid_input("make_block_potential: need grid.size() == depth_roots.size() + 1");
    BlockPotential pot;
    pot.grid = grid;
    pot.offset = offset;
    pot.wells.reserve(depth_roots.size());
    for (std::size_t n = 0; n < depth_roots.size(); ++n) {
        BlockWell w;
        w.depth_root = depth_roots[n];
        w.width = grid[n + 1] - grid[n];
        w.right_edge = -grid[n];
        pot.wells.push_back(w);
    }
    pot.validate();
    return pot;
}

BlockPotential single_block(double a, double xmin, double xmax) {
    if (!(xmax > xmin)) throw invalid_input("single_block: empty interval");
    return make_block_potential({a}, {0.0, xmax - xmin}, xmax);
}

BlockPotential split_blocks(const BlockPotential& pot, int parts) {
    if (parts < 1) throw invalid_input("split_blocks: parts must be >= 1");
    std::vector<double> roots, grid{0.0};
    for (std::size_t n = 0; n < pot.size(); ++n) {
        const double b_lo = pot.grid[n], b_hi = pot.grid[n + 1];
        for (int j = 1; j <= parts; ++j) {
            roots.push_back(pot.wells[n].depth_root);
            // exact endpoints at block boundaries, uniform interior split
            grid.push_back(j == parts ? b_hi : b_lo + (b_hi - b_lo) * j / parts);
        }
    }
    return make_block_potential(roots, grid, pot.offset);
}

double potential_value(const BlockPotential& pot, double x) {
    const double xc = x - pot.offset;  // canonical frame: support [-b_N, 0]
    if (xc > 0.0 || xc < -pot.span()) return 0.0;
    // wells[n] covers [-b_{n+1}, -b_n]; find n with b_n <= -xc <= b_{n+1}
    const double b = -xc;
    auto it = std::upper_bound(pot.grid.begin(), pot.grid.end(), b);
    std::size_t n = (it == pot.grid.begin()) ? 0 : (it - pot.grid.begin() - 1);
    if (n >= pot.size()) n = pot.size() - 1;
    return pot.wells[n].depth();
}

}  // namespace kdvist
