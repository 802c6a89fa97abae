#include "kdvist/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kdvist {

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Positive beyond round-off is a contract violation; positive within
// round-off is clamped to zero.
double clamp_nonpositive(double v, double scale, double x) {
    const double tol = 1e-12 * (1.0 + scale);
    if (v > tol) {
        std::ostringstream os;
        os << "profile is positive (" << v << ") at x = " << x;
        throw invalid_input(os.str());
    }
    return std::min(v, 0.0);
}

// Trapezoid average of f over [lo, hi]; exact on linear functions.
double cell_average(const std::function<double(double)>& f, double lo, double hi) {
    constexpr int M = 16;
    const double h = (hi - lo) / M;
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < M; ++i) acc += f(lo + i * h);
    return acc / M;
}

BlockPotential blocks_from_cells(const std::vector<double>& depths_lr, double xmin,
                                 double xmax) {
    const std::size_t n = depths_lr.size();
    double scale = 0.0;
    for (double v : depths_lr) scale = std::max(scale, std::abs(v));

    // cells are stored left to right; blocks are indexed from the right edge
    std::vector<double> roots(n);
    std::vector<double> grid(n + 1);
    const double L = xmax - xmin;
    for (std::size_t j = 0; j <= n; ++j) grid[j] = L * j / n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cell = n - 1 - i;
        const double mid = xmin + L * (cell + 0.5) / n;
        roots[i] = std::sqrt(-clamp_nonpositive(depths_lr[cell], scale, mid));
    }
    return make_block_potential(roots, grid, xmax);
}

}  // namespace

SampledPotential named_profile(const std::string& name, double amplitude, double width,
                               double xmin, double xmax) {
    if (!(xmax > xmin)) throw invalid_input("named_profile: empty support");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw invalid_input("named_profile: amplitude must be a nonnegative well depth");
    SampledPotential out;
    out.xmin = xmin;
    out.xmax = xmax;
    if (name == "block") {
        out.v = [amplitude](double) { return -amplitude; };
    } else if (name == "sech2") {
        if (!(width > 0.0)) throw invalid_input("named_profile: sech2 width must be positive");
        out.v = [amplitude, width](double x) {
            const double c = std::cosh(x / width);
            return -amplitude / (c * c);
        };
    } else {
        throw invalid_input("named_profile: unknown profile '" + name +
                            "' (expected block or sech2)");
    }
    return out;
}

SampledPotential tabulated_profile(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw invalid_input("tabulated_profile: need at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
            throw invalid_input("tabulated_profile: non-finite sample");
        if (i > 0 && !(samples[i].first > samples[i - 1].first))
            throw invalid_input("tabulated_profile: x values must be strictly increasing");
    }
    SampledPotential out;
    out.xmin = samples.front().first;
    out.xmax = samples.back().first;
    out.v = [pts = std::move(samples)](double x) {
        if (x <= pts.front().first) return pts.front().second;
        if (x >= pts.back().first) return pts.back().second;
        const auto it = std::upper_bound(
            pts.begin(), pts.end(), x,
            [](double q, const std::pair<double, double>& p) { return q < p.first; });
        const auto& [x1, v1] = *it;
        const auto& [x0, v0] = *(it - 1);
        const double t = (x - x0) / (x1 - x0);
        return v0 + t * (v1 - v0);
    };
    return out;
}

SampledPotential csv_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("csv_profile: cannot open '" + path + "'");
    std::vector<std::pair<double, double>> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        for (char& c : line)
            if (c == ',' || c == '\t' || c == ';') c = ' ';
        std::istringstream row(line);
        double x, v;
        if (!(row >> x)) continue;  // blank line
        if (!(row >> v)) {
            std::ostringstream os;
            os << "csv_profile: " << path << ":" << lineno << ": expected 'x,v'";
            throw invalid_input(os.str());
        }
        samples.emplace_back(x, v);
    }
    std::sort(samples.begin(), samples.end());
    return tabulated_profile(std::move(samples));
}

BlockPotential to_blocks(const SampledPotential& profile, int n_blocks, BlockRule rule) {
    if (!profile.v) throw invalid_input("to_blocks: profile has no evaluator");
    if (n_blocks < 1) throw invalid_input("to_blocks: n_blocks must be >= 1");
    if (!(profile.xmax > profile.xmin)) throw invalid_input("to_blocks: empty support");

    const double L = profile.xmax - profile.xmin;
    std::vector<double> depths(n_blocks);
    for (int i = 0; i < n_blocks; ++i) {
        const double lo = profile.xmin + L * i / n_blocks;
        const double hi = profile.xmin + L * (i + 1) / n_blocks;
        depths[i] = (rule == BlockRule::midpoint) ? profile.v(0.5 * (lo + hi))
                                                  : cell_average(profile.v, lo, hi);
    }
    return blocks_from_cells(depths, profile.xmin, profile.xmax);
}

HaarCoefficients haar_forward(const std::vector<double>& values) {
    if (!is_power_of_two(values.size()))
        throw invalid_input("haar_forward: length must be a power of two");
    HaarCoefficients out;
    out.level = 0;
    for (std::size_t m = values.size(); m > 1; m >>= 1) ++out.level;
    out.coeffs.assign(values.size(), 0.0);

    // Pyramid: pairwise means move up; pairwise half-differences are the
    // wavelet coefficients of the level just left behind.
    std::vector<double> s = values;
    for (int j = out.level - 1; j >= 0; --j) {
        const std::size_t m = std::size_t{1} << j;  // coefficients at scale j
        for (std::size_t k = 0; k < m; ++k) {
            const double a = s[2 * k], b = s[2 * k + 1];
            s[k] = 0.5 * (a + b);
            out.coeffs[m + k] = 0.5 * (a - b);
        }
    }
    out.coeffs[0] = s[0];
    return out;
}

std::vector<double> haar_inverse(const HaarCoefficients& coeffs) {
    if (!is_power_of_two(coeffs.coeffs.size()))
        throw invalid_input("haar_inverse: coefficient length must be a power of two");
    if ((std::size_t{1} << coeffs.level) != coeffs.coeffs.size())
        throw invalid_input("haar_inverse: level does not match coefficient count");

    std::vector<double> s(coeffs.coeffs.size());
    s[0] = coeffs.coeffs[0];
    for (int j = 0; j < coeffs.level; ++j) {
        const std::size_t m = std::size_t{1} << j;
        for (std::size_t k = m; k-- > 0;) {  // in-place: expand from the back
            const double base = s[k], d = coeffs.coeffs[m + k];
            s[2 * k] = base + d;
            s[2 * k + 1] = base - d;
        }
    }
    return s;
}

BlockPotential haar_compress(const SampledPotential& profile, int level, double threshold) {
    if (!profile.v) throw invalid_input("haar_compress: profile has no evaluator");
    if (level < 0 || level > 24) throw invalid_input("haar_compress: level out of range");
    if (!(threshold >= 0.0)) throw invalid_input("haar_compress: threshold must be >= 0");
    if (!(profile.xmax > profile.xmin)) throw invalid_input("haar_compress: empty support");

    const std::size_t n = std::size_t{1} << level;
    const double L = profile.xmax - profile.xmin;
    std::vector<double> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = profile.xmin + L * i / n;
        const double hi = profile.xmin + L * (i + 1) / n;
        cells[i] = cell_average(profile.v, lo, hi);
    }

    HaarCoefficients c = haar_forward(cells);
    for (double& cr : c.coeffs)
        if (std::abs(cr) < threshold) cr = 0.0;
    std::vector<double> back = haar_inverse(c);
    for (double& v : back) v = std::min(v, 0.0);  // thresholding may overshoot
    return blocks_from_cells(back, profile.xmin, profile.xmax);
}

}  // namespace kdvist
