#include "kdvist/splitstep.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace kdvist {

namespace {

// Thin RAII wrapper over the FFTW r2c/c2r plan pair for one grid size.
class Spectral {
  public:
    explicit Spectral(int n)
        : n_(n),
          real_(fftw_alloc_real(n)),
          spec_(fftw_alloc_complex(n / 2 + 1)),
          fwd_(fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE)),
          bwd_(fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE)) {}
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;
    ~Spectral() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    int modes() const { return n_ / 2 + 1; }

    // real grid values -> spectrum (unnormalized FFTW convention)
    void forward(const std::vector<double>& u, std::vector<std::complex<double>>& out) {
        std::copy(u.begin(), u.end(), real_);
        fftw_execute(fwd_);
        out.resize(modes());
        for (int j = 0; j < modes(); ++j) out[j] = {spec_[j][0], spec_[j][1]};
    }

    // spectrum -> real grid values, including the 1/n normalization
    void backward(const std::vector<std::complex<double>>& in, std::vector<double>& u) {
        for (int j = 0; j < modes(); ++j) {
            spec_[j][0] = in[j].real();
            spec_[j][1] = in[j].imag();
        }
        fftw_execute(bwd_);
        u.resize(n_);
        for (int j = 0; j < n_; ++j) u[j] = real_[j] / n_;
    }

  private:
    int n_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace

SplitStepResult split_step_kdv(const SampledPotential& u0, double t_end, double dt,
                               int grid, double pad_factor) {
    if (!u0.v) throw invalid_input("profile has no evaluator");
    if (!(u0.xmax > u0.xmin)) throw invalid_input("profile support is empty");
    if (!(std::isfinite(t_end) && t_end >= 0.0)) throw invalid_input("t_end must be >= 0");
    if (!(std::isfinite(dt) && dt > 0.0)) throw invalid_input("dt must be positive");
    if (grid < 16) throw invalid_input("grid must be at least 16 points");
    if (!(std::isfinite(pad_factor) && pad_factor >= 1.0))
        throw invalid_input("pad_factor must be >= 1");

    // periodic box: pad_factor times the support width, with most of the
    // slack ahead of the initial data (solitary waves travel right)
    const double width = u0.xmax - u0.xmin;
    const double slack = (pad_factor - 1.0) * width;
    const double left = u0.xmin - 0.25 * slack;
    const double box = pad_factor * width;

    const int n = grid;
    SplitStepResult res;
    res.xs.resize(n);
    std::vector<double> u(n);
    for (int j = 0; j < n; ++j) {
        const double x = left + box * j / n;
        res.xs[j] = x;
        u[j] = (x >= u0.xmin && x <= u0.xmax) ? u0.v(x) : 0.0;
        if (!std::isfinite(u[j]))
            throw invalid_input("profile is not finite at x = " + std::to_string(x));
    }

    const double h = box / n;
    auto mass = [&](const std::vector<double>& f) {
        double m = 0.0;
        for (double v : f) m += v;
        return m * h;
    };
    auto momentum = [&](const std::vector<double>& f) {
        double m = 0.0;
        for (double v : f) m += v * v;
        return m * h;
    };
    res.mass0 = mass(u);
    res.momentum0 = momentum(u);

    const int steps = std::max(1, static_cast<int>(std::lround(t_end / dt)));
    res.steps = (t_end == 0.0) ? 0 : steps;
    res.dt = (t_end == 0.0) ? 0.0 : t_end / steps;

    if (t_end == 0.0) {
        res.u = u;
        res.mass1 = res.mass0;
        res.momentum1 = res.momentum0;
        return res;
    }

    Spectral fft(n);
    const int nm = fft.modes();
    std::vector<double> k(nm);
    for (int j = 0; j < nm; ++j) k[j] = 2.0 * PI * j / box;
    const int kcut = n / 3;  // 2/3-rule: drop modes with index > n/3

    std::vector<std::complex<double>> uh, work, k1, k2, k3, k4, stage;
    std::vector<double> ur;
    fft.forward(u, uh);
    for (int j = 0; j < nm; ++j)
        if (j > kcut) uh[j] = 0.0;

    // nonlinear RHS in Fourier space: N(uh) = 3 i k fft((ifft uh)^2), dealiased
    auto rhs = [&](const std::vector<std::complex<double>>& in,
                   std::vector<std::complex<double>>& out) {
        fft.backward(in, ur);
        for (double& v : ur) v *= v;
        fft.forward(ur, out);
        for (int j = 0; j < nm; ++j)
            out[j] = (j > kcut) ? 0.0 : std::complex<double>(0.0, 3.0 * k[j]) * out[j];
    };

    // exact linear half step: u_t = -u_xxx  =>  uh *= exp(i k^3 dt/2)
    const double hdt = 0.5 * res.dt;
    std::vector<std::complex<double>> rot(nm);
    for (int j = 0; j < nm; ++j)
        rot[j] = std::polar(1.0, k[j] * k[j] * k[j] * hdt);

    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double bound =
        50.0 * (1.0 + std::abs(res.mass0) + std::sqrt(res.momentum0)) * (1.0 + umax);

    for (int step = 0; step < steps; ++step) {
        for (int j = 0; j <= kcut; ++j) uh[j] *= rot[j];

        rhs(uh, k1);
        stage.resize(nm);
        for (int j = 0; j < nm; ++j) stage[j] = uh[j] + hdt * k1[j];
        rhs(stage, k2);
        for (int j = 0; j < nm; ++j) stage[j] = uh[j] + hdt * k2[j];
        rhs(stage, k3);
        for (int j = 0; j < nm; ++j) stage[j] = uh[j] + res.dt * k3[j];
        rhs(stage, k4);
        for (int j = 0; j < nm; ++j)
            uh[j] += res.dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        for (int j = 0; j <= kcut; ++j) uh[j] *= rot[j];

        // cheap blow-up guard on the zeroth and a mid spectrum mode, full
        // check on the grid values every few hundred steps
        if (!std::isfinite(uh[0].real()) || !std::isfinite(uh[nm / 2].real()) ||
            (step % 256 == 255 &&
             [&] {
                 fft.backward(uh, ur);
                 for (double v : ur)
                     if (!std::isfinite(v) || std::abs(v) > bound) return true;
                 return false;
             }())) {
            throw numerical_error("split-step solution blew up at step " +
                                  std::to_string(step + 1) + " (t = " +
                                  std::to_string((step + 1) * res.dt) +
                                  "); reduce dt or enlarge the grid");
        }
    }

    fft.backward(uh, res.u);
    for (double v : res.u)
        if (!std::isfinite(v))
            throw numerical_error("split-step solution lost finiteness by t_end");
    res.mass1 = mass(res.u);
    res.momentum1 = momentum(res.u);
    return res;
}

}  // namespace kdvist
