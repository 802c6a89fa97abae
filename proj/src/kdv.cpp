#include "kdvist/kdv.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace kdvist {

namespace {

void check_spectrum(const DiscreteSpectrum& s) {
    const std::size_t n = s.kappas.size();
    if (n == 0) throw invalid_input("spectrum is empty");
    if (s.norming.size() != n)
        throw invalid_input("spectrum has " + std::to_string(n) + " kappas but " +
                            std::to_string(s.norming.size()) + " norming constants");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::isfinite(s.kappas[i]) && s.kappas[i] > 0.0))
            throw invalid_input("kappa[" + std::to_string(i) + "] is not a positive number");
        if (!(std::isfinite(s.norming[i]) && s.norming[i] > 0.0))
            throw invalid_input("norming constant c^2[" + std::to_string(i) +
                                "] is not a positive number");
        if (i > 0 && !(s.kappas[i] < s.kappas[i - 1]))
            throw invalid_input("kappas must be strictly descending (coincident or misordered "
                                "values at index " +
                                std::to_string(i) + ")");
    }
}

// sech^2 without intermediate overflow: sech t = 2 e^{-|t|} / (1 + e^{-2|t|}).
double sech2(double t) {
    const double e = std::exp(-std::abs(t));
    const double s = 2.0 * e / (1.0 + e * e);
    return s * s;
}

}  // namespace

SolitonTrain evolve(const DiscreteSpectrum& spectrum, double t) {
    check_spectrum(spectrum);
    if (!(std::isfinite(t) && t >= 0.0)) throw invalid_input("time must be nonnegative");

    const std::size_t n = spectrum.kappas.size();
    SolitonTrain train;
    train.kappas = spectrum.kappas;
    train.norming0 = spectrum.norming;
    train.t = t;
    train.gammas.resize(n);
    train.log_sqrt_gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = spectrum.kappas[i];
        double lsg = 0.5 * (std::log(2.0 * k) - std::log(spectrum.norming[i]));
        for (std::size_t m = 0; m < i; ++m)
            lsg += std::log(k + spectrum.kappas[m]) - std::log(std::abs(k - spectrum.kappas[m]));
        const double gamma = std::exp(2.0 * lsg);
        if (!(std::isfinite(gamma) && gamma > 0.0))
            throw numerical_error("phase factor gamma[" + std::to_string(i) +
                                  "] not representable (near-coincident kappas?)");
        train.log_sqrt_gamma[i] = lsg;
        train.gammas[i] = gamma;
    }
    return train;
}

std::vector<double> u_asymptotic(const SolitonTrain& train, const std::vector<double>& xs) {
    const std::size_t n = train.kappas.size();
    if (n == 0 || train.log_sqrt_gamma.size() != n)
        throw invalid_input("soliton train is empty or inconsistent");
    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double u = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double k = train.kappas[i];
            const double theta = k * xs[j] - 4.0 * k * k * k * train.t + train.log_sqrt_gamma[i];
            u -= 2.0 * k * k * sech2(theta);
        }
        out[j] = u;
    }
    return out;
}

double log_det_kernel_matrix(const DiscreteSpectrum& spectrum, double t, double x) {
    check_spectrum(spectrum);
    if (!std::isfinite(t)) throw invalid_input("time must be finite");
    if (!std::isfinite(x)) throw invalid_input("position must be finite");

    // Entries of I + C are delta_mn + e^{s_m} e^{s_n} / (k_m + k_n) with
    //   s_m = log c_m + 4 k_m^3 t - k_m x.
    // Conjugating by S = diag(e^{-max(s_m,0)}) keeps every matrix entry
    // bounded while the discarded scale re-enters as an exact log-space sum:
    //   log det(I + C) = log det A + 2 sum_m max(s_m, 0),
    //   A_mn = delta_mn e^{-2 max(s_m,0)} + e^{min(s_m,0)} e^{min(s_n,0)} / (k_m + k_n).
    const int n = static_cast<int>(spectrum.kappas.size());
    Eigen::VectorXd s(n), small(n);
    double shift = 0.0;
    for (int m = 0; m < n; ++m) {
        const double k = spectrum.kappas[m];
        s[m] = 0.5 * std::log(spectrum.norming[m]) + 4.0 * k * k * k * t - k * x;
        small[m] = std::exp(std::min(s[m], 0.0));
        shift += std::max(s[m], 0.0);
    }
    Eigen::MatrixXd A(n, n);
    for (int m = 0; m < n; ++m) {
        for (int l = 0; l <= m; ++l) {
            double v = small[m] * small[l] / (spectrum.kappas[m] + spectrum.kappas[l]);
            if (l == m) v += std::exp(-2.0 * std::max(s[m], 0.0));
            A(m, l) = v;
            A(l, m) = v;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw numerical_error("kernel matrix factorization broke down at x = " +
                              std::to_string(x) + ", t = " + std::to_string(t));
    double logdet = 0.0;
    const auto& L = llt.matrixLLT();
    for (int m = 0; m < n; ++m) logdet += 2.0 * std::log(L(m, m));
    return logdet + 2.0 * shift;
}

std::vector<double> u_determinant(const DiscreteSpectrum& spectrum, double t,
                                  const std::vector<double>& xs, double dx) {
    if (!(std::isfinite(dx) && dx > 0.0)) throw invalid_input("dx must be positive");
    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double gm = log_det_kernel_matrix(spectrum, t, xs[j] - dx);
        const double g0 = log_det_kernel_matrix(spectrum, t, xs[j]);
        const double gp = log_det_kernel_matrix(spectrum, t, xs[j] + dx);
        out[j] = -2.0 * (gp - 2.0 * g0 + gm) / (dx * dx);
    }
    return out;
}

GLMKernelApprox glm_terms(const DiscreteSpectrum& spectrum, double t) {
    check_spectrum(spectrum);
    if (!(std::isfinite(t) && t >= 0.0)) throw invalid_input("time must be nonnegative");
    GLMKernelApprox out;
    for (std::size_t i = 0; i < spectrum.kappas.size(); ++i) {
        const double k = spectrum.kappas[i];
        const double c2t = spectrum.norming[i] * std::exp(8.0 * k * k * k * t);
        if (!(std::isfinite(c2t) && c2t > 0.0))
            throw numerical_error("evolved norming constant overflowed at kappa = " +
                                  std::to_string(k));
        out.terms.emplace_back(c2t, k);
    }
    return out;
}

double glm_kernel(const DiscreteSpectrum& spectrum, double t, double x) {
    check_spectrum(spectrum);
    if (!(std::isfinite(t) && t >= 0.0)) throw invalid_input("time must be nonnegative");
    double f = 0.0;
    for (std::size_t i = 0; i < spectrum.kappas.size(); ++i) {
        const double k = spectrum.kappas[i];
        f += std::exp(std::log(spectrum.norming[i]) + 8.0 * k * k * k * t - k * x);
    }
    return f;
}

}  // namespace kdvist
