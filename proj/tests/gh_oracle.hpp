#pragma once

// Test-only Gauss-Hermite oracle for the binary-input AWGN capacity,
// independent of the adaptive-quadrature implementation path.

#include <cmath>
#include <vector>

namespace imud_test {

// physicists' convention: integral of exp(-t^2) f(t); nodes by Newton iteration
inline void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = 0.7511255444649425; // pi^(-1/4)
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-14) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
}

// C_BAWGN = 1 - E_{Z~N(0,1)}[log2(1 + exp(-2A(A+Z)))]
inline double bawgn_capacity_gh(double snr_linear, int nodes = 64) {
    const double a = std::sqrt(snr_linear);
    std::vector<double> x, w;
    gauss_hermite(nodes, x, w);
    const double inv_sqrt_pi = 0.5641895835477563;
    double expect = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double arg = -2.0 * a * (a + 1.4142135623730951 * x[i]);
        const double v = arg > 30.0 ? arg / 0.6931471805599453 : std::log1p(std::exp(arg)) / 0.6931471805599453;
        expect += w[i] * v;
    }
    return 1.0 - inv_sqrt_pi * expect;
}

} // namespace imud_test
