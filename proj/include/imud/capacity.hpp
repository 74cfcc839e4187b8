#pragma once

#include <cmath>
#include <stdexcept>

namespace imud {

/// Operating point of the single-frame erasure abstraction.
struct ChannelPoint {
    double erasure_prob = 0.0; // e
    double crossover = 0.0;    // mu, in [0, 1/2]
    double snr_linear = 1.0;   // A^2 / sigma^2
};

/// Probability that at least one of the other k_users-1 users lands in the
/// same chip: e = 1 - (1 - 1/nc)^(k_users - 1).
inline double erasure_probability(int nc, int k_users) {
    if (nc < 1 || k_users < 1) throw std::invalid_argument("erasure_probability: need nc >= 1, k_users >= 1");
    return 1.0 - std::pow(1.0 - 1.0 / nc, k_users - 1);
}

/// Gaussian tail integral Q(x).
inline double q_function(double x) {
    return 0.5 * std::erfc(x / 1.4142135623730950488);
}

/// Binary entropy in bits, h(0) = h(1) = 0 by continuity.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p must lie in [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Capacity of the hard-decision erasure-with-errors channel, bits per chip
/// use: (1 - h(mu)) * (1 - e).
inline double capacity_hard(double mu, double e) {
    if (mu < 0.0 || mu > 0.5) throw std::invalid_argument("capacity_hard: mu must lie in [0, 1/2]");
    if (e < 0.0 || e > 1.0) throw std::invalid_argument("capacity_hard: e must lie in [0, 1]");
    return (1.0 - binary_entropy(mu)) * (1.0 - e);
}

namespace detail {

// adaptive Simpson with an absolute tolerance
inline double simpson_segment(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_segment(a, m, fa, flm, fm);
    const double right = simpson_segment(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson_segment(a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

/// Capacity of the binary-input AWGN channel in bits, A = sqrt(snr) and
/// sigma = 1. Evaluates the two mutual-information integrals by adaptive
/// quadrature over [-A-10, A+10] with absolute tolerance 1e-9.
inline double capacity_bawgn(double snr_linear) {
    if (!(snr_linear > 0.0)) throw std::invalid_argument("capacity_bawgn: snr must be positive");
    const double a = std::sqrt(snr_linear);
    const double inv_sqrt2pi = 0.39894228040143267794;
    auto density = [&](double y, double mean) { return inv_sqrt2pi * std::exp(-0.5 * (y - mean) * (y - mean)); };
    // p(y) is the equal-prior mixture of the two conditionals
    auto term = [&](double mean) {
        return detail::integrate(
            [&](double y) {
                const double pc = density(y, mean);
                if (pc <= 0.0) return 0.0;
                const double py = 0.5 * (density(y, a) + density(y, -a));
                return pc * std::log2(pc / py);
            },
            -a - 10.0, a + 10.0, 1e-9);
    };
    return 0.5 * term(a) + 0.5 * term(-a);
}

/// Capacity of the soft-output channel with erasures: (1 - e) * C_BAWGN.
inline double capacity_soft(double e, double snr_linear) {
    if (e < 0.0 || e > 1.0) throw std::invalid_argument("capacity_soft: e must lie in [0, 1]");
    if (e == 1.0) return 0.0;
    return (1.0 - e) * capacity_bawgn(snr_linear);
}

/// High-SNR limit: the binary erasure channel capacity (1 - 1/nc)^(k_users-1).
inline double capacity_high_snr(int nc, int k_users) {
    if (nc < 1 || k_users < 1) throw std::invalid_argument("capacity_high_snr: need nc >= 1, k_users >= 1");
    return std::pow(1.0 - 1.0 / nc, k_users - 1);
}

/// Aggregate throughput of k_users at the given code rate, bits per frame.
inline double system_throughput(int k_users, double code_rate) {
    if (k_users < 1) throw std::invalid_argument("system_throughput: need k_users >= 1");
    if (!(code_rate > 0.0) || code_rate > 1.0)
        throw std::invalid_argument("system_throughput: rate must lie in (0, 1]");
    return k_users * code_rate;
}

/// Single-user bound: at most nc bits per frame with binary modulation.
inline bool throughput_within_bound(double throughput_bits_per_frame, int nc) {
    return throughput_bits_per_frame <= static_cast<double>(nc);
}

} // namespace imud
