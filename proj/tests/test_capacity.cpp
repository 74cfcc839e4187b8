#include <catch2/catch.hpp>

#include <cmath>

#include "gh_oracle.hpp"
#include "imud/capacity.hpp"

using namespace imud;
using imud_test::bawgn_capacity_gh;

namespace {

// Q(1) via direct high-resolution trapezoid quadrature of the Gaussian tail
double q_by_quadrature(double beta) {
    const double upper = beta + 40.0;
    const int steps = 4'000'000;
    const double h = (upper - beta) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = beta + i * h;
        const double f = std::exp(-0.5 * t * t) / std::sqrt(2.0 * 3.141592653589793238);
        sum += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    return sum * h;
}

} // namespace

TEST_CASE("erasure probability reference values") {
    REQUIRE(erasure_probability(20, 3) == Approx(0.0975).epsilon(1e-12));
    REQUIRE(erasure_probability(20, 1) == 0.0);
    REQUIRE(erasure_probability(7, 1) == 0.0);
    REQUIRE(erasure_probability(20, 11) == Approx(0.401263).margin(5e-7));
}

TEST_CASE("erasure probability is monotone in users and chips") {
    for (int k = 1; k < 30; ++k)
        REQUIRE(erasure_probability(20, k + 1) > erasure_probability(20, k));
    for (int nc = 2; nc < 40; ++nc)
        REQUIRE(erasure_probability(nc + 1, 5) < erasure_probability(nc, 5));
}

TEST_CASE("q_function values") {
    REQUIRE(q_function(0.0) == Approx(0.5).epsilon(1e-14));
    REQUIRE(q_function(8.0) < 1e-15);
    REQUIRE(q_function(1.0) == Approx(q_by_quadrature(1.0)).epsilon(1e-9));
    REQUIRE(q_function(1.0) == Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("binary entropy values") {
    REQUIRE(binary_entropy(0.5) == Approx(1.0).epsilon(1e-14));
    REQUIRE(binary_entropy(0.0) == 0.0);
    REQUIRE(binary_entropy(1.0) == 0.0);
    // direct evaluation at long-double-ish precision
    const double p = 0.11;
    const double direct = -(p * std::log(p) + (1 - p) * std::log(1 - p)) / std::log(2.0);
    REQUIRE(binary_entropy(0.11) == Approx(direct).epsilon(1e-14));
    REQUIRE(binary_entropy(0.11) == Approx(0.49992).margin(1e-5));
}

TEST_CASE("hard-decision capacity") {
    REQUIRE(capacity_hard(0.0, 0.0) == Approx(1.0));
    REQUIRE(capacity_hard(0.5, 0.2) == Approx(0.0).margin(1e-14));
    // composition at 4 dB and the K=3 erasure rate
    const double snr = std::pow(10.0, 0.4);
    const double mu = q_function(std::sqrt(snr));
    const double e = erasure_probability(20, 3);
    REQUIRE(capacity_hard(mu, e) == Approx((1.0 - binary_entropy(mu)) * (1.0 - e)).epsilon(1e-12));
}

TEST_CASE("capacity_hard at mu=0 equals the high-SNR BEC capacity") {
    for (int users = 1; users <= 40; users += 3) {
        const double e = erasure_probability(20, users);
        REQUIRE(capacity_hard(0.0, e) == Approx(capacity_high_snr(20, users)).epsilon(1e-12));
    }
}

TEST_CASE("capacity_bawgn limits and oracle value") {
    REQUIRE(capacity_bawgn(1e-6) < 1e-5);
    REQUIRE(capacity_bawgn(64.0) == Approx(1.0).margin(1e-6));
    REQUIRE(capacity_bawgn(1.0) == Approx(bawgn_capacity_gh(1.0)).margin(1e-6));
}

TEST_CASE("capacity_bawgn is strictly increasing in snr") {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double snr = 0.05 * i;
        const double c = capacity_bawgn(snr);
        REQUIRE(c > prev);
        prev = c;
    }
}

TEST_CASE("capacity_soft composition") {
    REQUIRE(capacity_soft(1.0, 2.0) == 0.0);
    REQUIRE(capacity_soft(0.0, 2.0) == Approx(capacity_bawgn(2.0)).epsilon(1e-12));
    REQUIRE(capacity_soft(erasure_probability(20, 3), 1.0) ==
            Approx(0.9025 * capacity_bawgn(1.0)).epsilon(1e-12));
}

TEST_CASE("soft capacity dominates hard capacity at matched operating points") {
    for (double snr_db = -2.0; snr_db <= 12.0; snr_db += 1.0) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double mu = q_function(std::sqrt(snr));
        for (double e : {0.0, 0.1, 0.4, 0.7})
            REQUIRE(capacity_soft(e, snr) >= capacity_hard(mu, e) - 1e-12);
    }
}

TEST_CASE("high-snr capacity reference values") {
    REQUIRE(capacity_high_snr(20, 3) == Approx(0.9025).epsilon(1e-12));
    REQUIRE(capacity_high_snr(20, 11) == Approx(0.598737).margin(5e-7));
    REQUIRE(capacity_high_snr(20, 1) == 1.0);
    REQUIRE(capacity_high_snr(5, 1) == 1.0);
}

TEST_CASE("system throughput") {
    REQUIRE(system_throughput(32, 0.46) == Approx(14.72).epsilon(1e-12));
    REQUIRE(system_throughput(1, 1.0) == Approx(1.0));
    REQUIRE(throughput_within_bound(system_throughput(32, 0.46), 20));
    REQUIRE_FALSE(throughput_within_bound(system_throughput(60, 0.5), 20));
}
