#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpbandits/noise.hpp"

using namespace dpb;

TEST_SUITE_BEGIN("noise");

TEST_CASE("laplace inverse cdf matches closed form") {
    CHECK(laplace_inverse_cdf(0.5, LaplaceScale(3.0)) == 0.0);
    CHECK(laplace_inverse_cdf(0.75, LaplaceScale(1.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(laplace_inverse_cdf(0.25, LaplaceScale(1.0)) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    // symmetric pairs around the median
    for (double u : {0.6, 0.9, 0.99, 0.512}) {
        CHECK(laplace_inverse_cdf(u, LaplaceScale(2.5)) ==
              doctest::Approx(-laplace_inverse_cdf(1.0 - u, LaplaceScale(2.5))).epsilon(1e-9));
    }
    // monotone in u
    double prev = laplace_inverse_cdf(0.001, LaplaceScale(1.0));
    for (double u = 0.05; u < 1.0; u += 0.05) {
        const double v = laplace_inverse_cdf(u, LaplaceScale(1.0));
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(laplace_inverse_cdf(0.0, LaplaceScale(1.0)), std::domain_error);
    CHECK_THROWS_AS(laplace_inverse_cdf(1.0, LaplaceScale(1.0)), std::domain_error);
    CHECK_THROWS_AS(LaplaceScale(0.0), std::domain_error);
    CHECK_THROWS_AS(LaplaceScale(-1.0), std::domain_error);
}

TEST_CASE("laplace tail formula") {
    CHECK(laplace_tail(0.0, LaplaceScale(1.0)) == 1.0);
    CHECK(laplace_tail(2.0, LaplaceScale(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // tau = lambda * ln(4/beta) leaves exactly beta/4 of the mass
    const double beta = 0.4;
    for (double lambda : {0.5, 1.0, 7.0}) {
        CHECK(laplace_tail(lambda * std::log(4.0 / beta), LaplaceScale(lambda)) ==
              doctest::Approx(beta / 4.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(laplace_tail(-0.1, LaplaceScale(1.0)), std::domain_error);
}

TEST_CASE("hoeffding radius") {
    CHECK_THROWS_AS(hoeffding_radius(1, 1.0, 2.0), std::domain_error);
    CHECK(hoeffding_radius(1, 1.0, 2.0 / std::exp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hoeffding_radius(200, 1.0, 0.05) ==
          doctest::Approx(std::sqrt(std::log(40.0) / 400.0)).epsilon(1e-12));
    CHECK(hoeffding_radius(200, 1.0, 0.05) == doctest::Approx(0.096034).epsilon(1e-4));
    // 4x the samples halves the radius
    CHECK(hoeffding_radius(800, 1.0, 0.05) ==
          doctest::Approx(hoeffding_radius(200, 1.0, 0.05) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(hoeffding_radius(0, 1.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(hoeffding_radius(5, -1.0, 0.1), std::domain_error);
}

TEST_CASE("fact1 lhs values and grid crossings") {
    const double e = std::exp(1.0);
    CHECK(fact1_lhs(e, std::exp(e)) == doctest::Approx(2.0 / std::exp(e)).epsilon(1e-12));

    // b = 0.01, a = 2: above threshold just past e, below it at twice the
    // log-log solution
    CHECK(fact1_lhs(2.0, e + 0.001) > 0.01);
    CHECK(fact1_lhs(2.0, 2.0 * std::log(2.0 * std::log(100.0)) / 0.01) < 0.01);

    for (double a : {1.5, 2.0, 10.0}) {
        for (double b : {1e-2, 1e-3, 1e-4}) {
            const double x_low = std::log(a * std::log(1.0 / b)) / b;
            CHECK(fact1_lhs(a, x_low) > b);
            CHECK(fact1_lhs(a, 2.0 * x_low) < b);
        }
    }
    CHECK_THROWS_AS(fact1_lhs(1.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(fact1_lhs(2.0, 2.0), std::domain_error);
}

TEST_CASE("noise source determinism and substream separation") {
    NoiseSource a(1234, 7);
    NoiseSource b(1234, 7);
    for (int i = 0; i < 1'000'000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }

    // distinct stream ids diverge immediately
    NoiseSource c(1234, 8);
    NoiseSource d(1234, 7);
    int agreements = 0;
    for (int i = 0; i < 64; ++i) {
        agreements += (c.next_u64() == d.next_u64());
    }
    CHECK(agreements == 0);

    // substreams are anchored at the initial state, not the current position
    NoiseSource parent(42, 0);
    NoiseSource before = parent.substream(3);
    parent.next_u64();
    parent.next_u64();
    NoiseSource after = parent.substream(3);
    for (int i = 0; i < 16; ++i) {
        CHECK(before.next_u64() == after.next_u64());
    }
}

TEST_CASE("zero-noise source silences laplace draws only") {
    NoiseSource zero(9, 1, true);
    for (int i = 0; i < 100; ++i) {
        CHECK(zero.laplace(LaplaceScale(5.0)) == 0.0);
    }
    NoiseSource child = zero.substream(4);
    CHECK(child.zero_noise());
    CHECK(child.laplace(LaplaceScale(1.0)) == 0.0);
    // bernoulli still live
    int ones = 0;
    for (int i = 0; i < 1000; ++i) {
        ones += zero.bernoulli(0.5);
    }
    CHECK(ones > 400);
    CHECK(ones < 600);
}

TEST_CASE("laplace sample moments") {
    const double lambda = 1.5;
    const int n = 1'000'000;
    NoiseSource src(2024, 0);
    double sum = 0.0;
    double sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = src.laplace(LaplaceScale(lambda));
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01 * lambda * std::sqrt(2.0));
    CHECK(var == doctest::Approx(2.0 * lambda * lambda).epsilon(0.05));
}

TEST_CASE("laplace tail agreement with the analytic formula") {
    const double lambda = 2.0;
    const int n = 400'000;
    NoiseSource src(7, 3);
    std::vector<double> draws(n);
    for (double& x : draws) {
        x = src.laplace(LaplaceScale(lambda));
    }
    for (double mult : {1.0, 2.0, 4.0}) {
        const double tau = mult * lambda;
        const double expected = laplace_tail(tau, LaplaceScale(lambda));
        int count = 0;
        for (double x : draws) {
            count += std::fabs(x) > tau;
        }
        const double freq = static_cast<double>(count) / n;
        const double se = std::sqrt(expected * (1.0 - expected) / n);
        CHECK(std::fabs(freq - expected) <= 4.0 * se);
    }
}

TEST_CASE("monte-carlo dp ratio of the laplace mechanism") {
    // Two inputs one unit of global sensitivity apart; binned log-frequency
    // ratios must stay below epsilon plus sampling slack in every bin.
    const double epsilon = 1.0;
    const double gs = 1.0;
    const double v1 = 0.0;
    const double v2 = v1 + gs;
    const int n = 200'000;
    const int bins = 20;
    const double lo = -2.0;
    const double hi = 3.0;
    const double width = (hi - lo) / bins;

    std::vector<int> count1(bins, 0);
    std::vector<int> count2(bins, 0);
    NoiseSource s1(11, 0);
    NoiseSource s2(11, 1);
    auto bin_of = [&](double x) {
        const int b = static_cast<int>(std::floor((x - lo) / width));
        return std::clamp(b, 0, bins - 1);
    };
    for (int i = 0; i < n; ++i) {
        ++count1[bin_of(v1 + s1.laplace(LaplaceScale(gs / epsilon)))];
        ++count2[bin_of(v2 + s2.laplace(LaplaceScale(gs / epsilon)))];
    }
    for (int b = 0; b < bins; ++b) {
        const double p1 = static_cast<double>(count1[b]) / n;
        const double p2 = static_cast<double>(count2[b]) / n;
        REQUIRE(count1[b] > 0);
        REQUIRE(count2[b] > 0);
        const double se1 = std::sqrt((1.0 - p1) / (n * p1));
        const double se2 = std::sqrt((1.0 - p2) / (n * p2));
        const double slack = 3.0 * std::sqrt(se1 * se1 + se2 * se2);
        CHECK(std::fabs(std::log(p1 / p2)) <= epsilon + slack);
    }
}

TEST_SUITE_END();
