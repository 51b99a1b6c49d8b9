#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "randiff/cos.hpp"

using namespace randiff;

TEST_CASE("cos price reproduces black-scholes to 1e-8") {
    const double s0 = 100.0, tau = 1.0;
    const double sigma = 0.2;
    const auto chf = chf_bs(tau, std::log(s0), 0.0, sigma);
    const Range r = truncation_range_bs(std::log(s0), 0.0, sigma, tau, 10.0);
    VanillaSpec v{s0, 100.0, 0.0, tau, OptionKind::Call};
    CHECK(std::fabs(cos_vanilla_price(chf, v, r.a, r.b, 512) - bs_price(v, sigma)) < 1e-8);
    VanillaSpec p{s0, 100.0, 0.0, tau, OptionKind::Put};
    CHECK(std::fabs(cos_vanilla_price(chf, p, r.a, r.b, 512) - bs_price(p, sigma)) < 1e-8);
}

TEST_CASE("degenerate chf at the log strike recovers the payoff at that point") {
    // chf of a point mass at y0: e^{iu y0}; pricing a call then gives
    // e^{-r tau} (e^{y0} - K)^+ up to COS smoothing of the delta mass.
    const double y0 = std::log(105.0);
    CharacteristicFn chf{[y0](cplx u) {
                             using namespace std::complex_literals;
                             return std::exp(1i * u * y0);
                         },
                         0.5};
    // A point mass is not COS-resolvable, so use a narrow BS instead: sigma -> 0.
    const double sigma = 1e-4, tau = 0.5;
    const auto nchf = chf_bs(tau, y0, 0.0, sigma);
    VanillaSpec v{105.0, 100.0, 0.0, tau, OptionKind::Call};
    const Range r{y0 - 0.05, y0 + 0.05};
    const double px = cos_vanilla_price(nchf, v, r.a, r.b, 1024);
    CHECK(px == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("hk_vanilla equals brute-force payoff-cosine quadrature to 1e-10") {
    const double a = std::log(60.0), b = std::log(160.0), strike = 100.0;
    const int n = 16;
    for (auto kind : {OptionKind::Call, OptionKind::Put}) {
        const auto hk = hk_vanilla(kind, strike, a, b, n);
        for (int k = 0; k < n; ++k) {
            const double ref = oracles::integrate(
                [&](double y) {
                    const double payoff = kind == OptionKind::Call ? std::max(std::exp(y) - strike, 0.0)
                                                                   : std::max(strike - std::exp(y), 0.0);
                    return 2.0 / (b - a) * payoff * std::cos(k * std::numbers::pi * (y - a) / (b - a));
                },
                kind == OptionKind::Call ? std::log(strike) : a,
                kind == OptionKind::Call ? b : std::log(strike), 64);
            CHECK(std::fabs(hk[static_cast<std::size_t>(k)] - ref) < 1e-10);
        }
    }
}

TEST_CASE("strike outside the range on the high side zeroes the call coefficients") {
    const auto hk = hk_vanilla(OptionKind::Call, 200.0, std::log(60.0), std::log(160.0), 32);
    for (double h : hk) CHECK(h == 0.0);
}

TEST_CASE("put/call H0 difference integrates the forward payoff difference") {
    const double a = std::log(60.0), b = std::log(160.0), strike = 100.0;
    const auto hc = hk_vanilla(OptionKind::Call, strike, a, b, 8);
    const auto hp = hk_vanilla(OptionKind::Put, strike, a, b, 8);
    const double ref =
        2.0 / (b - a) * ((std::exp(b) - std::exp(a)) - strike * (b - a));  // int (e^y - K) dy
    CHECK(hc[0] - hp[0] == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("hk_vix closed form matches quadrature") {
    const double a = 0.01, b = 0.36, strike = 0.22;

    SUBCASE("k = 0 branch is the printed closed form") {
        const auto hk = hk_vix(strike, a, b, 1);
        const double expected =
            2.0 / (b - a) *
            ((2.0 / 3.0) * (std::pow(b, 1.5) - strike * strike * strike) - strike * (b - strike * strike));
        CHECK(hk[0] == doctest::Approx(expected).epsilon(1e-14));
    }

    SUBCASE("k = 1..8 match brute-force integration to 1e-8") {
        const auto hk = hk_vix(strike, a, b, 9);
        for (int k = 1; k <= 8; ++k) {
            const double ref = oracles::integrate(
                [&](double y) {
                    return 2.0 / (b - a) * std::max(std::sqrt(y) - strike, 0.0) *
                           std::cos(k * std::numbers::pi * (y - a) / (b - a));
                },
                strike * strike, b, 64);
            CHECK(std::fabs(hk[static_cast<std::size_t>(k)] - ref) < 1e-8);
        }
    }

    SUBCASE("K^2 -> b empties the exercise region") {
        const double k2b = std::sqrt(b * (1.0 - 1e-10));
        const auto hk = hk_vix(k2b, a, b, 16);
        for (double h : hk) CHECK(std::fabs(h) < 1e-6);
    }

    SUBCASE("preconditions raise") {
        CHECK_THROWS_AS(hk_vix(0.05, 0.01, 0.36, 8), std::domain_error);   // a >= K^2
        CHECK_THROWS_AS(hk_vix(0.7, 0.01, 0.36, 8), std::domain_error);    // K^2 >= b
    }
}

TEST_CASE("bs truncation range is symmetric around the drifted mean") {
    const double x0 = std::log(100.0), sigma = 0.2, tau = 1.0;
    const Range r = truncation_range_bs(x0, 0.0, sigma, tau, 10.0);
    const double centre = x0 - 0.5 * sigma * sigma * tau;
    CHECK(r.a == doctest::Approx(centre - 2.0));
    CHECK(r.b == doctest::Approx(centre + 2.0));
}

TEST_CASE("envelope range contains every node's range") {
    const auto rule = quadrature_rule(DistributionSpec::uniform(0.1, 0.45), 8);
    const double x0 = std::log(100.0), tau = 0.1;
    const Range env = truncation_range_envelope_bs(x0, 0.0, rule, tau, 10.0);
    for (double theta : rule.nodes) {
        const Range r = truncation_range_bs(x0, 0.0, theta, tau, 10.0);
        CHECK(env.a <= r.a + 1e-15);
        CHECK(env.b >= r.b - 1e-15);
    }
    const Range widest = truncation_range_bs(x0, 0.0, rule.nodes.back(), tau, 10.0);
    CHECK(env.a < widest.a + 1e-12);
    CHECK(env.b >= widest.b - 1e-15);
}

TEST_CASE("cos error decays in the number of terms") {
    const double s0 = 100.0, tau = 0.5, sigma = 0.25;
    const auto chf = chf_bs(tau, std::log(s0), 0.0, sigma);
    const Range r = truncation_range_bs(std::log(s0), 0.0, sigma, tau, 10.0);
    VanillaSpec v{s0, 95.0, 0.0, tau, OptionKind::Call};
    const double ref = cos_vanilla_price(chf, v, r.a, r.b, 4096);
    double prev = 1e9;
    for (int n : {64, 128, 256, 512}) {
        const double err = std::fabs(cos_vanilla_price(chf, v, r.a, r.b, n) - ref);
        CHECK(err <= prev + 1e-15);
        prev = err;
    }
}

TEST_CASE("doubling the range level moves a converged price by < 1e-6") {
    const double s0 = 100.0, tau = 0.5, sigma = 0.25;
    const auto chf = chf_bs(tau, std::log(s0), 0.02, sigma);
    VanillaSpec v{s0, 105.0, 0.02, tau, OptionKind::Call};
    const Range r1 = truncation_range_bs(std::log(s0), 0.02, sigma, tau, 8.0);
    const Range r2 = truncation_range_bs(std::log(s0), 0.02, sigma, tau, 16.0);
    const double p1 = cos_vanilla_price(chf, v, r1.a, r1.b, 2048);
    const double p2 = cos_vanilla_price(chf, v, r2.a, r2.b, 4096);
    CHECK(std::fabs(p1 - p2) < 1e-6);
}
