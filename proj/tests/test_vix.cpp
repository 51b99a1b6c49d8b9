#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "randiff/montecarlo.hpp"
#include "randiff/special_functions.hpp"
#include "randiff/vix.hpp"

using namespace randiff;

namespace {

// Table-5 first row: kappa 0.5, v0 0.170^2, vbar 0.23, rho -0.65, muJ -0.25,
// sigJ 0.05, lambda 0.25, gamma randomized U([0.01, 2.3]).
BatesParams table5_row1(double gamma) {
    return BatesParams{0.5, 0.23, gamma, -0.65, 0.170 * 0.170, 0.0, 0.25, -0.25, 0.05,
                       std::log(100.0)};
}

}  // namespace

TEST_CASE("vix coefficients") {
    SUBCASE("no jumps means c = 0") {
        BatesParams p = table5_row1(1.0);
        p.lambda = 0.0;
        const auto k = vix_coefficients(p, 1.0 / 12, 1.0 / 12 + 30.0 / 365);
        CHECK(k.c == 0.0);
        CHECK(k.b == doctest::Approx(p.vbar * (1.0 - k.a)));
    }
    SUBCASE("kappa (T - t) -> 0 gives a -> 1, b -> 0") {
        BatesParams p = table5_row1(1.0);
        p.kappa = 1e-9;
        const auto k = vix_coefficients(p, 0.25, 0.25 + 30.0 / 365);
        CHECK(k.a == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(k.b == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("affine map matches the log-contract Monte Carlo") {
        // -2/(T-t) E_t[log S(T)/S(t)] under Bates with v(t) = v0 known.
        BatesParams p = table5_row1(1.0);
        const double t = 0.0, tenor = 30.0 / 365;
        // Start the window at once (t=0) so v(t) = v0 exactly; simulate the
        // log return over the window.
        McConfig cfg;
        cfg.paths = 400000;
        cfg.steps_per_year = 2000;
        cfg.seed = 11;
        const auto run = simulate_bates_terminal(p, tenor, cfg);
        double s1 = 0.0, s2 = 0.0;
        for (double x : run.log_spot) {
            const double lr = x - p.x0 - p.rate * tenor;  // log S(T)/S(t) minus rate drift
            s1 += lr;
            s2 += lr * lr;
        }
        const double n = static_cast<double>(run.log_spot.size());
        const double mean = s1 / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        const double mc_vix2 = -2.0 / tenor * mean;
        // a v0 + b + c with window starting at t = 0: a(t,T) from the tenor.
        const double x = p.kappa * tenor;
        const double a = -std::expm1(-x) / x;
        const double b = p.vbar * (1.0 - a);
        const double c = 2.0 * p.lambda * (std::exp(p.mu_j + 0.5 * p.sigma_j * p.sigma_j) - p.mu_j - 1.0);
        const double analytic = a * p.v0 + b + c;
        CHECK(std::fabs(mc_vix2 - analytic) < 4.0 * (2.0 / tenor) * se);
        (void)t;
    }
}

TEST_CASE("vix pdf properties") {
    const auto k = vix_coefficients(table5_row1(1.0), 1.0 / 12, 1.0 / 12 + 30.0 / 365);

    SUBCASE("density integrates to one") {
        // delta < 2 concentrates ~1e-4 of mass within 1e-17 of the floor
        // (the density is x^{delta-2}-singular), which no x-space quadrature
        // can resolve in doubles; measure that head through the cdf and
        // integrate the rest with a gap substitution h = x - floor = t^p.
        const double floor_x = std::sqrt(k.alpha2());
        const double h0 = 1e-9;
        const double head = vix_cdf(floor_x + h0, k);
        const double p = std::ceil(2.4 / k.delta) * 2.0;
        const double body = oracles::integrate(
            [&](double t) {
                const double x = floor_x + std::pow(t, p);
                return vix_pdf(x, k) * p * std::pow(t, p - 1.0);
            },
            std::pow(h0, 1.0 / p), std::pow(3.0 - floor_x, 1.0 / p), 512);
        CHECK(std::fabs(head + body - 1.0) < 1e-8);
    }
    SUBCASE("cdf is the chi-square cdf of the mapped argument and matches the integrated pdf") {
        for (double x : {0.18, 0.25, 0.35, 0.5}) {
            const double direct = vix_cdf(x, k);
            const double mapped = ncchi2_cdf(k.alpha1() * (x * x - k.alpha2()), k.delta, k.kappa_bar);
            CHECK(direct == doctest::Approx(mapped).epsilon(1e-14));
            const double floor_x = std::sqrt(k.alpha2());
            const double h0 = 1e-9;
            const double head = vix_cdf(floor_x + h0, k);
            const double p = std::ceil(2.4 / k.delta) * 2.0;
            const double integ = oracles::integrate(
                [&](double t) {
                    const double xx = floor_x + std::pow(t, p);
                    return vix_pdf(xx, k) * p * std::pow(t, p - 1.0);
                },
                std::pow(h0, 1.0 / p), std::pow(x - floor_x, 1.0 / p), 256);
            CHECK(direct == doctest::Approx(head + integ).epsilon(1e-7));
        }
    }
    SUBCASE("no mass below the support floor") {
        CHECK(vix_pdf(0.9 * std::sqrt(k.alpha2()), k) == 0.0);
        CHECK(vix_pdf(-0.1, k) == 0.0);
    }
    SUBCASE("smooth-delta point normalizes with a plain oracle") {
        const auto ks = vix_coefficients(table5_row1(0.25), 1.0 / 12, 1.0 / 12 + 30.0 / 365);
        const double mass = oracles::integrate([&](double x) { return vix_pdf(x, ks); },
                                               std::sqrt(ks.alpha2()), 1.5, 512);
        CHECK(std::fabs(mass - 1.0) < 1e-8);
    }
}

TEST_CASE("vix^2 characteristic function") {
    const auto k = vix_coefficients(table5_row1(1.0), 1.0 / 12, 1.0 / 12 + 30.0 / 365);
    CHECK(std::abs(vix2_chf(cplx(0.0, 0.0), k) - 1.0) < 1e-15);

    SUBCASE("mean identity by central differences") {
        const double h = 1e-6;
        const cplx d = (vix2_chf(cplx(h, 0.0), k) - vix2_chf(cplx(-h, 0.0), k)) / (2.0 * h);
        const double mean = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
        CHECK(std::fabs((-cplx(0, 1) * d).real() - mean) < 1e-6);
    }
    SUBCASE("fourier inversion reproduces the affine-mapped density") {
        // COS reconstruction of the vix^2 density vs transformed ncchi2 pdf.
        // A smooth-density parameter point (delta > 2, gamma small) so the
        // cosine series converges pointwise.
        const auto ks = vix_coefficients(table5_row1(0.25), 1.0 / 12, 1.0 / 12 + 30.0 / 365);
        const Range r = truncation_range_vix2(ks, 14.0);
        const int n_terms = 8192;
        const double bma = r.b - r.a;
        for (double y = r.a + 0.05 * bma; y < r.b - 0.4 * bma; y += 0.03 * bma) {
            double acc = 0.0;
            for (int kk = 0; kk < n_terms; ++kk) {
                const double u = kk * std::numbers::pi / bma;
                const cplx phase(std::cos(u * r.a), -std::sin(u * r.a));
                double fk = 2.0 / bma * std::real(vix2_chf(cplx(u, 0.0), ks) * phase);
                if (kk == 0) fk *= 0.5;
                acc += fk * std::cos(u * (y - r.a));
            }
            const double direct =
                y > ks.alpha2()
                    ? ks.alpha1() * ncchi2_pdf(ks.alpha1() * (y - ks.alpha2()), ks.delta, ks.kappa_bar)
                    : 0.0;
            CHECK(std::fabs(acc - direct) < 1e-6 * std::max(1.0, direct));
        }
    }
}

TEST_CASE("direct vix option pricing") {
    const auto p = table5_row1(1.0);
    const double t = 0.0, T = 1.0 / 12, dT = 30.0 / 365;

    SUBCASE("k -> 0 degenerates to the discounted forward") {
        const auto k = vix_coefficients(p, T, T + dT);
        const double fwd = vix_mean(k);
        const double px = vix_option_direct(1e-12, t, T, dT, p);
        CHECK(px == doctest::Approx(100.0 * std::exp(-p.rate * T) * fwd).epsilon(1e-8));
    }
    SUBCASE("huge strike kills the option") {
        CHECK(vix_option_direct(5.0, t, T, dT, p) < 1e-12);
    }
    SUBCASE("monotone decreasing and convex in strike") {
        std::vector<double> prices;
        for (double kq = 0.10; kq <= 0.42; kq += 0.02)
            prices.push_back(vix_option_direct(kq, t, T, dT, p));
        for (std::size_t i = 1; i < prices.size(); ++i) CHECK(prices[i] < prices[i - 1]);
        for (std::size_t i = 1; i + 1 < prices.size(); ++i)
            CHECK(prices[i + 1] - 2.0 * prices[i] + prices[i - 1] > -1e-10);
    }
    SUBCASE("cos route cross-checks the density route to relative 1e-3") {
        for (double kq : {0.14, 0.18, 0.22, 0.26, 0.32}) {
            const double d = vix_option_direct(kq, t, T, dT, p);
            const double c = vix_option_cos(kq, t, T, dT, p, 1024, 12.0);
            CHECK(std::fabs(c / d - 1.0) < 1e-3);
        }
    }
}

TEST_CASE("randomized vix option pricing") {
    const auto p = table5_row1(1.0);
    const double t = 0.0, T = 1.0 / 12, dT = 30.0 / 365;
    const auto law = DistributionSpec::uniform(0.01, 2.3);

    SUBCASE("degenerate law is the direct price") {
        const double a = vix_option_rand(0.2, t, T, dT, p, ParamSlot::Gamma,
                                         DistributionSpec::degenerate(1.0), 6);
        CHECK(a == doctest::Approx(vix_option_direct(0.2, t, T, dT, p)).epsilon(1e-12));
    }
    SUBCASE("price is a convex combination of the node prices") {
        const auto rule = quadrature_rule(law, 8);
        double lo = 1e300, hi = -1e300;
        for (double g : rule.nodes) {
            const double px = vix_option_direct(0.2, t, T, dT, with_slot(p, ParamSlot::Gamma, g));
            lo = std::min(lo, px);
            hi = std::max(hi, px);
        }
        const double px = vix_option_rand(0.2, t, T, dT, p, ParamSlot::Gamma, law, 8);
        CHECK(px >= lo - 1e-12);
        CHECK(px <= hi + 1e-12);
    }
    SUBCASE("batch pricer agrees with the adaptive one across strikes") {
        std::vector<double> ks;
        for (double kq = 0.10; kq <= 0.40; kq += 0.03) ks.push_back(kq);
        const auto batch = vix_option_rand_batch(ks, t, T, dT, p, ParamSlot::Gamma, law, 6);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double direct = vix_option_rand(ks[i], t, T, dT, p, ParamSlot::Gamma, law, 6);
            CHECK(std::fabs(batch[i] - direct) < 1e-6 * std::max(direct, 0.01));
        }
        // Zero strike returns the discounted forward.
        const auto fwd = vix_option_rand_batch({0.0}, t, T, dT, p, ParamSlot::Gamma,
                                               DistributionSpec::degenerate(1.0), 1);
        const auto k0 = vix_coefficients(p, T, T + dT);
        CHECK(fwd[0] == doctest::Approx(100.0 * vix_mean(k0)).epsilon(1e-6));
    }

    SUBCASE("table-5 law vs monte carlo with exact CIR terminal sampling") {
        // E[(VIX - K)^+] with v(T) ~ cbar chi2(delta, kbar) per gamma node.
        const auto rule = quadrature_rule(law, 8);
        const double kq = 0.22;
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> z;
        double mc = 0.0, var_total = 0.0;
        const int m = 1000000;
        for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
            const auto pn = with_slot(p, ParamSlot::Gamma, rule.nodes[n]);
            const auto k = vix_coefficients(pn, T, T + dT);
            std::poisson_distribution<int> pois(0.5 * k.kappa_bar);
            double s1 = 0.0, s2 = 0.0;
            for (int i = 0; i < m; ++i) {
                std::gamma_distribution<double> g(0.5 * k.delta + pois(rng), 2.0);
                const double vT = k.c_bar * g(rng);
                const double vix = std::sqrt(k.a * vT + k.alpha2());
                const double pay = std::max(vix - kq, 0.0);
                s1 += pay;
                s2 += pay * pay;
            }
            const double mean = s1 / m;
            mc += rule.weights[n] * 100.0 * mean;
            const double v = (s2 / m - mean * mean) / m;
            var_total += rule.weights[n] * rule.weights[n] * 1e4 * v;
        }
        const double px = vix_option_rand(kq, t, T, dT, p, ParamSlot::Gamma, law, 8);
        CHECK(std::fabs(px - mc) < 4.0 * std::sqrt(var_total));
        (void)z;
    }
}
