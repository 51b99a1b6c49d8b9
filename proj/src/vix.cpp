#include "randiff/vix.hpp"

#include <cmath>
#include <stdexcept>

#include "randiff/special_functions.hpp"

namespace randiff {

namespace {

using namespace std::complex_literals;

// Below this vix^2 standard deviation the transition law is numerically a
// point mass and the density route degenerates; price the deterministic limit.
constexpr double kDegenerateStd = 1e-8;

}  // namespace

VixCoefficients vix_coefficients(const BatesParams& p, double t, double T) {
    p.validate();
    if (!(T > t)) throw std::invalid_argument("vix_coefficients: T > t required");
    if (!(t > 0.0)) throw std::invalid_argument("vix_coefficients: window start t must be > 0");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("vix_coefficients: gamma > 0 required");
    if (!(p.kappa > 0.0)) throw std::invalid_argument("vix_coefficients: kappa > 0 required");

    VixCoefficients k;
    k.t = t;
    k.T = T;
    const double tenor = T - t;
    const double x = p.kappa * tenor;
    // a = (1 - e^{-x}) / x with the x -> 0 limit handled by expm1.
    k.a = x > 1e-12 ? -std::expm1(-x) / x : 1.0 - 0.5 * x;
    k.b = p.vbar * (1.0 - k.a);
    k.c = 2.0 * p.lambda * (std::exp(p.mu_j + 0.5 * p.sigma_j * p.sigma_j) - p.mu_j - 1.0);

    const double em = std::exp(-p.kappa * t);
    k.c_bar = p.gamma * p.gamma / (4.0 * p.kappa) * (1.0 - em);
    k.delta = 4.0 * p.kappa * p.vbar / (p.gamma * p.gamma);
    k.kappa_bar = 4.0 * p.kappa * em * p.v0 / (p.gamma * p.gamma * (1.0 - em));
    return k;
}

double vix_pdf(double x, const VixCoefficients& k) {
    const double floor_x = std::sqrt(k.alpha2());
    if (!(x > floor_x)) return 0.0;
    const double a1 = k.alpha1();
    // (x - floor)(x + floor) keeps precision just above the support floor,
    // where x^2 - alpha2 cancels catastrophically.
    const double q = a1 * (x - floor_x) * (x + floor_x);
    return 2.0 * a1 * x * ncchi2_pdf(q, k.delta, k.kappa_bar);
}

double vix_cdf(double x, const VixCoefficients& k) {
    const double floor_x = std::sqrt(k.alpha2());
    if (!(x > floor_x)) return 0.0;
    return ncchi2_cdf(k.alpha1() * (x - floor_x) * (x + floor_x), k.delta, k.kappa_bar);
}

cplx vix2_chf(cplx u, const VixCoefficients& k) {
    const double a1 = k.alpha1();
    const cplx iu = 1i * u;
    const double acb = k.a * k.c_bar;
    return std::exp(iu * k.alpha2()) * std::pow(a1 / (a1 - 2.0 * iu), 0.5 * k.delta) *
           std::exp(iu * acb * k.kappa_bar / (1.0 - 2.0 * iu * acb));
}

namespace {

double vix2_upper(const VixCoefficients& k) {
    // chi^2 tail mass below 1e-12 beyond this point (closed-form bound).
    const double q = ncchi2_tail_bound(1e-12, k.delta, k.kappa_bar);
    return k.alpha2() + q / k.alpha1();
}

double vix_call_integral(double strike, const VixCoefficients& k, double rate, double horizon) {
    const double floor_x = std::sqrt(k.alpha2());
    const double mean_v2 = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
    const double std_v2 = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
    const double df = std::exp(-rate * horizon);
    if (std_v2 < kDegenerateStd) {
        return 100.0 * df * std::max(std::sqrt(mean_v2) - strike, 0.0);
    }
    const double lo = std::max(strike, floor_x);
    const double hi = std::sqrt(vix2_upper(k));
    if (lo >= hi) return 0.0;

    if (k.delta < 2.0 && lo <= floor_x * (1.0 + 1e-10)) {
        // The density behaves like (x^2 - alpha2)^{delta/2 - 1} at the floor.
        // For very small delta a non-negligible probability lives within an
        // unrepresentable 1e-17 gap of the floor; book it analytically via
        // the cdf and integrate the rest over the gap h = x - floor = t^p.
        const double p = std::ceil(2.4 / k.delta) * 2.0;
        const double h0 = 1e-12;
        const double head = (floor_x - strike) * vix_cdf(floor_x + h0, k);
        const auto integrand = [&](double t) {
            const double x = floor_x + std::pow(t, p);
            return (x - strike) * vix_pdf(x, k) * p * std::pow(t, p - 1.0);
        };
        const double body = integrate_adaptive(integrand, std::pow(h0, 1.0 / p),
                                               std::pow(hi - floor_x, 1.0 / p), 1e-12);
        return 100.0 * df * (head + body);
    }
    const auto integrand = [&](double x) { return (x - strike) * vix_pdf(x, k); };
    const double tol = 1e-12 * std::max(1.0, mean_v2);
    return 100.0 * df * integrate_adaptive(integrand, lo, hi, tol);
}

}  // namespace

double vix_mean(const VixCoefficients& k) {
    const double mean_v2 = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
    const double std_v2 = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
    if (std_v2 < kDegenerateStd) return std::sqrt(mean_v2);
    const double hi = std::sqrt(vix2_upper(k));
    const double floor_x = std::sqrt(k.alpha2());
    if (k.delta < 2.0) {
        const double p = std::ceil(2.4 / k.delta) * 2.0;
        const double h0 = 1e-12;
        const double head = floor_x * vix_cdf(floor_x + h0, k);
        const double body = integrate_adaptive(
            [&](double t) {
                const double x = floor_x + std::pow(t, p);
                return x * vix_pdf(x, k) * p * std::pow(t, p - 1.0);
            },
            std::pow(h0, 1.0 / p), std::pow(hi - floor_x, 1.0 / p), 1e-13);
        return head + body;
    }
    return integrate_adaptive([&](double x) { return x * vix_pdf(x, k); }, floor_x, hi, 1e-13);
}

double vix_option_direct(double strike, double t, double T, double deltaT, const BatesParams& p) {
    if (!(strike >= 0.0)) throw std::invalid_argument("vix_option_direct: strike >= 0 required");
    if (!(T > t) || !(deltaT > 0.0)) throw std::invalid_argument("vix_option_direct: bad window");
    // Window (T, T + deltaT), CIR transition over (t, T): shift so the
    // valuation date is 0 and vix_coefficients' convention applies.
    const double h = T - t;
    const auto k = vix_coefficients(p, h, h + deltaT);
    return vix_call_integral(strike, k, p.rate, h);
}

double vix_option_rand(double strike, double t, double T, double deltaT, const BatesParams& p,
                       ParamSlot slot, const DistributionSpec& spec, int order) {
    const auto rule = quadrature_rule(spec, order);
    double acc = 0.0;
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        if (!slot_admissible(slot, rule.nodes[n]))
            throw std::domain_error("vix_option_rand: node " + std::to_string(rule.nodes[n]) +
                                    " inadmissible for slot " + slot_name(slot));
        acc += rule.weights[n] * vix_option_direct(strike, t, T, deltaT, with_slot(p, slot, rule.nodes[n]));
    }
    return acc;
}

namespace {

// Per-node batch pricing from the survival identity
//   E[(VIX - K)^+] = int_K^inf S(x) dx,  S = 1 - F_vix,
// with S tabulated once on the singularity-absorbing grid x = floor + t^p
// and strikes reading tail integrals off the cumulative Simpson table.
void vix_node_batch(const std::vector<double>& strikes, const VixCoefficients& k, double df_disc,
                    int n_intervals, std::vector<double>& acc, double weight) {
    const double mean_v2 = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
    const double std_v2 = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
    if (std_v2 < kDegenerateStd) {
        const double x_det = std::sqrt(mean_v2);
        for (std::size_t i = 0; i < strikes.size(); ++i)
            acc[i] += weight * 100.0 * df_disc * std::max(x_det - strikes[i], 0.0);
        return;
    }
    const double floor_x = std::sqrt(k.alpha2());
    const double hi = std::sqrt(vix2_upper(k));
    const double p = k.delta < 2.0 ? std::ceil(2.4 / k.delta) * 2.0 : 1.0;
    const double t_hi = std::pow(hi - floor_x, 1.0 / p);
    const int n = n_intervals;
    const double h = t_hi / n;

    // G at the 2n+1 Simpson points.
    std::vector<double> g(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) {
        const double t = 0.5 * h * i;
        const double x = floor_x + std::pow(t, p);
        const double surv = 1.0 - vix_cdf(x, k);
        g[static_cast<std::size_t>(i)] = surv * (p == 1.0 ? 1.0 : p * std::pow(t, p - 1.0));
    }
    // Cumulative tail integral at the main nodes.
    std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        const double piece =
            h / 6.0 * (g[static_cast<std::size_t>(2 * i)] + 4.0 * g[static_cast<std::size_t>(2 * i + 1)] +
                       g[static_cast<std::size_t>(2 * i + 2)]);
        tail[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i + 1)] + piece;
    }

    for (std::size_t s = 0; s < strikes.size(); ++s) {
        const double strike = strikes[s];
        if (strike >= hi) continue;
        double integral = std::max(floor_x - strike, 0.0);  // S = 1 below the floor
        const double xlo = std::max(strike, floor_x);
        const double t_k = std::pow(std::max(xlo - floor_x, 0.0), 1.0 / p);
        if (t_k < t_hi) {
            int i = std::min(static_cast<int>(t_k / h), n - 1);
            const double sk = (t_k - i * h) / h;  // in [0, 1]
            const double g0 = g[static_cast<std::size_t>(2 * i)];
            const double gm = g[static_cast<std::size_t>(2 * i + 1)];
            const double g1 = g[static_cast<std::size_t>(2 * i + 2)];
            // Tail piece of the interval's Lagrange quadratic from sk to 1.
            auto anti = [&](double x_) {
                return g0 * (2.0 * x_ * x_ * x_ / 3.0 - 1.5 * x_ * x_ + x_) +
                       gm * (-4.0 * x_ * x_ * x_ / 3.0 + 2.0 * x_ * x_) +
                       g1 * (2.0 * x_ * x_ * x_ / 3.0 - 0.5 * x_ * x_);
            };
            integral += h * (anti(1.0) - anti(sk)) + tail[static_cast<std::size_t>(i) + 1];
        }
        acc[s] += weight * 100.0 * df_disc * integral;
    }
}

}  // namespace

std::vector<double> vix_option_rand_batch(const std::vector<double>& strikes, double t, double T,
                                          double deltaT, const BatesParams& p, ParamSlot slot,
                                          const DistributionSpec& spec, int order,
                                          int grid_points) {
    if (!(T > t) || !(deltaT > 0.0)) throw std::invalid_argument("vix_option_rand_batch: bad window");
    const auto rule = quadrature_rule(spec, order);
    const double h = T - t;
    const double df_disc = std::exp(-p.rate * h);
    std::vector<double> acc(strikes.size(), 0.0);
    const int n_intervals = std::max(grid_points - 1, 32);
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        if (!slot_admissible(slot, rule.nodes[n]))
            throw std::domain_error("vix_option_rand_batch: inadmissible node");
        const auto k = vix_coefficients(with_slot(p, slot, rule.nodes[n]), h, h + deltaT);
        vix_node_batch(strikes, k, df_disc, n_intervals, acc, rule.weights[n]);
    }
    return acc;
}

Range truncation_range_vix2(const VixCoefficients& k, double level) {
    const double mean = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
    const double sd = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
    // The support floor b + c dominates the Chebyshev-style lower bound.
    return {std::max(k.alpha2(), mean - level * sd), mean + level * sd};
}

namespace {

double vix_cos_price_one(double strike, const VixCoefficients& k, double rate, double horizon,
                         int n_terms, double level) {
    const double mean_v2 = k.a * k.c_bar * (k.delta + k.kappa_bar) + k.alpha2();
    const double std_v2 = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
    if (std_v2 < kDegenerateStd)
        return 100.0 * std::exp(-rate * horizon) * std::max(std::sqrt(mean_v2) - strike, 0.0);
    Range r = truncation_range_vix2(k, level);
    // hk_vix needs a < K^2; the density below the support floor is zero so
    // lowering a there is harmless.
    if (r.a >= strike * strike) r.a = std::max(0.0, 0.99 * strike * strike);
    if (r.b <= strike * strike) return 0.0;
    CharacteristicFn chf{[k](cplx u) { return vix2_chf(u, k); }, horizon};
    CosConfig cfg{r.a, r.b, n_terms, rate, horizon};
    return 100.0 * cos_price(chf, hk_vix(strike, r.a, r.b, n_terms), cfg);
}

}  // namespace

double vix_option_cos(double strike, double t, double T, double deltaT, const BatesParams& p,
                      int n_terms, double level) {
    const double h = T - t;
    const auto k = vix_coefficients(p, h, h + deltaT);
    return vix_cos_price_one(strike, k, p.rate, h, n_terms, level);
}

double vix_option_cos_rand(double strike, double t, double T, double deltaT, const BatesParams& p,
                           ParamSlot slot, const DistributionSpec& spec, int order, int n_terms,
                           double level) {
    const auto rule = quadrature_rule(spec, order);
    const double h = T - t;
    // One envelope range and one coefficient vector for all nodes, then a
    // single primed sum against the weighted ChF mixture.
    Range env{1e300, -1e300};
    std::vector<VixCoefficients> ks;
    ks.reserve(rule.nodes.size());
    bool all_degenerate = true;
    for (double theta : rule.nodes) {
        if (!slot_admissible(slot, theta))
            throw std::domain_error("vix_option_cos_rand: inadmissible node");
        const auto k = vix_coefficients(with_slot(p, slot, theta), h, h + deltaT);
        const Range r = truncation_range_vix2(k, level);
        env.a = std::min(env.a, r.a);
        env.b = std::max(env.b, r.b);
        const double sd = k.a * k.c_bar * std::sqrt(2.0 * k.delta + 4.0 * k.kappa_bar);
        if (sd >= kDegenerateStd) all_degenerate = false;
        ks.push_back(k);
    }
    if (all_degenerate) {
        double acc = 0.0;
        for (std::size_t n = 0; n < ks.size(); ++n)
            acc += rule.weights[n] * vix_cos_price_one(strike, ks[n], p.rate, h, n_terms, level);
        return acc;
    }
    if (env.a >= strike * strike) env.a = std::max(0.0, 0.99 * strike * strike);
    if (env.b <= strike * strike) return 0.0;
    const auto weights = rule.weights;
    CharacteristicFn mix{[ks, weights](cplx u) {
                             cplx acc = 0.0;
                             for (std::size_t n = 0; n < ks.size(); ++n)
                                 acc += weights[n] * vix2_chf(u, ks[n]);
                             return acc;
                         },
                         h};
    CosConfig cfg{env.a, env.b, n_terms, p.rate, h};
    return 100.0 * cos_price(mix, hk_vix(strike, env.a, env.b, n_terms), cfg);
}

}  // namespace randiff
