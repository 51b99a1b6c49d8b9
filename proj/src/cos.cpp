#include "randiff/cos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "randiff/special_functions.hpp"

namespace randiff {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void CosConfig::validate() const {
    if (!(a < b)) throw std::invalid_argument("CosConfig: a < b required");
    if (n_terms < 16) throw std::invalid_argument("CosConfig: n_terms >= 16 required");
    if (!(tau > 0.0)) throw std::invalid_argument("CosConfig: tau > 0 required");
}

double cos_price(const CharacteristicFn& chf, const std::vector<double>& hk, const CosConfig& cfg) {
    cfg.validate();
    if (hk.size() != static_cast<std::size_t>(cfg.n_terms))
        throw std::invalid_argument("cos_price: coefficient count mismatch");
    const double bma = cfg.b - cfg.a;
    double sum = 0.0;
    for (int k = 0; k < cfg.n_terms; ++k) {
        const double u = k * kPi / bma;
        const cplx phase(std::cos(u * cfg.a), -std::sin(u * cfg.a));
        double term = std::real(chf(u) * phase) * hk[static_cast<std::size_t>(k)];
        if (k == 0) term *= 0.5;
        sum += term;
    }
    return std::exp(-cfg.rate * cfg.tau) * sum;
}

namespace {

// chi_k(c,d) = int_c^d e^y cos(k pi (y-a)/(b-a)) dy, psi_k likewise with 1.
double chi_k(int k, double a, double b, double c, double d) {
    const double w = k * kPi / (b - a);
    const double wd = w * (d - a), wc = w * (c - a);
    return (std::cos(wd) * std::exp(d) - std::cos(wc) * std::exp(c) +
            w * (std::sin(wd) * std::exp(d) - std::sin(wc) * std::exp(c))) /
           (1.0 + w * w);
}

double psi_k(int k, double a, double b, double c, double d) {
    if (k == 0) return d - c;
    const double w = k * kPi / (b - a);
    return (std::sin(w * (d - a)) - std::sin(w * (c - a))) / w;
}

}  // namespace

std::vector<double> hk_vanilla(OptionKind kind, double strike, double a, double b, int n_terms) {
    if (!(a < b)) throw std::invalid_argument("hk_vanilla: a < b required");
    if (!(strike > 0.0)) throw std::invalid_argument("hk_vanilla: strike > 0 required");
    std::vector<double> hk(static_cast<std::size_t>(n_terms), 0.0);
    const double lk = std::log(strike);
    const double scale = 2.0 / (b - a);
    if (kind == OptionKind::Call) {
        const double c = std::clamp(lk, a, b);
        if (c >= b) return hk;  // strike above the range: zero payoff
        for (int k = 0; k < n_terms; ++k)
            hk[static_cast<std::size_t>(k)] = scale * (chi_k(k, a, b, c, b) - strike * psi_k(k, a, b, c, b));
    } else {
        const double d = std::clamp(lk, a, b);
        if (d <= a) return hk;
        for (int k = 0; k < n_terms; ++k)
            hk[static_cast<std::size_t>(k)] = scale * (strike * psi_k(k, a, b, a, d) - chi_k(k, a, b, a, d));
    }
    return hk;
}

std::vector<double> hk_vix(double strike, double a, double b, int n_terms) {
    if (!(a < strike * strike))
        throw std::domain_error("hk_vix: requires a < K^2; widen the range downwards");
    if (!(strike * strike < b))
        throw std::domain_error("hk_vix: requires K^2 < b; widen the range upwards");
    if (a < 0.0) throw std::domain_error("hk_vix: range must be nonnegative (y is vix^2)");

    std::vector<double> hk(static_cast<std::size_t>(n_terms));
    const double scale = 2.0 / (b - a);
    const double K = strike;

    // k = 0 branch.
    const double i1_0 = (2.0 / 3.0) * (std::pow(b, 1.5) - K * K * K);
    const double i2_0 = b - K * K;
    hk[0] = scale * i1_0 - K * scale * i2_0;

    for (int k = 1; k < n_terms; ++k) {
        const double k1 = k * kPi / (b - a);
        const double k2 = a * k * kPi / (b - a);
        const double a0 = 1.0 / (k1 * std::sqrt(k1));
        const double a1 = std::sqrt(b * k1);
        const double a2 = K * std::sqrt(k1);
        const double a3 = b * k1 - k2;
        const double a4 = K * K * k1 - k2;
        const double a5 = 1.0 / k1;
        const auto f1 = fresnel(a1);
        const auto f2 = fresnel(a2);
        const double i1 = a0 * (std::sin(k2) * (f1.c - f2.c) + std::cos(k2) * (f2.s - f1.s)) +
                          a5 * (std::sqrt(b) * std::sin(a3) - K * std::sin(a4));
        const double i2 = a5 * (std::sin(a3) + std::sin(-a4));
        hk[static_cast<std::size_t>(k)] = scale * i1 - K * scale * i2;
    }
    return hk;
}

namespace {

struct Cumulants {
    double c1;
    double c2;
    double c4;
};

Cumulants bates_cumulants(const BatesParams& p, double tau) {
    const double k = p.kappa, g = p.gamma, r = p.rho, vb = p.vbar, v0 = p.v0;
    Cumulants c{};
    const double ekt = k > 0.0 ? std::exp(-k * tau) : 1.0;
    const double one_m = k > 0.0 ? (1.0 - ekt) : 0.0;
    c.c1 = p.rate * tau + (k > 0.0 ? one_m * (vb - v0) / (2.0 * k) : 0.0) - 0.5 * vb * tau;
    if (g > 0.0 && k > 0.0) {
        c.c2 = 1.0 / (8.0 * k * k * k) *
               (g * tau * k * ekt * (v0 - vb) * (8.0 * k * r - 4.0 * g) +
                k * r * g * one_m * (16.0 * vb - 8.0 * v0) +
                2.0 * vb * k * tau * (-4.0 * k * r * g + g * g + 4.0 * k * k) +
                g * g * ((vb - 2.0 * v0) * std::exp(-2.0 * k * tau) + vb * (6.0 * ekt - 7.0) + 2.0 * v0) +
                8.0 * k * k * (v0 - vb) * one_m);
    } else {
        // Deterministic-variance fallback: integrated variance.
        const double ivc = k > 0.0 ? one_m / k : tau;
        c.c2 = vb * tau + (v0 - vb) * ivc;
    }
    // Degenerate or extreme parameters can push the closed form negative;
    // floor with the integrated-variance scale.
    const double iv = std::max(1e-12, vb * tau + (v0 - vb) * (k > 0.0 ? one_m / k : tau));
    c.c2 = std::max(c.c2, 0.01 * iv);
    // Jump contributions.
    const double m1 = std::exp(p.mu_j + 0.5 * p.sigma_j * p.sigma_j) - 1.0;
    c.c1 += p.lambda * tau * (p.mu_j - m1);
    c.c2 += p.lambda * tau * (p.mu_j * p.mu_j + p.sigma_j * p.sigma_j);
    const double mj2 = p.mu_j * p.mu_j, sj2 = p.sigma_j * p.sigma_j;
    c.c4 = p.lambda * tau * (mj2 * mj2 + 6.0 * mj2 * sj2 + 3.0 * sj2 * sj2);
    return c;
}

}  // namespace

Range truncation_range_bs(double x0, double rate, double sigma, double tau, double level) {
    const double c1 = x0 + (rate - 0.5 * sigma * sigma) * tau;
    const double w = level * std::sqrt(sigma * sigma * tau);
    return {c1 - w, c1 + w};
}

Range truncation_range_bates(const BatesParams& p, double tau, double level) {
    const auto c = bates_cumulants(p, tau);
    const double w = level * std::sqrt(c.c2 + std::sqrt(c.c4));
    return {p.x0 + c.c1 - w, p.x0 + c.c1 + w};
}

Range truncation_range_envelope_bates(const BatesParams& p, ParamSlot slot,
                                      const QuadratureRule& rule, double tau, double level) {
    Range env{1e300, -1e300};
    for (double theta : rule.nodes) {
        const Range r = truncation_range_bates(with_slot(p, slot, theta), tau, level);
        env.a = std::min(env.a, r.a);
        env.b = std::max(env.b, r.b);
    }
    return env;
}

Range truncation_range_envelope_bs(double x0, double rate, const QuadratureRule& sigma_rule,
                                   double tau, double level) {
    Range env{1e300, -1e300};
    for (double theta : sigma_rule.nodes) {
        const Range r = truncation_range_bs(x0, rate, theta, tau, level);
        env.a = std::min(env.a, r.a);
        env.b = std::max(env.b, r.b);
    }
    return env;
}

double cos_vanilla_price(const CharacteristicFn& chf, const VanillaSpec& v, double a, double b,
                         int n_terms) {
    v.validate();
    CosConfig cfg{a, b, n_terms, v.rate, v.expiry};
    const double put_px = cos_price(chf, hk_vanilla(OptionKind::Put, v.strike, a, b, n_terms), cfg);
    if (v.kind == OptionKind::Put) return put_px;
    return put_px + v.spot - v.strike * std::exp(-v.rate * v.expiry);
}

}  // namespace randiff
