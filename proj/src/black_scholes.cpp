#include "randiff/black_scholes.hpp"

#include <algorithm>
#include <cmath>

#include "randiff/special_functions.hpp"

namespace randiff {

void VanillaSpec::validate() const {
    if (!(spot > 0.0)) throw std::invalid_argument("VanillaSpec: spot must be positive");
    if (!(strike > 0.0)) throw std::invalid_argument("VanillaSpec: strike must be positive");
    if (!(expiry > 0.0)) throw std::invalid_argument("VanillaSpec: expiry must be positive");
    if (!std::isfinite(rate)) throw std::invalid_argument("VanillaSpec: rate must be finite");
}

double bs_price(const VanillaSpec& v, double sigma) {
    v.validate();
    const double df = std::exp(-v.rate * v.expiry);
    if (!(sigma > 0.0)) {
        const double fwd_diff = v.spot - v.strike * df;
        const double call = std::max(fwd_diff, 0.0);
        return v.kind == OptionKind::Call ? call : call - fwd_diff;
    }
    const double st = sigma * std::sqrt(v.expiry);
    const double d1 = (std::log(v.spot / v.strike) + (v.rate + 0.5 * sigma * sigma) * v.expiry) / st;
    const double d2 = d1 - st;
    const double call = v.spot * norm_cdf(d1) - v.strike * df * norm_cdf(d2);
    // Put by parity.
    return v.kind == OptionKind::Call ? call : call - v.spot + v.strike * df;
}

double bs_vega(const VanillaSpec& v, double sigma) {
    v.validate();
    if (!(sigma > 0.0)) return 0.0;
    const double st = sigma * std::sqrt(v.expiry);
    const double d1 = (std::log(v.spot / v.strike) + (v.rate + 0.5 * sigma * sigma) * v.expiry) / st;
    return v.spot * std::sqrt(v.expiry) * norm_pdf(d1);
}

double implied_vol(double price, const VanillaSpec& v) {
    v.validate();
    const double df = std::exp(-v.rate * v.expiry);
    const double intrinsic = v.kind == OptionKind::Call ? std::max(v.spot - v.strike * df, 0.0)
                                                        : std::max(v.strike * df - v.spot, 0.0);
    const double upper = v.kind == OptionKind::Call ? v.spot : v.strike * df;
    if (price < intrinsic - 1e-12)
        throw no_implied_vol("implied_vol: price below intrinsic value", true);
    if (price > upper + 1e-12)
        throw no_implied_vol(v.kind == OptionKind::Call
                                 ? "implied_vol: price above spot"
                                 : "implied_vol: price above discounted strike",
                             false);

    double lo = 1e-6, hi = 5.0;
    const double p_lo = bs_price(v, lo), p_hi = bs_price(v, hi);
    if (price <= p_lo) return lo;
    if (price >= p_hi) return hi;

    double sigma = std::clamp(
        std::sqrt(2.0 * std::fabs(std::log(v.spot / (v.strike * df))) / v.expiry + 0.04), lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double f = bs_price(v, sigma) - price;
        if (std::fabs(f) < 1e-12 * std::max(1.0, price)) return sigma;
        if (f > 0.0) hi = sigma; else lo = sigma;
        const double vega = bs_vega(v, sigma);
        double next = vega > 1e-14 ? sigma - f / vega : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // safeguard: stay bracketed
        if (std::fabs(next - sigma) < 1e-14) return next;
        sigma = next;
    }
    return sigma;
}

}  // namespace randiff
