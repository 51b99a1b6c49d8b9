// Synthetic joint index/VIX quote surfaces generated from a randomized-gamma
// Bates model, shared by the calibration tests and the acceptance suite.
#pragma once

#include <cmath>
#include <vector>

#include "randiff/black_scholes.hpp"
#include "randiff/calibration.hpp"
#include "randiff/cos.hpp"
#include "randiff/special_functions.hpp"
#include "randiff/vix.hpp"

namespace synthetic {

inline randiff::QuoteSurface make_joint_surface(const randiff::BatesParams& p,
                                                const randiff::DistributionSpec& law,
                                                const randiff::CalibrationOptions& opt,
                                                double expiry = 1.0 / 12) {
    using namespace randiff;
    QuoteSurface s;
    s.spot = std::exp(p.x0);
    s.rate = p.rate;

    // Index legs: COS prices -> implied vols.
    const auto rule = quadrature_rule(law, opt.quad_order);
    const auto chf = randomize_chf_bates(p, opt.random_slot, law, opt.quad_order, expiry);
    const Range r = truncation_range_envelope_bates(p, opt.random_slot, rule, expiry, opt.cos_level);
    for (double m : {-0.12, -0.10, -0.08, -0.06, -0.04, -0.02, 0.0, 0.02, 0.04, 0.06, 0.08}) {
        Quote q;
        q.underlying = Underlying::Index;
        q.expiry = expiry;
        q.strike = s.spot * std::exp(m);
        VanillaSpec v{s.spot, q.strike, s.rate, expiry, OptionKind::Call};
        q.mid_iv = implied_vol(cos_vanilla_price(chf, v, r.a, r.b, opt.cos_terms), v);
        s.quotes.push_back(q);
    }

    // VIX legs priced through the same batch route the calibration objective
    // uses, so a round trip has exactly zero residual at the generator.
    const std::vector<double> vix_strikes{14.0, 17.0, 20.0, 23.0, 26.0, 30.0, 34.0};
    std::vector<double> ks{0.0};
    for (double kq : vix_strikes) ks.push_back(kq / 100.0);
    const auto px_all = vix_option_rand_batch(ks, 0.0, expiry, opt.vix_tenor, p, opt.random_slot,
                                              law, opt.quad_order);
    const double df = std::exp(-s.rate * expiry);
    const double fwd = px_all[0] / df;
    for (std::size_t i = 0; i < vix_strikes.size(); ++i) {
        const double kq = vix_strikes[i];
        Quote q;
        q.underlying = Underlying::Vix;
        q.expiry = expiry;
        q.strike = kq;
        const double px = px_all[i + 1];
        // Invert through the Black proxy used by the calibration objective.
        double lo = 1e-4, hi = 9.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double st = mid * std::sqrt(expiry);
            const double d1 = (std::log(fwd / kq) + 0.5 * mid * mid * expiry) / st;
            const double black = df * (fwd * norm_cdf(d1) - kq * norm_cdf(d1 - st));
            (black < px ? lo : hi) = mid;
        }
        q.mid_iv = 0.5 * (lo + hi);
        s.quotes.push_back(q);
    }
    return s;
}

}  // namespace synthetic
