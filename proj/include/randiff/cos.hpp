#pragma once

#include <vector>

#include "randiff/black_scholes.hpp"
#include "randiff/models.hpp"

namespace randiff {

struct CosConfig {
    double a = 0.0;          // truncation range [a, b]
    double b = 0.0;
    int n_terms = 512;       // >= 16
    double rate = 0.0;       // discount rate, applied exactly once
    double tau = 0.0;        // horizon in years

    void validate() const;
};

// Primed cosine sum: e^{-r tau} * sum'_k Re[phi(k pi/(b-a)) e^{-ik pi a/(b-a)}] H_k.
double cos_price(const CharacteristicFn& chf, const std::vector<double>& hk, const CosConfig& cfg);

// Payoff cosine coefficients of (e^y - K)^+ resp. (K - e^y)^+ on [a, b] in
// y = log asset. Strikes outside e^[a,b] clip to the empty or full interval.
std::vector<double> hk_vanilla(OptionKind kind, double strike, double a, double b, int n_terms);

// Lemma-2 coefficients for the VIX payoff max(sqrt(y) - K, 0) on [a, b] in
// y = vix^2 units; requires a < K^2 < b. Fresnel-based closed form.
std::vector<double> hk_vix(double strike, double a, double b, int n_terms);

struct Range {
    double a;
    double b;
};

// Cumulant-based ranges a,b = c1 -/+ L sqrt(c2 + sqrt(c4)).
Range truncation_range_bs(double x0, double rate, double sigma, double tau, double level);
Range truncation_range_bates(const BatesParams& p, double tau, double level);

// Envelope (min a, max b) over the rule's nodes substituted into the slot, so
// one coefficient vector serves the whole randomized ChF.
Range truncation_range_envelope_bates(const BatesParams& p, ParamSlot slot,
                                      const QuadratureRule& rule, double tau, double level);
Range truncation_range_envelope_bs(double x0, double rate, const QuadratureRule& sigma_rule,
                                   double tau, double level);

// Vanilla pricing helper: calls priced through the put side plus parity, so
// the coefficient magnitudes stay bounded by K (the call side's e^b terms
// otherwise set a ~1e-6 roundoff floor on wide randomized ranges).
double cos_vanilla_price(const CharacteristicFn& chf, const VanillaSpec& v, double a, double b,
                         int n_terms);

}  // namespace randiff
