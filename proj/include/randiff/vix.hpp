#pragma once

#include "randiff/cos.hpp"
#include "randiff/models.hpp"

namespace randiff {

// Affine map vix^2(t,T) = a v(t) + b + c for the Bates model over the window
// (t, T), plus the CIR transition law of v(t) seen from the valuation date:
// v(t) | v(t0) ~ c_bar chi^2(delta, kappa_bar). Everything lives on the 0-1
// vol scale; the 100x factor is quote formatting only.
struct VixCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double delta = 0.0;      // CIR dof 4 kappa vbar / gamma^2
    double kappa_bar = 0.0;  // noncentrality over the transition horizon
    double c_bar = 0.0;      // transition scale
    double t = 0.0;          // window start (= transition horizon from t0 = 0)
    double T = 0.0;          // window end

    double alpha1() const { return 1.0 / (a * c_bar); }
    double alpha2() const { return b + c; }
};

// Window (t, T); CIR transition over (0, t) starting from p.v0. Requires
// t > 0 (v(t) must be genuinely random) and gamma > 0.
VixCoefficients vix_coefficients(const BatesParams& p, double t, double T);

// Density/CDF of VIX = sqrt(a v + b + c); zero below the support floor sqrt(b+c).
double vix_pdf(double x, const VixCoefficients& k);
double vix_cdf(double x, const VixCoefficients& k);

// ChF of vix^2.
cplx vix2_chf(cplx u, const VixCoefficients& k);

// E[VIX] by density quadrature (0-1 scale).
double vix_mean(const VixCoefficients& k);

// Direct density integration of the call payoff; strike on the 0-1 scale,
// price returned in VIX points (x100). Window (T, T + deltaT), transition
// over (t, T). Upper limit from the noncentral chi-square 1e-12 tail.
double vix_option_direct(double strike, double t, double T, double deltaT, const BatesParams& p);

// Randomized flavour: quadrature-weighted sum of node-substituted prices.
double vix_option_rand(double strike, double t, double T, double deltaT, const BatesParams& p,
                       ParamSlot slot, const DistributionSpec& spec, int order);

// Vectorized variant for many strikes: per node, the survival function is
// tabulated once on a singularity-absorbing grid and every strike integrates
// against it. Same quantity as vix_option_rand to ~1e-8; this is what the
// calibration objective calls in its inner loop.
std::vector<double> vix_option_rand_batch(const std::vector<double>& strikes, double t, double T,
                                          double deltaT, const BatesParams& p, ParamSlot slot,
                                          const DistributionSpec& spec, int order,
                                          int grid_points = 513);

// COS route: truncation range for vix^2 and pricing via vix2_chf + hk_vix.
Range truncation_range_vix2(const VixCoefficients& k, double level);
double vix_option_cos(double strike, double t, double T, double deltaT, const BatesParams& p,
                      int n_terms = 512, double level = 12.0);
double vix_option_cos_rand(double strike, double t, double T, double deltaT, const BatesParams& p,
                           ParamSlot slot, const DistributionSpec& spec, int order,
                           int n_terms = 512, double level = 12.0);

}  // namespace randiff
