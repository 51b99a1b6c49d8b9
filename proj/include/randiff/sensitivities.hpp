#pragma once

#include <string>
#include <vector>

#include "randiff/cos.hpp"
#include "randiff/models.hpp"

namespace randiff {

struct BumpConfig {
    double rel_bump = 1e-4;  // central differences; must keep bumped specs valid

    void validate() const;
};

// d{omega_n, theta_n}/d(hyper) by central differences of the rule in the
// named hyper-parameter (a_hat/b_hat/c_hat/mu/s/theta0). Nodes are matched by
// sort order; a crossing between the bumped rules raises.
struct PairDerivatives {
    std::vector<double> dweights;
    std::vector<double> dnodes;
    double bump_used = 0.0;
};

DistributionSpec bump_hyper(const DistributionSpec& spec, const std::string& hyper, double delta);

PairDerivatives dpairs_dhyper(const DistributionSpec& spec, const std::string& hyper, int order,
                              const BumpConfig& bump);

// Conditional-ChF exponent as a function of the randomized parameter theta.
using ExponentFn = std::function<cplx(cplx u, double theta)>;

// d(phi_X)/d(hyper) assembled from the pair derivatives and the exponent's
// theta-derivative (central differences in theta).
struct ChfDerivative {
    std::function<cplx(cplx)> eval;
    cplx operator()(cplx u) const { return eval(u); }
    cplx operator()(double u) const { return eval(cplx(u, 0.0)); }
};

ChfDerivative dchf_dhyper(const ExponentFn& exponent, const DistributionSpec& spec,
                          const std::string& hyper, int order, const BumpConfig& bump);

// Differentiated COS sum with the payoff coefficients held fixed.
double dprice_dhyper(const ChfDerivative& dchf, const std::vector<double>& hk, const CosConfig& cfg);

// Convenience wrappers for the two models.
double dprice_dhyper_bs(const VanillaSpec& v, const DistributionSpec& sigma_spec,
                        const std::string& hyper, int order, const BumpConfig& bump,
                        int n_terms = 4096, double level = 10.0);
double dprice_dhyper_bates(const VanillaSpec& v, const BatesParams& p, ParamSlot slot,
                           const DistributionSpec& spec, const std::string& hyper, int order,
                           const BumpConfig& bump, int n_terms = 2048, double level = 10.0);

}  // namespace randiff
