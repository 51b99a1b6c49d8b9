#include "randiff/sensitivities.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace randiff {

void BumpConfig::validate() const {
    if (!(rel_bump >= 1e-6 && rel_bump <= 1e-2))
        throw std::invalid_argument("BumpConfig: rel_bump must be in [1e-6, 1e-2]");
}

DistributionSpec bump_hyper(const DistributionSpec& spec, const std::string& hyper, double delta) {
    DistributionSpec s = spec;
    if (hyper == "a_hat") s.a_hat += delta;
    else if (hyper == "b_hat") s.b_hat += delta;
    else if (hyper == "c_hat") s.c_hat += delta;
    else if (hyper == "mu") s.mu += delta;
    else if (hyper == "s") s.s += delta;
    else if (hyper == "theta0") s.theta0 += delta;
    else throw std::invalid_argument("bump_hyper: unknown hyper-parameter '" + hyper + "'");
    s.validate();
    return s;
}

namespace {

double hyper_value(const DistributionSpec& spec, const std::string& hyper) {
    if (hyper == "a_hat") return spec.a_hat;
    if (hyper == "b_hat") return spec.b_hat;
    if (hyper == "c_hat") return spec.c_hat;
    if (hyper == "mu") return spec.mu;
    if (hyper == "s") return spec.s;
    if (hyper == "theta0") return spec.theta0;
    throw std::invalid_argument("unknown hyper-parameter '" + hyper + "'");
}

bool sorted_strict(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

}  // namespace

PairDerivatives dpairs_dhyper(const DistributionSpec& spec, const std::string& hyper, int order,
                              const BumpConfig& bump) {
    bump.validate();
    const double base = hyper_value(spec, hyper);
    const double delta = bump.rel_bump * std::max(std::fabs(base), 1.0);

    const auto up = quadrature_rule(bump_hyper(spec, hyper, +delta), order);
    const auto dn = quadrature_rule(bump_hyper(spec, hyper, -delta), order);
    if (up.nodes.size() != dn.nodes.size())
        throw std::runtime_error("dpairs_dhyper: bumped rules have different sizes");
    if (!sorted_strict(up.nodes) || !sorted_strict(dn.nodes))
        throw std::runtime_error(
            "dpairs_dhyper: node ordering changed under the bump; reduce rel_bump");

    PairDerivatives d;
    d.bump_used = delta;
    d.dnodes.resize(up.nodes.size());
    d.dweights.resize(up.nodes.size());
    for (std::size_t n = 0; n < up.nodes.size(); ++n) {
        d.dnodes[n] = (up.nodes[n] - dn.nodes[n]) / (2.0 * delta);
        d.dweights[n] = (up.weights[n] - dn.weights[n]) / (2.0 * delta);
    }
    return d;
}

ChfDerivative dchf_dhyper(const ExponentFn& exponent, const DistributionSpec& spec,
                          const std::string& hyper, int order, const BumpConfig& bump) {
    const auto rule = quadrature_rule(spec, order);
    const auto pairs = dpairs_dhyper(spec, hyper, order, bump);
    const auto nodes = rule.nodes;
    const auto weights = rule.weights;

    return {[=](cplx u) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const double theta = nodes[n];
            const cplx e0 = exponent(u, theta);
            // dE/dtheta by central differences on the exponent; the exponent
            // is branch-free so no log tracking is needed.
            const double h = std::max(1e-5, 1e-5 * std::fabs(theta));
            const cplx de = (exponent(u, theta + h) - exponent(u, theta - h)) / (2.0 * h);
            acc += std::exp(e0) * (pairs.dweights[n] + weights[n] * de * pairs.dnodes[n]);
        }
        return acc;
    }};
}

double dprice_dhyper(const ChfDerivative& dchf, const std::vector<double>& hk, const CosConfig& cfg) {
    cfg.validate();
    if (hk.size() != static_cast<std::size_t>(cfg.n_terms))
        throw std::invalid_argument("dprice_dhyper: coefficient count mismatch");
    const double bma = cfg.b - cfg.a;
    double sum = 0.0;
    for (int k = 0; k < cfg.n_terms; ++k) {
        const double u = k * std::numbers::pi / bma;
        const cplx phase(std::cos(u * cfg.a), -std::sin(u * cfg.a));
        double term = std::real(dchf(u) * phase) * hk[static_cast<std::size_t>(k)];
        if (k == 0) term *= 0.5;
        sum += term;
    }
    return std::exp(-cfg.rate * cfg.tau) * sum;
}

double dprice_dhyper_bs(const VanillaSpec& v, const DistributionSpec& sigma_spec,
                        const std::string& hyper, int order, const BumpConfig& bump, int n_terms,
                        double level) {
    v.validate();
    const double x0 = std::log(v.spot);
    const auto rule = quadrature_rule(sigma_spec, order);
    const Range r = truncation_range_envelope_bs(x0, v.rate, rule, v.expiry, level);
    const auto exponent = [=](cplx u, double theta) {
        return chf_bs_exponent(u, v.expiry, x0, v.rate, theta);
    };
    const auto dchf = dchf_dhyper(exponent, sigma_spec, hyper, order, bump);
    // Put coefficients: the put and call sensitivities coincide (parity's
    // forward term carries no randomizer dependence).
    const auto hk = hk_vanilla(OptionKind::Put, v.strike, r.a, r.b, n_terms);
    return dprice_dhyper(dchf, hk, CosConfig{r.a, r.b, n_terms, v.rate, v.expiry});
}

double dprice_dhyper_bates(const VanillaSpec& v, const BatesParams& p, ParamSlot slot,
                           const DistributionSpec& spec, const std::string& hyper, int order,
                           const BumpConfig& bump, int n_terms, double level) {
    v.validate();
    BatesParams base = p;
    base.x0 = std::log(v.spot);
    base.rate = v.rate;
    const auto rule = quadrature_rule(spec, order);
    const Range r = truncation_range_envelope_bates(base, slot, rule, v.expiry, level);
    const auto exponent = [=](cplx u, double theta) {
        return chf_bates_exponent(u, v.expiry, with_slot(base, slot, theta));
    };
    const auto dchf = dchf_dhyper(exponent, spec, hyper, order, bump);
    const auto hk = hk_vanilla(OptionKind::Put, v.strike, r.a, r.b, n_terms);
    return dprice_dhyper(dchf, hk, CosConfig{r.a, r.b, n_terms, v.rate, v.expiry});
}

}  // namespace randiff
