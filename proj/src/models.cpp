#include "randiff/models.hpp"

#include <cmath>
#include <stdexcept>

namespace randiff {

namespace {

using namespace std::complex_literals;

struct HestonCore {
    cplx c;  // coefficient of v(t)
    cplx a;  // remaining exponent (without iu x0), non-discounted
};

// Heston A/C with the stable root: D is flipped so |xi + D| >= |xi - D|
// (equivalently |g| <= 1). The ChF is algebraically invariant under the flip
// and the 0/0 at u = -i for kappa - gamma*rho < 0 disappears.
HestonCore heston_core(cplx u, double tau, double kappa, double vbar, double gamma, double rho,
                       double rate) {
    const cplx iu = 1i * u;
    const cplx u2iu = u * u + iu;
    if (gamma == 0.0) {
        // Deterministic variance path: integrated variance in closed form.
        const double ekt = std::exp(-kappa * tau);
        const double int_v_coeff = kappa > 0.0 ? (1.0 - ekt) / kappa : tau;  // times (v0 - vbar)
        // exponent = iu r tau - 0.5 u2iu * int_0^tau v(s) ds with
        // v(s) = vbar + (v0 - vbar) e^{-kappa s}; split into the v0 part (c) and rest (a).
        HestonCore out;
        out.c = -0.5 * u2iu * int_v_coeff;
        out.a = rate * iu * tau - 0.5 * u2iu * (vbar * tau - vbar * int_v_coeff);
        return out;
    }
    const cplx xi = kappa - gamma * rho * iu;
    cplx d = std::sqrt(xi * xi + u2iu * gamma * gamma);
    if (std::abs(xi + d) < std::abs(xi - d)) d = -d;
    const cplx xi_p_d = xi + d;
    const cplx h = -u2iu * gamma * gamma / xi_p_d;  // = xi - d without cancellation
    const cplx g = h / xi_p_d;
    const cplx emdt = std::exp(-d * tau);
    HestonCore out;
    out.c = (1.0 - emdt) * (-u2iu) / (xi_p_d * (1.0 - g * emdt));
    out.a = rate * iu * tau +
            kappa * vbar / (gamma * gamma) * (h * tau - 2.0 * std::log((1.0 - g * emdt) / (1.0 - g)));
    return out;
}

cplx jump_exponent(cplx u, double tau, double lambda, double mu_j, double sigma_j) {
    if (lambda == 0.0) return 0.0;
    const cplx iu = 1i * u;
    const double m = std::exp(mu_j + 0.5 * sigma_j * sigma_j) - 1.0;
    return -lambda * iu * tau * m + lambda * tau * (std::exp(iu * mu_j - 0.5 * sigma_j * sigma_j * u * u) - 1.0);
}

}  // namespace

void BatesParams::validate() const {
    auto nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
    if (!nonneg(kappa) || !nonneg(vbar) || !nonneg(gamma) || !nonneg(v0) || !nonneg(lambda) ||
        !nonneg(sigma_j))
        throw std::invalid_argument("BatesParams: kappa, vbar, gamma, v0, lambda, sigma_j must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("BatesParams: rho must be in [-1, 1]");
    if (!std::isfinite(mu_j) || !std::isfinite(rate) || !std::isfinite(x0))
        throw std::invalid_argument("BatesParams: mu_j, rate, x0 must be finite");
}

const char* slot_name(ParamSlot s) {
    switch (s) {
        case ParamSlot::Kappa: return "kappa";
        case ParamSlot::VBar: return "vbar";
        case ParamSlot::Gamma: return "gamma";
        case ParamSlot::Rho: return "rho";
        case ParamSlot::V0: return "v0";
        case ParamSlot::Lambda: return "lambda";
        case ParamSlot::MuJ: return "mu_j";
        case ParamSlot::SigmaJ: return "sigma_j";
    }
    return "?";
}

ParamSlot slot_from_name(const std::string& name) {
    if (name == "kappa") return ParamSlot::Kappa;
    if (name == "vbar") return ParamSlot::VBar;
    if (name == "gamma") return ParamSlot::Gamma;
    if (name == "rho") return ParamSlot::Rho;
    if (name == "v0") return ParamSlot::V0;
    if (name == "lambda") return ParamSlot::Lambda;
    if (name == "mu_j") return ParamSlot::MuJ;
    if (name == "sigma_j") return ParamSlot::SigmaJ;
    throw std::invalid_argument("unknown parameter slot '" + name + "'");
}

BatesParams with_slot(const BatesParams& p, ParamSlot slot, double theta) {
    BatesParams q = p;
    switch (slot) {
        case ParamSlot::Kappa: q.kappa = theta; break;
        case ParamSlot::VBar: q.vbar = theta; break;
        case ParamSlot::Gamma: q.gamma = theta; break;
        case ParamSlot::Rho: q.rho = theta; break;
        case ParamSlot::V0: q.v0 = theta; break;
        case ParamSlot::Lambda: q.lambda = theta; break;
        case ParamSlot::MuJ: q.mu_j = theta; break;
        case ParamSlot::SigmaJ: q.sigma_j = theta; break;
    }
    return q;
}

bool slot_admissible(ParamSlot slot, double theta) {
    if (!std::isfinite(theta)) return false;
    switch (slot) {
        case ParamSlot::Rho: return theta >= -1.0 && theta <= 1.0;
        case ParamSlot::MuJ: return true;
        default: return theta >= 0.0;
    }
}

cplx chf_bs_exponent(cplx u, double tau, double x0, double rate, double sigma) {
    const cplx iu = 1i * u;
    return iu * x0 + (rate - 0.5 * sigma * sigma) * iu * tau - 0.5 * sigma * sigma * u * u * tau;
}

cplx chf_bates_exponent(cplx u, double tau, const BatesParams& p) {
    if (u == 0.0) return 0.0;
    const auto core = heston_core(u, tau, p.kappa, p.vbar, p.gamma, p.rho, p.rate);
    return 1i * u * p.x0 + core.c * p.v0 + core.a + jump_exponent(u, tau, p.lambda, p.mu_j, p.sigma_j);
}

CharacteristicFn chf_bs(double tau, double x0, double rate, double sigma) {
    if (!(tau > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("chf_bs: tau > 0 and sigma > 0 required");
    return {[=](cplx u) { return std::exp(chf_bs_exponent(u, tau, x0, rate, sigma)); }, tau};
}

CharacteristicFn chf_bates(double tau, const BatesParams& p) {
    if (!(tau > 0.0)) throw std::invalid_argument("chf_bates: tau > 0 required");
    p.validate();
    return {[=](cplx u) { return std::exp(chf_bates_exponent(u, tau, p)); }, tau};
}

CharacteristicFn randomize_chf(const ConditionalChf& base, const std::function<bool(double)>& admissible,
                               const DistributionSpec& spec, int order) {
    const auto rule = quadrature_rule(spec, order);
    std::vector<CharacteristicFn> conditionals;
    conditionals.reserve(rule.nodes.size());
    for (double theta : rule.nodes) {
        if (admissible && !admissible(theta))
            throw std::domain_error("randomize_chf: quadrature node theta = " + std::to_string(theta) +
                                    " is not admissible for the randomized slot");
        conditionals.push_back(base(theta));
    }
    const auto weights = rule.weights;
    const double tau = conditionals.empty() ? 0.0 : conditionals.front().tau;
    return {[conditionals, weights](cplx u) {
                cplx acc = 0.0;
                for (std::size_t n = 0; n < conditionals.size(); ++n)
                    acc += weights[n] * conditionals[n](u);
                return acc;
            },
            tau};
}

CharacteristicFn randomize_chf_bates(const BatesParams& p, ParamSlot slot,
                                     const DistributionSpec& spec, int order, double tau) {
    return randomize_chf([=](double theta) { return chf_bates(tau, with_slot(p, slot, theta)); },
                         [slot](double theta) { return slot_admissible(slot, theta); }, spec, order);
}

CharacteristicFn randomize_chf_bs(double x0, double rate, const DistributionSpec& sigma_spec,
                                  int order, double tau) {
    return randomize_chf([=](double theta) { return chf_bs(tau, x0, rate, theta); },
                         [](double theta) { return theta > 0.0; }, sigma_spec, order);
}

CharacteristicFn randomize_chf_bivariate(const ConditionalChf2& base,
                                         const std::function<bool(double, double)>& admissible,
                                         const DistributionSpec& spec1,
                                         const ConditionalSpecFactory& spec2_given_1, int order) {
    const auto outer = quadrature_rule(spec1, order);
    std::vector<CharacteristicFn> conditionals;
    std::vector<double> weights;
    for (std::size_t n1 = 0; n1 < outer.nodes.size(); ++n1) {
        const double th1 = outer.nodes[n1];
        const auto inner = quadrature_rule(spec2_given_1(th1), order);
        for (std::size_t n2 = 0; n2 < inner.nodes.size(); ++n2) {
            const double th2 = inner.nodes[n2];
            if (admissible && !admissible(th1, th2))
                throw std::domain_error("randomize_chf_bivariate: node pair (" + std::to_string(th1) +
                                        ", " + std::to_string(th2) + ") is not admissible");
            conditionals.push_back(base(th1, th2));
            weights.push_back(outer.weights[n1] * inner.weights[n2]);
        }
    }
    const double tau = conditionals.empty() ? 0.0 : conditionals.front().tau;
    return {[conditionals, weights](cplx u) {
                cplx acc = 0.0;
                for (std::size_t n = 0; n < conditionals.size(); ++n)
                    acc += weights[n] * conditionals[n](u);
                return acc;
            },
            tau};
}

// ---------------------------------------------------------------------------
// Piecewise
// ---------------------------------------------------------------------------

namespace {

struct RiccatiState {
    cplx a;
    cplx b;  // coefficient of v
};

// dB/dtau = 0.5 g^2 B^2 + (rho g iu - kappa) B - 0.5 (u^2 + iu)
// dA/dtau = kappa vbar B + r iu + jump terms
RiccatiState riccati_rhs(const RiccatiState& s, cplx u, const BatesParams& p) {
    const cplx iu = 1i * u;
    const double m = std::exp(p.mu_j + 0.5 * p.sigma_j * p.sigma_j) - 1.0;
    RiccatiState d;
    d.b = 0.5 * p.gamma * p.gamma * s.b * s.b + (p.rho * p.gamma * iu - p.kappa) * s.b -
          0.5 * (u * u + iu);
    d.a = p.kappa * p.vbar * s.b + p.rate * iu +
          p.lambda * (std::exp(iu * p.mu_j - 0.5 * p.sigma_j * p.sigma_j * u * u) - 1.0) -
          p.lambda * iu * m;
    return d;
}

RiccatiState rk4_interval(RiccatiState s, cplx u, const BatesParams& p, double len, int steps) {
    const double h = len / steps;
    for (int i = 0; i < steps; ++i) {
        const RiccatiState k1 = riccati_rhs(s, u, p);
        const RiccatiState k2 = riccati_rhs({s.a + 0.5 * h * k1.a, s.b + 0.5 * h * k1.b}, u, p);
        const RiccatiState k3 = riccati_rhs({s.a + 0.5 * h * k2.a, s.b + 0.5 * h * k2.b}, u, p);
        const RiccatiState k4 = riccati_rhs({s.a + h * k3.a, s.b + h * k3.b}, u, p);
        s.a += h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
        s.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    }
    return s;
}

void check_tau_grid(const std::vector<double>& tau_grid) {
    if (tau_grid.empty()) throw std::invalid_argument("piecewise: need at least one interval");
    double prev = 0.0;
    for (double t : tau_grid) {
        if (!(t >= prev)) throw std::invalid_argument("piecewise: tau grid must be nondecreasing");
        prev = t;
    }
    if (!(tau_grid.back() > 0.0)) throw std::invalid_argument("piecewise: total horizon must be positive");
}

}  // namespace

cplx chf_bates_piecewise_exponent(cplx u, const BatesParams& p, const std::vector<ParamSlot>& slots,
                                  const std::vector<double>& thetas,
                                  const std::vector<double>& tau_grid, int rk4_steps_per_interval) {
    check_tau_grid(tau_grid);
    if (slots.size() != tau_grid.size() || thetas.size() != tau_grid.size())
        throw std::invalid_argument("piecewise: slots/thetas/grid size mismatch");
    RiccatiState s{0.0, 0.0};
    double prev = 0.0;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double len = tau_grid[i] - prev;
        if (len > 0.0) {
            const BatesParams pi = with_slot(p, slots[i], thetas[i]);
            s = rk4_interval(s, u, pi, len, rk4_steps_per_interval);
        }
        prev = tau_grid[i];
    }
    return 1i * u * p.x0 + s.b * p.v0 + s.a;
}

CharacteristicFn chf_piecewise(ModelKind model, const BatesParams& p,
                               const std::vector<PiecewiseSpec>& intervals,
                               const std::vector<double>& tau_grid, int order,
                               std::size_t tensor_cap) {
    check_tau_grid(tau_grid);
    if (intervals.size() != tau_grid.size())
        throw std::invalid_argument("chf_piecewise: one randomizer per interval required");
    BatesParams base = p;
    if (model == ModelKind::Heston) base.lambda = 0.0;

    const std::size_t m = intervals.size();
    std::vector<QuadratureRule> rules;
    rules.reserve(m);
    std::size_t tuples = 1;
    for (const auto& iv : intervals) {
        rules.push_back(quadrature_rule(iv.spec, order));
        for (double th : rules.back().nodes)
            if (!slot_admissible(iv.slot, th))
                throw std::domain_error("chf_piecewise: node " + std::to_string(th) +
                                        " inadmissible for slot " + slot_name(iv.slot));
        if (tuples > tensor_cap / rules.back().nodes.size())
            throw std::length_error("chf_piecewise: tensor size N^m exceeds the configured cap");
        tuples *= rules.back().nodes.size();
    }

    // Enumerate node tuples (odometer); each one carries a conditional
    // piecewise exponent evaluated lazily per u.
    std::vector<ParamSlot> slots(m);
    for (std::size_t i = 0; i < m; ++i) slots[i] = intervals[i].slot;
    std::vector<std::vector<double>> theta_tuples;
    std::vector<double> weights;
    theta_tuples.reserve(tuples);
    weights.reserve(tuples);
    std::vector<std::size_t> ix(m, 0);
    for (std::size_t t = 0; t < tuples; ++t) {
        std::vector<double> thetas(m);
        double w = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            thetas[i] = rules[i].nodes[ix[i]];
            w *= rules[i].weights[ix[i]];
        }
        theta_tuples.push_back(std::move(thetas));
        weights.push_back(w);
        for (std::size_t i = 0; i < m; ++i) {
            if (++ix[i] < rules[i].nodes.size()) break;
            ix[i] = 0;
        }
    }

    const double tau = tau_grid.back();
    return {[base, slots, theta_tuples, weights, tau_grid](cplx u) {
                cplx acc = 0.0;
                for (std::size_t t = 0; t < theta_tuples.size(); ++t)
                    acc += weights[t] *
                           std::exp(chf_bates_piecewise_exponent(u, base, slots, theta_tuples[t], tau_grid));
                return acc;
            },
            tau};
}

CharacteristicFn chf_piecewise_bs(double x0, double rate,
                                  const std::vector<DistributionSpec>& sigma_specs,
                                  const std::vector<double>& tau_grid, int order,
                                  std::size_t tensor_cap) {
    check_tau_grid(tau_grid);
    if (sigma_specs.size() != tau_grid.size())
        throw std::invalid_argument("chf_piecewise_bs: one randomizer per interval required");

    const std::size_t m = sigma_specs.size();
    std::vector<QuadratureRule> rules;
    rules.reserve(m);
    std::size_t tuples = 1;
    for (const auto& s : sigma_specs) {
        rules.push_back(quadrature_rule(s, order));
        for (double th : rules.back().nodes)
            if (!(th > 0.0))
                throw std::domain_error("chf_piecewise_bs: sigma node must be positive");
        if (tuples > tensor_cap / rules.back().nodes.size())
            throw std::length_error("chf_piecewise_bs: tensor size N^m exceeds the configured cap");
        tuples *= rules.back().nodes.size();
    }

    // Variances add across intervals, so each tuple reduces to one effective
    // total variance; the drift correction follows the same split.
    std::vector<double> lens(m);
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lens[i] = tau_grid[i] - prev;
        prev = tau_grid[i];
    }
    std::vector<double> total_var;
    std::vector<double> weights;
    total_var.reserve(tuples);
    weights.reserve(tuples);
    std::vector<std::size_t> ix(m, 0);
    for (std::size_t t = 0; t < tuples; ++t) {
        double var = 0.0, w = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = rules[i].nodes[ix[i]];
            var += s * s * lens[i];
            w *= rules[i].weights[ix[i]];
        }
        total_var.push_back(var);
        weights.push_back(w);
        for (std::size_t i = 0; i < m; ++i) {
            if (++ix[i] < rules[i].nodes.size()) break;
            ix[i] = 0;
        }
    }

    const double tau = tau_grid.back();
    return {[=](cplx u) {
                using namespace std::complex_literals;
                const cplx iu = 1i * u;
                cplx acc = 0.0;
                for (std::size_t t = 0; t < total_var.size(); ++t)
                    acc += weights[t] * std::exp(iu * x0 + rate * iu * tau - 0.5 * total_var[t] * (u * u + iu));
                return acc;
            },
            tau};
}

}  // namespace randiff
