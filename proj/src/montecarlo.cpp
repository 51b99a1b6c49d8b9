#include "randiff/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

namespace randiff {

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) {
    // splitmix64 step keeps node/theta streams decorrelated from the path stream.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (idx + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kThetaStreamTag = 0x7447aa55;

struct BatesStepper {
    const BatesParams& p;
    double dt;
    double sqrt_dt;
    double jump_comp;  // lambda * (E[e^J] - 1)

    BatesStepper(const BatesParams& params, double step)
        : p(params), dt(step), sqrt_dt(std::sqrt(step)),
          jump_comp(params.lambda * (std::exp(params.mu_j + 0.5 * params.sigma_j * params.sigma_j) - 1.0)) {}
};

// One full-truncation Euler step: v may dip negative in storage, but only
// v^+ ever enters drift, diffusion, or the asset leg.
void step_euler_ft(double& x, double& v, const BatesStepper& s, double z_v, double z_perp,
                   int jumps, double jump_z) {
    const double vp = std::max(v, 0.0);
    const double z_x = s.p.rho * z_v + std::sqrt(1.0 - s.p.rho * s.p.rho) * z_perp;
    x += (s.p.rate - 0.5 * vp - s.jump_comp) * s.dt + std::sqrt(vp) * s.sqrt_dt * z_x;
    if (jumps > 0)
        x += jumps * s.p.mu_j + s.p.sigma_j * std::sqrt(static_cast<double>(jumps)) * jump_z;
    v += s.p.kappa * (s.p.vbar - vp) * s.dt + s.p.gamma * std::sqrt(vp) * s.sqrt_dt * z_v;
}

// Exact CIR transition over dt (noncentral chi-square via Poisson-gamma
// mixture), with the Brownian-increment of v recovered from the transition
// and the integrated variance approximated trapezoidally.
double sample_cir_exact(double v, const BatesParams& p, double dt, std::mt19937_64& rng) {
    if (p.gamma == 0.0) {
        return p.vbar + (v - p.vbar) * std::exp(-p.kappa * dt);
    }
    const double ekt = std::exp(-p.kappa * dt);
    const double c_bar = p.gamma * p.gamma / (4.0 * p.kappa) * (1.0 - ekt);
    const double delta = 4.0 * p.kappa * p.vbar / (p.gamma * p.gamma);
    const double nc = 4.0 * p.kappa * ekt * v / (p.gamma * p.gamma * (1.0 - ekt));
    std::poisson_distribution<int> pois(0.5 * nc);
    const int j = nc > 0.0 ? pois(rng) : 0;
    std::gamma_distribution<double> g(0.5 * delta + j, 2.0);
    return c_bar * g(rng);
}

void step_exact_cir(double& x, double& v, const BatesStepper& s, std::mt19937_64& rng,
                    double z_perp, int jumps, double jump_z) {
    const double v_next = sample_cir_exact(v, s.p, s.dt, rng);
    const double int_v = 0.5 * (v + v_next) * s.dt;  // trapezoidal integrated variance
    // gamma * int sqrt(v) dW_v = v_next - v - kappa vbar dt + kappa int_v
    const double brownian_v =
        s.p.gamma > 0.0
            ? (v_next - v - s.p.kappa * s.p.vbar * s.dt + s.p.kappa * int_v) / s.p.gamma
            : 0.0;
    x += (s.p.rate - s.jump_comp) * s.dt - 0.5 * int_v + s.p.rho * brownian_v +
         std::sqrt((1.0 - s.p.rho * s.p.rho) * int_v) * z_perp;
    if (jumps > 0)
        x += jumps * s.p.mu_j + s.p.sigma_j * std::sqrt(static_cast<double>(jumps)) * jump_z;
    v = v_next;
}

TerminalSample simulate_bates_core(const BatesParams& p, double expiry, const McConfig& cfg,
                                   const DistributionSpec* spec, ParamSlot slot) {
    p.validate();
    cfg.validate();
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.steps_per_year * expiry)));
    const double dt = expiry / steps;

    std::mt19937_64 path_rng(substream(cfg.seed, 0));
    std::mt19937_64 theta_rng(substream(cfg.seed, kThetaStreamTag));
    std::normal_distribution<double> normal(0.0, 1.0);

    TerminalSample out;
    out.log_spot.resize(static_cast<std::size_t>(cfg.paths));
    out.variance.resize(static_cast<std::size_t>(cfg.paths));

    for (std::int64_t i = 0; i < cfg.paths; ++i) {
        BatesParams pi = p;
        if (spec) {
            const double theta = sample(*spec, theta_rng, 1)[0];
            if (!slot_admissible(slot, theta))
                throw std::domain_error("simulate: sampled theta inadmissible for slot");
            pi = with_slot(p, slot, theta);
        }
        const BatesStepper stepper(pi, dt);
        std::poisson_distribution<int> pois(pi.lambda * dt);
        double x = pi.x0, v = pi.v0;
        for (int k = 0; k < steps; ++k) {
            const int jumps = pi.lambda > 0.0 ? pois(path_rng) : 0;
            const double jump_z = jumps > 0 ? normal(path_rng) : 0.0;
            if (cfg.scheme == VarianceScheme::EulerFullTruncation) {
                const double z_v = normal(path_rng);
                const double z_perp = normal(path_rng);
                step_euler_ft(x, v, stepper, z_v, z_perp, jumps, jump_z);
            } else {
                const double z_perp = normal(path_rng);
                step_exact_cir(x, v, stepper, path_rng, z_perp, jumps, jump_z);
            }
        }
        out.log_spot[static_cast<std::size_t>(i)] = x;
        out.variance[static_cast<std::size_t>(i)] = std::max(v, 0.0);
    }
    return out;
}

McEstimate combine_v2(const std::vector<NodeBreakdown>& nodes) {
    McEstimate e;
    double var = 0.0;
    for (const auto& n : nodes) {
        e.price += n.weight * n.estimate.price;
        var += n.weight * n.weight * n.estimate.std_error * n.estimate.std_error;
    }
    e.std_error = std::sqrt(var);
    return e;
}

}  // namespace

void McConfig::validate() const {
    if (paths < 1000) throw std::invalid_argument("McConfig: paths >= 10^3 required for estimators");
    if (steps_per_year < 1) throw std::invalid_argument("McConfig: steps_per_year >= 1 required");
    if (antithetic && paths % 2 != 0)
        throw std::invalid_argument("McConfig: antithetic sampling needs an even path count");
}

TerminalSample simulate_bates_terminal(const BatesParams& p, double expiry, const McConfig& cfg) {
    return simulate_bates_core(p, expiry, cfg, nullptr, ParamSlot::Gamma);
}

TerminalSample simulate_bates_terminal_randomized(const BatesParams& p, ParamSlot slot,
                                                  const DistributionSpec& spec, double expiry,
                                                  const McConfig& cfg) {
    return simulate_bates_core(p, expiry, cfg, &spec, slot);
}

std::vector<double> simulate_bs_terminal(double x0, double rate, double sigma, double expiry,
                                         std::int64_t paths, std::uint64_t seed, bool antithetic) {
    std::mt19937_64 rng(substream(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(paths));
    const double drift = (rate - 0.5 * sigma * sigma) * expiry;
    const double vol = sigma * std::sqrt(expiry);
    if (antithetic) {
        for (std::int64_t i = 0; i + 1 < paths; i += 2) {
            const double z = normal(rng);
            out[static_cast<std::size_t>(i)] = x0 + drift + vol * z;
            out[static_cast<std::size_t>(i + 1)] = x0 + drift - vol * z;
        }
        if (paths % 2 != 0) out.back() = x0 + drift + vol * normal(rng);
    } else {
        for (auto& x : out) x = x0 + drift + vol * normal(rng);
    }
    return out;
}

std::vector<double> simulate_bs_terminal_randomized(double x0, double rate,
                                                    const DistributionSpec& sigma_spec,
                                                    double expiry, std::int64_t paths,
                                                    std::uint64_t seed, bool antithetic) {
    std::mt19937_64 rng(substream(seed, 0));
    std::mt19937_64 theta_rng(substream(seed, kThetaStreamTag));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(paths));
    const double sq_t = std::sqrt(expiry);
    if (antithetic) {
        // Antithetic in the Brownian draw; the sigma draw is shared per pair.
        for (std::int64_t i = 0; i + 1 < paths; i += 2) {
            const double s = sample(sigma_spec, theta_rng, 1)[0];
            const double drift = (rate - 0.5 * s * s) * expiry;
            const double z = normal(rng);
            out[static_cast<std::size_t>(i)] = x0 + drift + s * sq_t * z;
            out[static_cast<std::size_t>(i + 1)] = x0 + drift - s * sq_t * z;
        }
        if (paths % 2 != 0) {
            const double s = sample(sigma_spec, theta_rng, 1)[0];
            out.back() = x0 + (rate - 0.5 * s * s) * expiry + s * sq_t * normal(rng);
        }
    } else {
        for (auto& x : out) {
            const double s = sample(sigma_spec, theta_rng, 1)[0];
            x = x0 + (rate - 0.5 * s * s) * expiry + s * sq_t * normal(rng);
        }
    }
    return out;
}

McEstimate price_v1(const std::vector<double>& terminal_log_spots, const Payoff& payoff,
                    double rate, double expiry) {
    if (terminal_log_spots.size() < 1000)
        throw std::invalid_argument("price_v1: need at least 10^3 paths");
    const double df = std::exp(-rate * expiry);
    double sum = 0.0, sum_sq = 0.0;
    for (double x : terminal_log_spots) {
        const double v = payoff(std::exp(x));
        sum += v;
        sum_sq += v * v;
    }
    const double m = static_cast<double>(terminal_log_spots.size());
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq / m - mean * mean) * m / (m - 1.0));
    return {df * mean, df * std::sqrt(var / m)};
}

namespace {

template <typename SimulateNode>
McEstimate price_v2_core(const DistributionSpec& spec, int order, const McConfig& cfg,
                         SimulateNode&& simulate_node, std::vector<NodeBreakdown>* breakdown) {
    const auto rule = quadrature_rule(spec, order);
    const std::int64_t total = cfg.paths * static_cast<std::int64_t>(rule.nodes.size());
    std::vector<NodeBreakdown> nodes;
    nodes.reserve(rule.nodes.size());
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        std::int64_t m = cfg.paths;
        if (cfg.allocation == NodeAllocation::ProportionalToWeight)
            m = std::max<std::int64_t>(1000, std::llround(rule.weights[n] * static_cast<double>(total)));
        NodeBreakdown nb;
        nb.theta = rule.nodes[n];
        nb.weight = rule.weights[n];
        nb.paths = m;
        // Node 0 reuses cfg.seed so a degenerate randomizer reproduces the
        // plain V1 run path-for-path.
        nb.estimate = simulate_node(rule.nodes[n], m, cfg.seed + n);
        nodes.push_back(nb);
    }
    const McEstimate e = combine_v2(nodes);
    if (breakdown) *breakdown = std::move(nodes);
    return e;
}

}  // namespace

McEstimate price_v2_bates(const BatesParams& p, ParamSlot slot, const DistributionSpec& spec,
                          int order, const Payoff& payoff, double expiry, const McConfig& cfg,
                          std::vector<NodeBreakdown>* breakdown) {
    cfg.validate();
    return price_v2_core(
        spec, order, cfg,
        [&](double theta, std::int64_t m, std::uint64_t node_seed) {
            if (!slot_admissible(slot, theta))
                throw std::domain_error("price_v2: node theta inadmissible for slot");
            McConfig sub = cfg;
            sub.paths = m;
            sub.seed = node_seed;
            const auto sample_run = simulate_bates_terminal(with_slot(p, slot, theta), expiry, sub);
            return price_v1(sample_run.log_spot, payoff, p.rate, expiry);
        },
        breakdown);
}

McEstimate price_v2_bs(double x0, double rate, const DistributionSpec& sigma_spec, int order,
                       const Payoff& payoff, double expiry, const McConfig& cfg,
                       std::vector<NodeBreakdown>* breakdown) {
    cfg.validate();
    return price_v2_core(
        sigma_spec, order, cfg,
        [&](double theta, std::int64_t m, std::uint64_t node_seed) {
            const auto xs = simulate_bs_terminal(x0, rate, theta, expiry, m, node_seed, cfg.antithetic);
            return price_v1(xs, payoff, rate, expiry);
        },
        breakdown);
}

}  // namespace randiff
