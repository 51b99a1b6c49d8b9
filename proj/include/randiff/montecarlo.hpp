#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "randiff/distributions.hpp"
#include "randiff/models.hpp"

namespace randiff {

enum class VarianceScheme { EulerFullTruncation, ExactCir };
enum class NodeAllocation { EqualPerNode, ProportionalToWeight };

struct McConfig {
    std::int64_t paths = 100000;
    int steps_per_year = 730;
    VarianceScheme scheme = VarianceScheme::EulerFullTruncation;
    std::uint64_t seed = 1;
    bool antithetic = false;
    NodeAllocation allocation = NodeAllocation::EqualPerNode;

    void validate() const;
};

struct TerminalSample {
    std::vector<double> log_spot;
    std::vector<double> variance;
};

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
};

using Payoff = std::function<double(double)>;  // terminal spot -> payoff

// Bates terminal states; per-path theta draws (when randomized) come from a
// dedicated substream so turning randomization on does not shift the
// Brownian numbers.
TerminalSample simulate_bates_terminal(const BatesParams& p, double expiry, const McConfig& cfg);
TerminalSample simulate_bates_terminal_randomized(const BatesParams& p, ParamSlot slot,
                                                  const DistributionSpec& spec, double expiry,
                                                  const McConfig& cfg);

// Exact lognormal terminal draws for the BS model (no time stepping);
// the randomized variant draws sigma per path.
std::vector<double> simulate_bs_terminal(double x0, double rate, double sigma, double expiry,
                                         std::int64_t paths, std::uint64_t seed, bool antithetic);
std::vector<double> simulate_bs_terminal_randomized(double x0, double rate,
                                                    const DistributionSpec& sigma_spec,
                                                    double expiry, std::int64_t paths,
                                                    std::uint64_t seed, bool antithetic);

// Plain estimator: discounted mean with its standard error.
McEstimate price_v1(const std::vector<double>& terminal_log_spots, const Payoff& payoff,
                    double rate, double expiry);

struct NodeBreakdown {
    double theta;
    double weight;
    std::int64_t paths;
    McEstimate estimate;
};

// Quadrature-split estimator: one sub-simulation per node, weights omega_n,
// combined standard error sqrt(sum omega_n^2 se_n^2). cfg.paths is the
// per-node budget under EqualPerNode; under ProportionalToWeight the total
// cfg.paths * order is distributed as round(omega_n * total).
McEstimate price_v2_bates(const BatesParams& p, ParamSlot slot, const DistributionSpec& spec,
                          int order, const Payoff& payoff, double expiry, const McConfig& cfg,
                          std::vector<NodeBreakdown>* breakdown = nullptr);
McEstimate price_v2_bs(double x0, double rate, const DistributionSpec& sigma_spec, int order,
                       const Payoff& payoff, double expiry, const McConfig& cfg,
                       std::vector<NodeBreakdown>* breakdown = nullptr);

}  // namespace randiff
