#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "randiff/distributions.hpp"
#include "randiff/quadrature.hpp"

namespace randiff {

using cplx = std::complex<double>;

// Full Bates parameter vector (Heston is lambda = 0). The Feller condition is
// deliberately not enforced; the model is valid without it.
struct BatesParams {
    double kappa;    // mean-reversion speed, 1/years
    double vbar;     // long-run variance
    double gamma;    // vol-of-vol
    double rho;      // correlation in [-1, 1]
    double v0;       // initial variance
    double rate;     // risk-free rate
    double lambda;   // jump intensity, 1/years
    double mu_j;     // jump-size mean (log units)
    double sigma_j;  // jump-size vol
    double x0;       // log spot

    void validate() const;
};

enum class ParamSlot { Kappa, VBar, Gamma, Rho, V0, Lambda, MuJ, SigmaJ };

const char* slot_name(ParamSlot s);
ParamSlot slot_from_name(const std::string& name);

BatesParams with_slot(const BatesParams& p, ParamSlot slot, double theta);

// Whether substituting `theta` into `slot` keeps BatesParams valid.
bool slot_admissible(ParamSlot slot, double theta);

// A non-discounted characteristic function of the log price over [t0, T]:
// phi(0) = 1, phi(-i) = S e^{r tau}, Hermitian in real u. Discounting is the
// pricer's job, exactly once.
struct CharacteristicFn {
    std::function<cplx(cplx)> eval;
    double tau = 0.0;

    cplx operator()(cplx u) const { return eval(u); }
    cplx operator()(double u) const { return eval(cplx(u, 0.0)); }
};

// Exponents (log of the ChF) are exposed for the sensitivity machinery, which
// differentiates them in the parameter without touching complex logs.
cplx chf_bs_exponent(cplx u, double tau, double x0, double rate, double sigma);
cplx chf_bates_exponent(cplx u, double tau, const BatesParams& p);

CharacteristicFn chf_bs(double tau, double x0, double rate, double sigma);
CharacteristicFn chf_bates(double tau, const BatesParams& p);

// A model with one free parameter left open: theta -> conditional ChF.
using ConditionalChf = std::function<CharacteristicFn(double)>;

// Theorem-level randomization: u -> sum_n omega_n * base(theta_n)(u). Nodes
// are validated against `admissible` when the rule is built, never per call.
CharacteristicFn randomize_chf(const ConditionalChf& base, const std::function<bool(double)>& admissible,
                               const DistributionSpec& spec, int order);

CharacteristicFn randomize_chf_bates(const BatesParams& p, ParamSlot slot,
                                     const DistributionSpec& spec, int order, double tau);
CharacteristicFn randomize_chf_bs(double x0, double rate, const DistributionSpec& sigma_spec,
                                  int order, double tau);

// Bivariate variant: an outer rule for theta1 and per-outer-node conditional
// rules zeta(theta2 | theta1) supplied by the factory.
using ConditionalChf2 = std::function<CharacteristicFn(double, double)>;
using ConditionalSpecFactory = std::function<DistributionSpec(double)>;

CharacteristicFn randomize_chf_bivariate(const ConditionalChf2& base,
                                         const std::function<bool(double, double)>& admissible,
                                         const DistributionSpec& spec1,
                                         const ConditionalSpecFactory& spec2_given_1, int order);

// ---------------------------------------------------------------------------
// Piecewise-constant randomization
// ---------------------------------------------------------------------------

enum class ModelKind { BlackScholes, Heston, Bates };

// Conditional Bates/Heston ChF for piecewise-constant parameters on the
// tau-grid 0 < tau_1 <= ... <= tau_m: Riccati system restarted per interval
// with the previous interval's terminal values as initial conditions (RK4,
// fixed step). theta_i substitutes into slot_i on interval i.
cplx chf_bates_piecewise_exponent(cplx u, const BatesParams& p,
                                  const std::vector<ParamSlot>& slots,
                                  const std::vector<double>& thetas,
                                  const std::vector<double>& tau_grid, int rk4_steps_per_interval = 400);

struct PiecewiseSpec {
    ParamSlot slot;
    DistributionSpec spec;
};

// Tensor sum of Corollary-2 type over the per-interval rules; throws
// std::length_error when N^m exceeds `tensor_cap`.
CharacteristicFn chf_piecewise(ModelKind model, const BatesParams& p,
                               const std::vector<PiecewiseSpec>& intervals,
                               const std::vector<double>& tau_grid, int order,
                               std::size_t tensor_cap = 1u << 20);

// BS flavour (slot is the volatility in every interval); analytic, variances add.
CharacteristicFn chf_piecewise_bs(double x0, double rate,
                                  const std::vector<DistributionSpec>& sigma_specs,
                                  const std::vector<double>& tau_grid, int order,
                                  std::size_t tensor_cap = 1u << 20);

}  // namespace randiff
