#pragma once

#include <optional>
#include <string>
#include <vector>

#include "randiff/models.hpp"

namespace randiff {

enum class Underlying { Index, Vix };

struct Quote {
    Underlying underlying = Underlying::Index;
    double expiry = 0.0;    // years
    double strike = 0.0;    // index level, or VIX points
    double mid_iv = 0.0;
    std::optional<double> bid_iv;
    std::optional<double> ask_iv;
};

struct QuoteSurface {
    std::vector<Quote> quotes;
    double spot = 0.0;  // index spot
    double rate = 0.0;

    void validate() const;
    bool has_vix() const;
};

// CSV schema: underlying,expiry,strike,mid_iv,bid_iv,ask_iv (last two
// optional / blank). Malformed rows are rejected with their line number.
QuoteSurface load_quotes(const std::string& path, double spot, double rate);
void save_quotes(const QuoteSurface& surface, const std::string& path);

struct CalibrationOptions {
    double w_atm = 5.0;              // ATM weight multiplier per (underlying, expiry)
    int quad_order = 8;              // rule order for the randomized model
    int cos_terms = 512;
    double cos_level = 10.0;
    double vix_tenor = 30.0 / 365.0;
    ParamSlot random_slot = ParamSlot::Gamma;
    // Which Bates parameters stay free in stage 2 besides the randomizer
    // hyper-parameters (kappa is held at its stage-1 value throughout).
    std::vector<std::string> stage2_free = {"vbar", "rho", "v0", "lambda", "mu_j", "sigma_j"};
    int scan_points = 512;           // deterministic Halton pre-scan of the stage-2 box
    int polish_candidates = 3;
    int max_evals_per_polish = 4000;
    int max_restarts = 8;
};

struct CalibrationResult {
    BatesParams params;              // stage-2 parameters (gamma slot carries the law)
    DistributionSpec random_law;     // fitted randomizer for the slot
    double objective = 0.0;
    std::vector<double> residuals;   // per quote, vol units
    long iterations = 0;             // objective evaluations, both stages
    bool converged = false;
    BatesParams stage1_params;
    double stage1_objective = 0.0;
};

// Weighted RMS of vol-space residuals over both underlyings. Index legs via
// COS + implied-vol inversion; VIX legs in price space normalized by the
// Black vega of the quote on the model's VIX forward. Pricing failures feed a
// penalty value back to the optimizer instead of aborting.
double objective(const BatesParams& p, const DistributionSpec& law, const QuoteSurface& surface,
                 const CalibrationOptions& opt, std::vector<double>* residuals = nullptr);

// Plain-Bates flavour used by stage 1 (index quotes only).
double objective_stage1(const BatesParams& p, const QuoteSurface& surface,
                        const CalibrationOptions& opt);

CalibrationResult calibrate_two_stage(const QuoteSurface& surface, const BatesParams& initial,
                                      const CalibrationOptions& opt = {});

// Deterministic Nelder-Mead used by both stages; exposed for reuse and tests.
struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    long evaluations = 0;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double initial_step, long max_evals,
                          double f_tol = 1e-14);

}  // namespace randiff
