#include "randiff/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "randiff/black_scholes.hpp"
#include "randiff/cos.hpp"
#include "randiff/special_functions.hpp"
#include "randiff/vix.hpp"

namespace randiff {

namespace {

constexpr double kPenalty = 1e3;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void QuoteSurface::validate() const {
    if (!(spot > 0.0)) throw std::invalid_argument("QuoteSurface: spot must be positive");
    std::map<std::tuple<int, double, double>, int> seen;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& q = quotes[i];
        if (!(q.mid_iv > 0.0))
            throw std::invalid_argument("QuoteSurface: quote " + std::to_string(i) +
                                        " has nonpositive mid vol");
        if (!(q.strike > 0.0) || !(q.expiry > 0.0))
            throw std::invalid_argument("QuoteSurface: quote " + std::to_string(i) +
                                        " has nonpositive strike or expiry");
        if (q.bid_iv && q.ask_iv && !(*q.bid_iv <= q.mid_iv && q.mid_iv <= *q.ask_iv))
            throw std::invalid_argument("QuoteSurface: quote " + std::to_string(i) +
                                        " violates bid <= mid <= ask");
        const auto key = std::make_tuple(static_cast<int>(q.underlying), q.expiry, q.strike);
        if (++seen[key] > 1)
            throw std::invalid_argument("QuoteSurface: duplicate (underlying, expiry, strike) at quote " +
                                        std::to_string(i));
    }
}

bool QuoteSurface::has_vix() const {
    return std::any_of(quotes.begin(), quotes.end(),
                       [](const Quote& q) { return q.underlying == Underlying::Vix; });
}

QuoteSurface load_quotes(const std::string& path, double spot, double rate) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_quotes: cannot open '" + path + "'");
    QuoteSurface surface;
    surface.spot = spot;
    surface.rate = rate;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (!header_seen) {
            if (t.rfind("underlying", 0) != 0)
                throw std::runtime_error("load_quotes: line 1 must be the header "
                                         "'underlying,expiry,strike,mid_iv,bid_iv,ask_iv'");
            header_seen = true;
            continue;
        }
        const auto cells = split_csv_line(t);
        if (cells.size() < 4 || cells.size() > 6)
            throw std::runtime_error("load_quotes: line " + std::to_string(line_no) +
                                     ": expected 4-6 columns");
        Quote q;
        const std::string u = trim(cells[0]);
        if (u == "index") q.underlying = Underlying::Index;
        else if (u == "vix") q.underlying = Underlying::Vix;
        else
            throw std::runtime_error("load_quotes: line " + std::to_string(line_no) +
                                     ": underlying must be 'index' or 'vix'");
        try {
            q.expiry = std::stod(trim(cells[1]));
            q.strike = std::stod(trim(cells[2]));
            q.mid_iv = std::stod(trim(cells[3]));
            if (cells.size() > 4 && !trim(cells[4]).empty()) q.bid_iv = std::stod(trim(cells[4]));
            if (cells.size() > 5 && !trim(cells[5]).empty()) q.ask_iv = std::stod(trim(cells[5]));
        } catch (const std::exception&) {
            throw std::runtime_error("load_quotes: line " + std::to_string(line_no) +
                                     ": malformed numeric field");
        }
        if (q.bid_iv && q.ask_iv && !(*q.bid_iv <= q.mid_iv && q.mid_iv <= *q.ask_iv))
            throw std::runtime_error("load_quotes: line " + std::to_string(line_no) +
                                     ": requires bid_iv <= mid_iv <= ask_iv");
        surface.quotes.push_back(q);
    }
    try {
        surface.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("load_quotes: ") + e.what());
    }
    return surface;
}

void save_quotes(const QuoteSurface& surface, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_quotes: cannot open '" + path + "'");
    out << "underlying,expiry,strike,mid_iv,bid_iv,ask_iv\n";
    out.precision(12);
    for (const auto& q : surface.quotes) {
        out << (q.underlying == Underlying::Index ? "index" : "vix") << ',' << q.expiry << ','
            << q.strike << ',' << q.mid_iv << ',';
        if (q.bid_iv) out << *q.bid_iv;
        out << ',';
        if (q.ask_iv) out << *q.ask_iv;
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

namespace {

double black_call(double fwd, double strike, double sigma, double tau, double df) {
    const double st = std::max(sigma, 1e-9) * std::sqrt(tau);
    const double d1 = (std::log(fwd / strike) + 0.5 * sigma * sigma * tau) / st;
    return df * (fwd * norm_cdf(d1) - strike * norm_cdf(d1 - st));
}

double black_vega(double fwd, double strike, double sigma, double tau, double df) {
    const double st = std::max(sigma, 1e-9) * std::sqrt(tau);
    const double d1 = (std::log(fwd / strike) + 0.5 * sigma * sigma * tau) / st;
    return df * fwd * std::sqrt(tau) * norm_pdf(d1);
}

// ATM = minimal |strike/forward - 1| per (underlying, expiry) group.
std::vector<double> quote_weights(const QuoteSurface& surface, const CalibrationOptions& opt,
                                  const std::map<double, double>& vix_forwards) {
    std::vector<double> w(surface.quotes.size(), 1.0);
    std::map<std::pair<int, double>, std::pair<double, std::size_t>> atm;  // group -> (dist, idx)
    for (std::size_t i = 0; i < surface.quotes.size(); ++i) {
        const auto& q = surface.quotes[i];
        double fwd;
        if (q.underlying == Underlying::Index) {
            fwd = surface.spot * std::exp(surface.rate * q.expiry);
        } else {
            const auto it = vix_forwards.find(q.expiry);
            fwd = it != vix_forwards.end() ? it->second : q.strike;
        }
        const double dist = std::fabs(q.strike / fwd - 1.0);
        const auto key = std::make_pair(static_cast<int>(q.underlying), q.expiry);
        const auto it = atm.find(key);
        if (it == atm.end() || dist < it->second.first) atm[key] = {dist, i};
    }
    for (const auto& [key, v] : atm) w[v.second] = opt.w_atm;
    return w;
}

struct LegPricer {
    const QuoteSurface& surface;
    const CalibrationOptions& opt;
    const BatesParams& p;
    const DistributionSpec* law;  // null -> plain Bates

    // Model implied vols for all index quotes with one ChF per expiry.
    bool index_ivs(std::map<std::pair<double, double>, double>& out) const {
        std::map<double, std::vector<double>> by_expiry;
        for (const auto& q : surface.quotes)
            if (q.underlying == Underlying::Index) by_expiry[q.expiry].push_back(q.strike);
        for (auto& [expiry, strikes] : by_expiry) {
            BatesParams pe = p;
            pe.x0 = std::log(surface.spot);
            pe.rate = surface.rate;
            CharacteristicFn chf;
            Range r{};
            if (law) {
                const auto rule = quadrature_rule(*law, opt.quad_order);
                for (double th : rule.nodes)
                    if (!slot_admissible(opt.random_slot, th)) return false;
                chf = randomize_chf_bates(pe, opt.random_slot, *law, opt.quad_order, expiry);
                r = truncation_range_envelope_bates(pe, opt.random_slot, rule, expiry, opt.cos_level);
            } else {
                chf = chf_bates(expiry, pe);
                r = truncation_range_bates(pe, expiry, opt.cos_level);
            }
            for (double k : strikes) {
                VanillaSpec v{surface.spot, k, surface.rate, expiry, OptionKind::Call};
                const double px = cos_vanilla_price(chf, v, r.a, r.b, opt.cos_terms);
                double iv;
                try {
                    iv = implied_vol(px, v);
                } catch (const no_implied_vol&) {
                    return false;
                }
                out[{expiry, k}] = iv;
            }
        }
        return true;
    }

    // VIX forwards and prices per expiry; strikes arrive in VIX points. The
    // zero strike prepended to the batch yields the discounted forward.
    bool vix_prices(std::map<double, double>& forwards,
                    std::map<std::pair<double, double>, double>& prices) const {
        std::map<double, std::vector<double>> by_expiry;
        for (const auto& q : surface.quotes)
            if (q.underlying == Underlying::Vix) by_expiry[q.expiry].push_back(q.strike);
        for (auto& [expiry, strikes] : by_expiry) {
            BatesParams pe = p;
            pe.x0 = std::log(surface.spot);
            pe.rate = surface.rate;
            try {
                std::vector<double> ks{0.0};
                for (double k : strikes) ks.push_back(k / 100.0);
                const DistributionSpec node_law =
                    law ? *law : DistributionSpec::degenerate(pe.gamma);
                const auto px = vix_option_rand_batch(ks, 0.0, expiry, opt.vix_tenor, pe,
                                                      opt.random_slot, node_law, opt.quad_order);
                const double df = std::exp(-surface.rate * expiry);
                forwards[expiry] = px[0] / df;
                for (std::size_t i = 0; i < strikes.size(); ++i)
                    prices[{expiry, strikes[i]}] = px[i + 1];
            } catch (const std::exception&) {
                return false;
            }
        }
        return true;
    }
};

double objective_impl(const BatesParams& p, const DistributionSpec* law, const QuoteSurface& surface,
                      const CalibrationOptions& opt, std::vector<double>* residuals_out) try {
    p.validate();
    if (law) law->validate();

    LegPricer pricer{surface, opt, p, law};
    std::map<std::pair<double, double>, double> model_iv;
    if (!pricer.index_ivs(model_iv)) return kPenalty;

    std::map<double, double> vix_fwd;
    std::map<std::pair<double, double>, double> vix_px;
    if (surface.has_vix() && !pricer.vix_prices(vix_fwd, vix_px)) return kPenalty;

    const auto weights = quote_weights(surface, opt, vix_fwd);
    std::vector<double> res(surface.quotes.size(), 0.0);
    for (std::size_t i = 0; i < surface.quotes.size(); ++i) {
        const auto& q = surface.quotes[i];
        if (q.underlying == Underlying::Index) {
            const auto it = model_iv.find({q.expiry, q.strike});
            if (it == model_iv.end()) return kPenalty;
            res[i] = it->second - q.mid_iv;
        } else {
            const auto fit = vix_fwd.find(q.expiry);
            const auto pit = vix_px.find({q.expiry, q.strike});
            if (fit == vix_fwd.end() || pit == vix_px.end()) return kPenalty;
            const double df = std::exp(-surface.rate * q.expiry);
            // Quote price under the Black proxy on the model forward, residual
            // rescaled to vol units by the quote vega.
            const double quote_px = black_call(fit->second, q.strike, q.mid_iv, q.expiry, df);
            const double vega = std::max(black_vega(fit->second, q.strike, q.mid_iv, q.expiry, df), 1e-4);
            res[i] = (pit->second - quote_px) / vega;
        }
        if (!std::isfinite(res[i])) return kPenalty;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        num += weights[i] * res[i] * res[i];
        den += weights[i];
    }
    if (residuals_out) *residuals_out = res;
    const double val = std::sqrt(num / den);
    return std::isfinite(val) ? val : kPenalty;
} catch (const std::exception&) {
    // Optimizer proposals can hit conditioning or admissibility failures;
    // those score as a penalty, never as an abort.
    return kPenalty;
}

}  // namespace

double objective(const BatesParams& p, const DistributionSpec& law, const QuoteSurface& surface,
                 const CalibrationOptions& opt, std::vector<double>* residuals) {
    return objective_impl(p, &law, surface, opt, residuals);
}

double objective_stage1(const BatesParams& p, const QuoteSurface& surface,
                        const CalibrationOptions& opt) {
    return objective_impl(p, nullptr, surface, opt, nullptr);
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double initial_step, long max_evals, double f_tol) {
    const std::size_t n = x0.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += initial_step * std::max(std::fabs(x0[i]), 0.1);
    }
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    const double alpha = 1.0, gamma = 2.0, rho_c = 0.5, sigma_s = 0.5;
    while (evals < max_evals) {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> spts(n + 1);
        std::vector<double> svals(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            spts[i] = pts[idx[i]];
            svals[i] = vals[idx[i]];
        }
        pts = std::move(spts);
        vals = std::move(svals);

        if (std::fabs(vals[n] - vals[0]) < f_tol * (std::fabs(vals[0]) + f_tol)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

        auto affine = [&](double t, const std::vector<double>& far) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (far[j] - centroid[j]);
            return x;
        };

        const auto xr = affine(-alpha, pts[n]);
        const double fr = eval(xr);
        if (fr < vals[0]) {
            const auto xe = affine(-gamma, pts[n]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            const auto xc = affine(rho_c, pts[n]);
            const double fc = eval(xc);
            if (fc < vals[n]) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + sigma_s * (pts[i][j] - pts[0][j]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    return {pts[best], vals[best], evals};
}

// ---------------------------------------------------------------------------
// Two-stage calibration
// ---------------------------------------------------------------------------

namespace {

// Positives optimized in log, rho through atanh; keeps the simplex scale-free.
struct Transform {
    std::vector<std::string> keys;

    std::vector<double> pack(const std::vector<double>& vals) const {
        std::vector<double> x(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (keys[i] == "rho") x[i] = std::atanh(std::clamp(vals[i], -0.999999, 0.999999));
            else if (keys[i] == "mu_j") x[i] = vals[i];
            else x[i] = std::log(std::max(vals[i], 1e-12));
        }
        return x;
    }
    std::vector<double> unpack(const std::vector<double>& x) const {
        std::vector<double> vals(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (keys[i] == "rho") vals[i] = std::tanh(x[i]);
            else if (keys[i] == "mu_j") vals[i] = x[i];
            else vals[i] = std::exp(std::clamp(x[i], -30.0, 30.0));
        }
        return vals;
    }
};

void apply_param(BatesParams& p, const std::string& key, double v) {
    if (key == "vbar") p.vbar = v;
    else if (key == "rho") p.rho = v;
    else if (key == "v0") p.v0 = v;
    else if (key == "lambda") p.lambda = v;
    else if (key == "mu_j") p.mu_j = v;
    else if (key == "sigma_j") p.sigma_j = v;
    else if (key == "gamma") p.gamma = v;
    else if (key == "kappa") p.kappa = v;
    else throw std::invalid_argument("calibrate: unknown parameter key '" + key + "'");
}

double halton_value(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

}  // namespace

CalibrationResult calibrate_two_stage(const QuoteSurface& surface, const BatesParams& initial,
                                      const CalibrationOptions& opt) {
    surface.validate();
    const bool any_index = std::any_of(surface.quotes.begin(), surface.quotes.end(), [](const Quote& q) {
        return q.underlying == Underlying::Index;
    });
    if (!any_index) throw std::invalid_argument("calibrate_two_stage: surface has no index quotes");
    if (!surface.has_vix())
        throw std::invalid_argument(
            "calibrate_two_stage: stage 2 needs VIX quotes; none found in the surface");

    CalibrationResult result;
    long evals = 0;

    // ---- Stage 1: plain Bates on the index quotes, kappa held fixed.
    QuoteSurface index_only = surface;
    index_only.quotes.erase(std::remove_if(index_only.quotes.begin(), index_only.quotes.end(),
                                           [](const Quote& q) { return q.underlying == Underlying::Vix; }),
                            index_only.quotes.end());

    const Transform t1{{"vbar", "gamma", "rho", "v0", "lambda", "mu_j", "sigma_j"}};
    BatesParams base = initial;
    base.x0 = std::log(surface.spot);
    base.rate = surface.rate;

    auto stage1_f = [&](const std::vector<double>& x) {
        const auto vals = t1.unpack(x);
        BatesParams p = base;
        for (std::size_t i = 0; i < vals.size(); ++i) apply_param(p, t1.keys[i], vals[i]);
        if (p.rho > 0.5) return kPenalty;  // equity smile; keeps D-root well away from trouble
        return objective_stage1(p, index_only, opt);
    };

    std::vector<double> s1x = t1.pack({initial.vbar, initial.gamma, initial.rho, initial.v0,
                                       initial.lambda, initial.mu_j, initial.sigma_j});
    auto s1 = nelder_mead(stage1_f, s1x, 0.6, 3000);
    evals += s1.evaluations;
    auto s1b = nelder_mead(stage1_f, s1.x, 0.15, 2000);
    evals += s1b.evaluations;
    if (s1b.value < s1.value) s1 = s1b;

    BatesParams stage1 = base;
    {
        const auto vals = t1.unpack(s1.x);
        for (std::size_t i = 0; i < vals.size(); ++i) apply_param(stage1, t1.keys[i], vals[i]);
    }
    result.stage1_params = stage1;
    result.stage1_objective = s1.value;

    // ---- Stage 2: free the randomizer bounds plus the configured subset.
    std::vector<std::string> keys = opt.stage2_free;
    keys.push_back("a_hat");
    keys.push_back("b_hat");
    const Transform t2{keys};

    const double g1 = std::max(stage1.gamma, 1e-3);
    auto stage2_vals_to_state = [&](const std::vector<double>& vals, BatesParams& p,
                                    DistributionSpec& law) {
        p = stage1;
        double a_hat = 0.0, b_hat = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (keys[i] == "a_hat") a_hat = vals[i];
            else if (keys[i] == "b_hat") b_hat = vals[i];
            else apply_param(p, keys[i], vals[i]);
        }
        if (!(a_hat > 0.0) || !(a_hat < b_hat)) return false;
        law = DistributionSpec::uniform(a_hat, b_hat);
        return true;
    };

    auto stage2_f = [&](const std::vector<double>& x) {
        const auto vals = t2.unpack(x);
        BatesParams p;
        DistributionSpec law;
        if (!stage2_vals_to_state(vals, p, law)) return kPenalty;
        if (p.rho > 0.5) return kPenalty;
        return objective(p, law, surface, opt);
    };

    auto start_vals = [&](double af, double bf) {
        std::vector<double> vals;
        for (const auto& k : keys) {
            if (k == "a_hat") vals.push_back(af * g1);
            else if (k == "b_hat") vals.push_back(bf * g1);
            else if (k == "vbar") vals.push_back(stage1.vbar);
            else if (k == "rho") vals.push_back(stage1.rho);
            else if (k == "v0") vals.push_back(stage1.v0);
            else if (k == "lambda") vals.push_back(std::max(stage1.lambda, 0.01));
            else if (k == "mu_j") vals.push_back(stage1.mu_j);
            else if (k == "sigma_j") vals.push_back(std::max(stage1.sigma_j, 0.01));
            else if (k == "gamma") vals.push_back(stage1.gamma);
            else if (k == "kappa") vals.push_back(stage1.kappa);
        }
        return vals;
    };

    // Deterministic Halton scan of a box around the stage-1 point.
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    const std::size_t dim = keys.size();
    std::vector<std::pair<double, double>> box(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const std::string& k = keys[i];
        if (k == "a_hat") box[i] = {2e-3, 0.6 * g1};
        else if (k == "b_hat") box[i] = {0.6 * g1, 3.5 * g1};
        else if (k == "vbar") box[i] = {0.02, 0.6};
        else if (k == "rho") box[i] = {-0.97, -0.05};
        else if (k == "v0") box[i] = {0.3 * stage1.v0, 3.0 * stage1.v0};
        else if (k == "lambda") box[i] = {0.02, 0.9};
        else if (k == "mu_j") box[i] = {-0.45, -0.02};
        else if (k == "sigma_j") box[i] = {0.005, 0.25};
        else box[i] = {0.5, 1.5};
    }
    std::vector<std::pair<double, std::vector<double>>> scan;
    scan.reserve(static_cast<std::size_t>(opt.scan_points) + 2);
    for (int s = 0; s < opt.scan_points; ++s) {
        std::vector<double> vals(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const double u = halton_value(s + 1, primes[i % 10]);
            // log-spaced inside the box for the positive keys
            if (keys[i] == "rho" || keys[i] == "mu_j")
                vals[i] = box[i].first + u * (box[i].second - box[i].first);
            else
                vals[i] = box[i].first * std::pow(box[i].second / box[i].first, u);
        }
        const auto x = t2.pack(vals);
        scan.emplace_back(stage2_f(x), x);
        ++evals;
    }
    // The stage-1-anchored starts join the candidate pool.
    for (const auto& [af, bf] : {std::pair{0.5, 1.5}, std::pair{0.1, 2.0}}) {
        const auto x = t2.pack(start_vals(af, bf));
        scan.emplace_back(stage2_f(x), x);
        ++evals;
    }
    std::sort(scan.begin(), scan.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SimplexResult best{scan.front().second, scan.front().first, 0};
    const int n_candidates = std::min<int>(opt.polish_candidates, static_cast<int>(scan.size()));
    for (int cidx = 0; cidx < n_candidates; ++cidx) {
        auto r = nelder_mead(stage2_f, scan[static_cast<std::size_t>(cidx)].second, 0.4,
                             opt.max_evals_per_polish);
        evals += r.evaluations;
        if (r.value < best.value) best = r;
    }
    // Restart loop with shrinking simplex scale until it stops paying.
    double step = 0.15;
    for (int it = 0; it < opt.max_restarts; ++it) {
        auto r = nelder_mead(stage2_f, best.x, step, opt.max_evals_per_polish);
        evals += r.evaluations;
        if (r.value < best.value * (1.0 - 1e-10)) {
            const bool big_gain = r.value < 0.7 * best.value;
            best = r;
            if (!big_gain) step *= 0.5;
        } else {
            step *= 0.35;
            if (step < 1e-4) break;
        }
    }

    const auto vals = t2.unpack(best.x);
    BatesParams p2;
    DistributionSpec law;
    if (!stage2_vals_to_state(vals, p2, law))
        throw std::runtime_error("calibrate_two_stage: optimizer returned an invalid state");
    result.params = p2;
    result.random_law = law;
    result.iterations = evals;
    std::vector<double> res;
    result.objective = objective(p2, law, surface, opt, &res);
    result.residuals = std::move(res);
    result.converged = result.objective < kPenalty;
    return result;
}

}  // namespace randiff
