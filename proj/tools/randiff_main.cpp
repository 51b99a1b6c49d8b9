// Command-line surface for the pricing library: quadrature tables, vanilla
// and VIX pricing, implied-vol surfaces, the implied-vol error tables, Monte
// Carlo runs, hyper-parameter sensitivities, and joint calibration.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "randiff/black_scholes.hpp"
#include "randiff/calibration.hpp"
#include "randiff/cos.hpp"
#include "randiff/distributions.hpp"
#include "randiff/montecarlo.hpp"
#include "randiff/quadrature.hpp"
#include "randiff/sensitivities.hpp"
#include "randiff/vix.hpp"

using nlohmann::json;
using namespace randiff;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
};

// All emitters go through one row sink so --format switches csv/json-lines.
class RowSink {
  public:
    RowSink(const GlobalOpts& g, std::vector<std::string> columns)
        : columns_(std::move(columns)), json_mode_(g.format == "jsonl") {
        if (!g.out.empty()) {
            file_.open(g.out);
            if (!file_) throw std::runtime_error("cannot open output file '" + g.out + "'");
        }
        if (!json_mode_) {
            std::string head;
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                if (i) head += ',';
                head += columns_[i];
            }
            line(head);
        }
    }

    void row(const std::vector<json>& values) {
        if (json_mode_) {
            json obj;
            for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = values[i];
            line(obj.dump());
        } else {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) out += ',';
                if (values[i].is_number_float()) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.10g", values[i].get<double>());
                    out += buf;
                } else if (values[i].is_string()) {
                    out += values[i].get<std::string>();
                } else {
                    out += values[i].dump();
                }
            }
            line(out);
        }
    }

  private:
    void line(const std::string& s) {
        if (file_.is_open()) file_ << s << '\n';
        else std::cout << s << '\n';
    }
    std::vector<std::string> columns_;
    bool json_mode_;
    std::ofstream file_;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    json j;
    in >> j;
    return j;
}

DistributionSpec law_from_json(const json& j) { return spec_from_json_string(j.dump()); }

BatesParams bates_from_json(const json& j) {
    BatesParams p;
    p.kappa = j.at("kappa").get<double>();
    p.vbar = j.at("vbar").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.rho = j.at("rho").get<double>();
    p.v0 = j.at("v0").get<double>();
    p.rate = j.value("rate", 0.0);
    p.lambda = j.value("lambda", 0.0);
    p.mu_j = j.value("mu_j", 0.0);
    p.sigma_j = j.value("sigma_j", 0.0);
    p.x0 = std::log(j.at("spot").get<double>());
    p.validate();
    return p;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    if (out.empty()) throw std::runtime_error("empty numeric list");
    return out;
}

// Strike list from --strikes inline or a CSV file with a `strike` column.
std::vector<double> strikes_from_options(const std::string& inline_list, const std::string& csv) {
    if (!inline_list.empty()) return parse_list(inline_list);
    if (csv.empty()) throw std::runtime_error("provide --strikes or --strikes-csv");
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open strike file '" + csv + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty strike file");
    std::stringstream hs(line);
    std::string col;
    int idx = -1, i = 0;
    while (std::getline(hs, col, ',')) {
        if (col == "strike") idx = i;
        ++i;
    }
    if (idx < 0) throw std::runtime_error("strike file needs a 'strike' column");
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        for (int c = 0; std::getline(ls, cell, ','); ++c)
            if (c == idx) out.push_back(std::stod(cell));
    }
    return out;
}

struct ModelConfig {
    std::string kind;  // "bs" | "heston" | "bates"
    BatesParams bates{};
    double bs_sigma = 0.0;
    double spot = 0.0;
    double rate = 0.0;
    std::optional<DistributionSpec> law;
    ParamSlot slot = ParamSlot::Gamma;
    int order = 8;
    int cos_terms = 512;
    double cos_level = 10.0;
};

ModelConfig model_from_config(const json& cfg) {
    ModelConfig m;
    m.kind = cfg.at("model").value("kind", "bates");
    const auto& mj = cfg.at("model");
    m.spot = mj.at("spot").get<double>();
    m.rate = mj.value("rate", 0.0);
    if (m.kind == "bs") {
        m.bs_sigma = mj.value("sigma", 0.0);
    } else {
        m.bates = bates_from_json(mj);
        if (m.kind == "heston") m.bates.lambda = 0.0;
    }
    if (cfg.contains("randomizer")) {
        const auto& r = cfg.at("randomizer");
        m.law = law_from_json(r.at("law"));
        m.order = r.value("order", 8);
        if (m.kind != "bs") m.slot = slot_from_name(r.value("slot", "gamma"));
    }
    if (cfg.contains("cos")) {
        m.cos_terms = cfg.at("cos").value("n_terms", 512);
        m.cos_level = cfg.at("cos").value("level", 10.0);
    }
    return m;
}

struct PricedChf {
    CharacteristicFn chf;
    Range range;
};

PricedChf build_chf(const ModelConfig& m, double expiry) {
    const double x0 = std::log(m.spot);
    if (m.kind == "bs") {
        if (m.law) {
            const auto rule = quadrature_rule(*m.law, m.order);
            return {randomize_chf_bs(x0, m.rate, *m.law, m.order, expiry),
                    truncation_range_envelope_bs(x0, m.rate, rule, expiry, m.cos_level)};
        }
        return {chf_bs(expiry, x0, m.rate, m.bs_sigma),
                truncation_range_bs(x0, m.rate, m.bs_sigma, expiry, m.cos_level)};
    }
    if (m.law) {
        const auto rule = quadrature_rule(*m.law, m.order);
        return {randomize_chf_bates(m.bates, m.slot, *m.law, m.order, expiry),
                truncation_range_envelope_bates(m.bates, m.slot, rule, expiry, m.cos_level)};
    }
    return {chf_bates(expiry, m.bates), truncation_range_bates(m.bates, expiry, m.cos_level)};
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

int cmd_quadrature(const GlobalOpts& g, const std::string& law_text, int order) {
    const auto spec = spec_from_json_string(law_text);
    const auto rule = quadrature_rule(spec, order);
    RowSink sink(g, {"n", "weight", "node"});
    for (std::size_t n = 0; n < rule.nodes.size(); ++n)
        sink.row({static_cast<int>(n + 1), rule.weights[n], rule.nodes[n]});
    return 0;
}

int cmd_price_vanilla(const GlobalOpts& g, const std::string& config, double expiry,
                      const std::string& strikes_text, const std::string& strikes_csv,
                      const std::string& kind_text) {
    const auto cfg = load_json_file(config);
    const auto m = model_from_config(cfg);
    const auto strikes = strikes_from_options(strikes_text, strikes_csv);
    const OptionKind kind = kind_text == "put" ? OptionKind::Put : OptionKind::Call;
    const auto priced = build_chf(m, expiry);
    RowSink sink(g, {"expiry", "strike", "price", "implied_vol"});
    for (double k : strikes) {
        VanillaSpec v{m.spot, k, m.rate, expiry, kind};
        const double px = cos_vanilla_price(priced.chf, v, priced.range.a, priced.range.b, m.cos_terms);
        double iv;
        try {
            iv = implied_vol(px, v);
        } catch (const no_implied_vol&) {
            iv = std::numeric_limits<double>::quiet_NaN();
        }
        sink.row({expiry, k, px, iv});
    }
    return 0;
}

int cmd_price_vix(const GlobalOpts& g, const std::string& config, double expiry, double tenor,
                  const std::string& strikes_text, const std::string& strikes_csv,
                  const std::string& method) {
    const auto cfg = load_json_file(config);
    const auto m = model_from_config(cfg);
    if (m.kind == "bs") throw std::runtime_error("price-vix needs a heston/bates model");
    const auto strikes = strikes_from_options(strikes_text, strikes_csv);  // VIX points
    RowSink sink(g, {"expiry", "strike", "price"});
    for (double kbar : strikes) {
        const double k = kbar / 100.0;  // quoting scale -> internal 0-1 vols
        double px;
        if (method == "cos") {
            px = m.law ? vix_option_cos_rand(k, 0.0, expiry, tenor, m.bates, m.slot, *m.law, m.order,
                                             m.cos_terms, 12.0)
                       : vix_option_cos(k, 0.0, expiry, tenor, m.bates, m.cos_terms, 12.0);
        } else {
            px = m.law ? vix_option_rand(k, 0.0, expiry, tenor, m.bates, m.slot, *m.law, m.order)
                       : vix_option_direct(k, 0.0, expiry, tenor, m.bates);
        }
        sink.row({expiry, kbar, px});
    }
    return 0;
}

int cmd_surface(const GlobalOpts& g, const std::string& config, const std::string& expiries_text,
                const std::string& deltas_text) {
    const auto cfg = load_json_file(config);
    const auto m = model_from_config(cfg);
    const auto expiries = parse_list(expiries_text);
    const auto deltas = parse_list(deltas_text);
    RowSink sink(g, {"expiry", "strike", "implied_vol"});
    for (double expiry : expiries) {
        const auto priced = build_chf(m, expiry);
        for (double d : deltas) {
            const double k = m.spot * std::exp(0.1 * std::sqrt(expiry) * d);
            VanillaSpec v{m.spot, k, m.rate, expiry, OptionKind::Call};
            const double px =
                cos_vanilla_price(priced.chf, v, priced.range.a, priced.range.b, m.cos_terms);
            sink.row({expiry, k, implied_vol(px, v)});
        }
    }
    return 0;
}

int cmd_table3(const GlobalOpts& g, const std::string& law_text, long paths, bool antithetic,
               bool itm_side, int n_min, int n_max, const std::string& tenors_text) {
    const auto spec = spec_from_json_string(law_text);
    const double s0 = 100.0, rate = 0.0;
    const double x0 = std::log(s0);
    struct Tenor {
        std::string name;
        double value;
    };
    std::vector<Tenor> tenors = {{"1d", 1.0 / 365}, {"1w", 7.0 / 365}, {"2w", 14.0 / 365},
                                 {"1m", 30.0 / 365}, {"3m", 0.25},     {"6m", 0.5},
                                 {"12m", 1.0}};
    if (!tenors_text.empty()) {
        tenors.clear();
        for (double t : parse_list(tenors_text)) tenors.push_back({std::to_string(t), t});
    }
    const double deltas[] = {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};

    RowSink sink(g, {"tenor", "expiry", "order", "max_iv_error_pct", "route_gap"});
    for (const auto& tenor : tenors) {
        const double expiry = tenor.value;
        // MC reference: exact lognormal terminal draws, sigma sampled per path.
        const auto xs =
            simulate_bs_terminal_randomized(x0, rate, spec, expiry, paths, g.seed, antithetic);
        std::vector<double> ref_iv;
        for (double d : deltas) {
            const double k = s0 * std::exp(0.1 * std::sqrt(expiry) * d);
            // Invert from the OTM side unless asked for plain calls; the OTM
            // side roughly halves the reference noise in the wings.
            const bool use_put = !itm_side && k < s0;
            double sum = 0.0;
            for (double x : xs)
                sum += use_put ? std::max(k - std::exp(x), 0.0) : std::max(std::exp(x) - k, 0.0);
            const double px = std::exp(-rate * expiry) * sum / static_cast<double>(xs.size());
            VanillaSpec v{s0, k, rate, expiry, use_put ? OptionKind::Put : OptionKind::Call};
            ref_iv.push_back(implied_vol(px, v));
        }
        for (int order = n_min; order <= n_max; ++order) {
            const auto rule = quadrature_rule(spec, order);
            // Route one: price-level mixture of closed-form prices.
            // Route two: COS of the randomized ChF; the two must agree.
            const auto chf = randomize_chf_bs(x0, rate, spec, order, expiry);
            const Range r = truncation_range_envelope_bs(x0, rate, rule, expiry, 10.0);
            const double sig_min = std::max(rule.nodes.front(), 1e-4);
            const double u_needed = std::sqrt(2.0 * std::log(1e13) / (sig_min * sig_min * expiry));
            int n_terms = 512;
            while (n_terms * std::numbers::pi / (r.b - r.a) < u_needed && n_terms < (1 << 21))
                n_terms *= 2;
            double max_err = 0.0, route_gap = 0.0;
            for (std::size_t i = 0; i < std::size(deltas); ++i) {
                const double k = s0 * std::exp(0.1 * std::sqrt(expiry) * deltas[i]);
                VanillaSpec v{s0, k, rate, expiry, OptionKind::Call};
                double mix = 0.0;
                for (std::size_t n = 0; n < rule.nodes.size(); ++n)
                    mix += rule.weights[n] * bs_price(v, rule.nodes[n]);
                const double cosv = cos_vanilla_price(chf, v, r.a, r.b, n_terms);
                route_gap = std::max(route_gap, std::fabs(cosv - mix));
                const double iv = implied_vol(mix, v);
                max_err = std::max(max_err, std::fabs(iv - ref_iv[i]));
            }
            sink.row({tenor.name, expiry, order, 100.0 * max_err, route_gap});
        }
    }
    return 0;
}

int cmd_mc(const GlobalOpts& g, const std::string& config, double expiry, double strike, long paths,
           const std::string& estimator, int steps_per_year, const std::string& scheme_text,
           bool antithetic) {
    const auto cfg = load_json_file(config);
    const auto m = model_from_config(cfg);
    McConfig mc;
    mc.paths = paths;
    mc.steps_per_year = steps_per_year;
    mc.seed = g.seed;
    mc.antithetic = antithetic;
    mc.scheme =
        scheme_text == "exact-cir" ? VarianceScheme::ExactCir : VarianceScheme::EulerFullTruncation;
    const Payoff payoff = [strike](double s) { return std::max(s - strike, 0.0); };
    const double x0 = std::log(m.spot);

    RowSink sink(g, {"estimator", "node", "theta", "weight", "paths", "price", "std_error"});
    if (estimator == "v2") {
        if (!m.law) throw std::runtime_error("mc --estimator v2 needs a randomizer block");
        std::vector<NodeBreakdown> nodes;
        McEstimate e;
        if (m.kind == "bs")
            e = price_v2_bs(x0, m.rate, *m.law, m.order, payoff, expiry, mc, &nodes);
        else
            e = price_v2_bates(m.bates, m.slot, *m.law, m.order, payoff, expiry, mc, &nodes);
        for (std::size_t n = 0; n < nodes.size(); ++n)
            sink.row({"v2-node", static_cast<int>(n + 1), nodes[n].theta, nodes[n].weight,
                      static_cast<long>(nodes[n].paths), nodes[n].estimate.price,
                      nodes[n].estimate.std_error});
        sink.row({"v2", 0, 0.0, 1.0, static_cast<long>(mc.paths * static_cast<long>(nodes.size())),
                  e.price, e.std_error});
    } else {
        McEstimate e;
        if (m.kind == "bs") {
            const auto xs = m.law ? simulate_bs_terminal_randomized(x0, m.rate, *m.law, expiry,
                                                                    paths, g.seed, antithetic)
                                  : simulate_bs_terminal(x0, m.rate, m.bs_sigma, expiry, paths,
                                                         g.seed, antithetic);
            e = price_v1(xs, payoff, m.rate, expiry);
        } else {
            const auto run = m.law
                                 ? simulate_bates_terminal_randomized(m.bates, m.slot, *m.law, expiry, mc)
                                 : simulate_bates_terminal(m.bates, expiry, mc);
            e = price_v1(run.log_spot, payoff, m.rate, expiry);
        }
        sink.row({"v1", 0, 0.0, 1.0, static_cast<long>(paths), e.price, e.std_error});
    }
    return 0;
}

int cmd_sens(const GlobalOpts& g, const std::string& config, double expiry, double strike,
             const std::string& hyper, double bump_size) {
    const auto cfg = load_json_file(config);
    const auto m = model_from_config(cfg);
    if (!m.law) throw std::runtime_error("sens needs a randomizer block in the config");
    BumpConfig bump;
    bump.rel_bump = bump_size;
    VanillaSpec v{m.spot, strike, m.rate, expiry, OptionKind::Call};

    const auto priced = build_chf(m, expiry);
    const double base_price =
        cos_vanilla_price(priced.chf, v, priced.range.a, priced.range.b, m.cos_terms);
    const double sens =
        m.kind == "bs" ? dprice_dhyper_bs(v, *m.law, hyper, m.order, bump,
                                          std::max(m.cos_terms, 2048), m.cos_level)
                       : dprice_dhyper_bates(v, m.bates, m.slot, *m.law, hyper, m.order, bump,
                                             std::max(m.cos_terms, 2048), m.cos_level);
    RowSink sink(g, {"expiry", "strike", "hyper", "base_price", "sensitivity", "rel_bump"});
    sink.row({expiry, strike, hyper, base_price, sens, bump.rel_bump});
    return 0;
}

int cmd_calibrate(const GlobalOpts& g, const std::string& quotes_path, const std::string& config) {
    const auto cfg = load_json_file(config);
    const double spot = cfg.at("spot").get<double>();
    const double rate = cfg.value("rate", 0.0);
    const auto surface = load_quotes(quotes_path, spot, rate);

    BatesParams initial = bates_from_json(cfg.at("initial"));
    initial.x0 = std::log(spot);
    initial.rate = rate;

    CalibrationOptions opt;
    if (cfg.contains("options")) {
        const auto& o = cfg.at("options");
        opt.w_atm = o.value("w_atm", opt.w_atm);
        opt.quad_order = o.value("quad_order", opt.quad_order);
        opt.cos_terms = o.value("cos_terms", opt.cos_terms);
        opt.scan_points = o.value("scan_points", opt.scan_points);
        opt.polish_candidates = o.value("polish_candidates", opt.polish_candidates);
        opt.max_evals_per_polish = o.value("max_evals_per_polish", opt.max_evals_per_polish);
        opt.max_restarts = o.value("max_restarts", opt.max_restarts);
        opt.vix_tenor = o.value("vix_tenor", opt.vix_tenor);
        if (o.contains("stage2_free"))
            opt.stage2_free = o.at("stage2_free").get<std::vector<std::string>>();
    }

    const auto result = calibrate_two_stage(surface, initial, opt);
    RowSink sink(g, {"stage", "kappa", "v0", "vbar", "rho", "mu_j", "sigma_j", "lambda",
                     "gamma_law", "objective", "evaluations", "converged"});
    const auto& s1 = result.stage1_params;
    sink.row({"bates", s1.kappa, s1.v0, s1.vbar, s1.rho, s1.mu_j, s1.sigma_j, s1.lambda,
              "degenerate(" + std::to_string(s1.gamma) + ")", result.stage1_objective,
              static_cast<long>(0), true});
    const auto& p2 = result.params;
    sink.row({"randomized", p2.kappa, p2.v0, p2.vbar, p2.rho, p2.mu_j, p2.sigma_j, p2.lambda,
              "uniform(" + std::to_string(result.random_law.a_hat) + "," +
                  std::to_string(result.random_law.b_hat) + ")",
              result.objective, result.iterations, result.converged});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized affine-diffusion pricing toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "RNG seed for every stochastic command");
    app.add_option("--out", g.out, "write output to this file instead of stdout");
    app.add_option("--format", g.format, "output format: csv | jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    auto* q = app.add_subcommand("quadrature", "weights/nodes table for a randomizer law");
    q->fallthrough();
    std::string law_text;
    int order = 5;
    q->add_option("--law", law_text,
                  "law as JSON, e.g. {\"family\":\"uniform\",\"a_hat\":0,\"b_hat\":1}")
        ->required();
    q->add_option("--order", order, "rule order N")->required();

    auto* pv = app.add_subcommand("price-vanilla", "European option prices via the cosine expansion");
    pv->fallthrough();
    std::string config, strikes_text, strikes_csv, kind_text = "call";
    double expiry = 0.25;
    pv->add_option("--config", config, "model config JSON file")->required();
    pv->add_option("--expiry", expiry, "expiry in years")->required();
    pv->add_option("--strikes", strikes_text, "comma-separated strikes");
    pv->add_option("--strikes-csv", strikes_csv, "CSV file with a 'strike' column");
    pv->add_option("--kind", kind_text, "call | put")->check(CLI::IsMember({"call", "put"}));

    auto* pvx = app.add_subcommand("price-vix", "VIX call prices (strikes in VIX points)");
    pvx->fallthrough();
    std::string vix_config, vix_strikes, vix_strikes_csv, vix_method = "direct";
    double vix_expiry = 1.0 / 12, vix_tenor = 30.0 / 365;
    pvx->add_option("--config", vix_config)->required();
    pvx->add_option("--expiry", vix_expiry, "option expiry in years");
    pvx->add_option("--tenor", vix_tenor, "volatility window length in years");
    pvx->add_option("--strikes", vix_strikes, "comma-separated strikes in VIX points");
    pvx->add_option("--strikes-csv", vix_strikes_csv);
    pvx->add_option("--method", vix_method, "direct | cos")->check(CLI::IsMember({"direct", "cos"}));

    auto* sf = app.add_subcommand("surface", "implied-vol surface on the moneyness strike rule");
    sf->fallthrough();
    std::string sf_config, sf_expiries = "0.02,0.05,0.1,0.15,0.25,0.5,1.0";
    std::string sf_deltas = "-3,-2,-1,-0.5,0,0.5,1,2,3";
    sf->add_option("--config", sf_config)->required();
    sf->add_option("--expiries", sf_expiries, "comma-separated expiries (years)");
    sf->add_option("--deltas", sf_deltas, "strike rule K = S exp(0.1 sqrt(T) delta)");

    auto* t3 = app.add_subcommand(
        "table3", "max implied-vol error of randomized prices vs a Monte Carlo reference");
    t3->fallthrough();
    std::string t3_law = R"({"family":"gamma","a_hat":2.55,"b_hat":0.1})";
    long t3_paths = 10000000;
    bool t3_antithetic = false, t3_itm = false;
    int t3_nmin = 2, t3_nmax = 9;
    std::string t3_tenors;
    t3->add_option("--law", t3_law, "randomizer for the volatility (JSON)");
    t3->add_option("--paths", t3_paths, "MC reference sample count");
    t3->add_flag("--antithetic", t3_antithetic, "antithetic pairs in the reference");
    t3->add_flag("--itm-side", t3_itm, "invert calls at every strike instead of the OTM side");
    t3->add_option("--n-min", t3_nmin);
    t3->add_option("--n-max", t3_nmax);
    t3->add_option("--tenors", t3_tenors, "override the tenor grid (years, comma-separated)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo pricing (plain or quadrature-split)");
    mc->fallthrough();
    std::string mc_config, mc_estimator = "v1", mc_scheme = "euler-full-truncation";
    double mc_expiry = 0.1, mc_strike = 100.0;
    long mc_paths = 100000;
    int mc_steps = 730;
    bool mc_antithetic = false;
    mc->add_option("--config", mc_config)->required();
    mc->add_option("--expiry", mc_expiry)->required();
    mc->add_option("--strike", mc_strike)->required();
    mc->add_option("--paths", mc_paths, "paths (per node for v2)");
    mc->add_option("--estimator", mc_estimator)->check(CLI::IsMember({"v1", "v2"}));
    mc->add_option("--steps-per-year", mc_steps);
    mc->add_option("--scheme", mc_scheme)
        ->check(CLI::IsMember({"euler-full-truncation", "exact-cir"}));
    mc->add_flag("--antithetic", mc_antithetic);

    auto* sn = app.add_subcommand("sens", "price sensitivity to a randomizer hyper-parameter");
    sn->fallthrough();
    std::string sn_config, sn_hyper = "a_hat";
    double sn_expiry = 0.1, sn_strike = 100.0, sn_bump = 1e-4;
    sn->add_option("--config", sn_config)->required();
    sn->add_option("--expiry", sn_expiry)->required();
    sn->add_option("--strike", sn_strike)->required();
    sn->add_option("--hyper", sn_hyper, "a_hat | b_hat | c_hat | mu | s | theta0");
    sn->add_option("--bump", sn_bump, "relative central-difference bump");

    auto* cal = app.add_subcommand("calibrate", "two-stage joint index/VIX calibration");
    cal->fallthrough();
    std::string cal_quotes, cal_config;
    cal->add_option("--quotes", cal_quotes, "quote CSV (underlying,expiry,strike,mid_iv,...)")
        ->required();
    cal->add_option("--config", cal_config, "spot/rate/initial/options JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (q->parsed()) return cmd_quadrature(g, law_text, order);
        if (pv->parsed())
            return cmd_price_vanilla(g, config, expiry, strikes_text, strikes_csv, kind_text);
        if (pvx->parsed())
            return cmd_price_vix(g, vix_config, vix_expiry, vix_tenor, vix_strikes, vix_strikes_csv,
                                 vix_method);
        if (sf->parsed()) return cmd_surface(g, sf_config, sf_expiries, sf_deltas);
        if (t3->parsed())
            return cmd_table3(g, t3_law, t3_paths, t3_antithetic, t3_itm, t3_nmin, t3_nmax, t3_tenors);
        if (mc->parsed())
            return cmd_mc(g, mc_config, mc_expiry, mc_strike, mc_paths, mc_estimator, mc_steps,
                          mc_scheme, mc_antithetic);
        if (sn->parsed()) return cmd_sens(g, sn_config, sn_expiry, sn_strike, sn_hyper, sn_bump);
        if (cal->parsed()) return cmd_calibrate(g, cal_quotes, cal_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
