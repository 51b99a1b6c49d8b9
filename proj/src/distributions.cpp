#include "randiff/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace randiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_spec(const std::string& what) {
    throw std::invalid_argument("DistributionSpec: " + what);
}

// log n! ; exact table below 21, lgamma above (factorials overflow double at 171!).
double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double factorial(int n) {
    static const double table[] = {1., 1., 2., 6., 24., 120., 720., 5040., 40320., 362880.,
                                   3628800., 39916800., 479001600., 6227020800., 87178291200.,
                                   1307674368000., 20922789888000., 355687428096000.,
                                   6402373705728000., 121645100408832000., 2432902008176640000.};
    if (n <= 20) return table[n];
    return std::exp(log_factorial(n));
}

// Raw moments of the (unscaled) noncentral chi-square chi^2(df, nc) by the
// standard recursion:
//   m_n = 2^{n-1}(n-1)!(df + n*nc) + sum_{j=1}^{n-1} (n-1)! 2^{j-1}/(n-j)! (df + j*nc) m_{n-j}.
std::vector<long double> ncchi2_moments_ld(double df, double nc, int n_max) {
    std::vector<long double> m(static_cast<std::size_t>(n_max) + 1, 0.0L);
    m[0] = 1.0L;
    for (int n = 1; n <= n_max; ++n) {
        const long double fn1 = factorial(n - 1);
        long double val = std::pow(2.0L, n - 1) * fn1 * (df + static_cast<long double>(n) * nc);
        for (int j = 1; j < n; ++j) {
            val += fn1 * std::pow(2.0L, j - 1) / static_cast<long double>(factorial(n - j)) *
                   (df + static_cast<long double>(j) * nc) * m[n - j];
        }
        m[n] = val;
    }
    return m;
}

long double double_factorial_odd_ld(int k) {
    // (k-1)!! for even k: product of odd numbers below k.
    long double v = 1.0L;
    for (int i = k - 1; i > 1; i -= 2) v *= i;
    return v;
}

}  // namespace

DistributionSpec DistributionSpec::uniform(double a, double b) {
    DistributionSpec s;
    s.family = DistFamily::Uniform;
    s.a_hat = a;
    s.b_hat = b;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::exponential(double rate) {
    DistributionSpec s;
    s.family = DistFamily::Exponential;
    s.a_hat = rate;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::normal_affine(double mu, double sd) {
    DistributionSpec s;
    s.family = DistFamily::NormalAffine;
    s.mu = mu;
    s.s = sd;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
    DistributionSpec s;
    s.family = DistFamily::Gamma;
    s.a_hat = shape;
    s.b_hat = scale;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::scaled_chi_square(double scale, double df, double noncentrality) {
    DistributionSpec s;
    s.family = DistFamily::ScaledChiSquare;
    s.a_hat = scale;
    s.b_hat = df;
    s.c_hat = noncentrality;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::degenerate(double theta0) {
    DistributionSpec s;
    s.family = DistFamily::Degenerate;
    s.theta0 = theta0;
    return s;
}

void DistributionSpec::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    switch (family) {
        case DistFamily::Uniform:
            if (!finite(a_hat) || !finite(b_hat) || !(a_hat < b_hat))
                bad_spec("uniform requires a_hat < b_hat");
            break;
        case DistFamily::Exponential:
            if (!(a_hat > 0.0)) bad_spec("exponential requires rate a_hat > 0");
            break;
        case DistFamily::NormalAffine:
            if (!(s > 0.0) || !finite(mu)) bad_spec("normal requires s > 0");
            break;
        case DistFamily::Gamma:
            if (!(a_hat > 0.0) || !(b_hat > 0.0)) bad_spec("gamma requires shape > 0 and scale > 0");
            break;
        case DistFamily::ScaledChiSquare:
            if (!(a_hat > 0.0)) bad_spec("scaled chi-square requires scale > 0");
            if (!(b_hat > 0.0)) bad_spec("scaled chi-square requires df > 0");
            if (!(c_hat >= 0.0)) bad_spec("scaled chi-square requires noncentrality >= 0");
            break;
        case DistFamily::Degenerate:
            if (!finite(theta0)) bad_spec("degenerate requires finite theta0");
            break;
    }
}

bool Interval::contains(double x) const {
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    if (hi_open ? !(x < hi) : !(x <= hi)) return false;
    return true;
}

Interval support(const DistributionSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case DistFamily::Uniform: return {spec.a_hat, spec.b_hat, false, false};
        case DistFamily::Exponential: return {0.0, kInf, true, true};
        case DistFamily::Gamma: return {0.0, kInf, true, true};
        case DistFamily::ScaledChiSquare: return {0.0, kInf, false, true};
        case DistFamily::NormalAffine: return {-kInf, kInf, true, true};
        case DistFamily::Degenerate: return {spec.theta0, spec.theta0, false, false};
    }
    bad_spec("unknown family");
}

namespace detail {

long double raw_moment_ld(const DistributionSpec& spec, int n) {
    spec.validate();
    if (n < 0) throw std::invalid_argument("raw_moment: n must be >= 0");
    if (n == 0) return 1.0L;

    long double m = std::numeric_limits<long double>::quiet_NaN();
    switch (spec.family) {
        case DistFamily::Uniform: {
            const long double a = spec.a_hat, b = spec.b_hat;
            m = (std::pow(b, n + 1) - std::pow(a, n + 1)) / ((n + 1) * (b - a));
            break;
        }
        case DistFamily::Exponential: {
            // n! / a^n, in log space above n = 20 to dodge factorial overflow.
            if (n <= 20) m = static_cast<long double>(factorial(n)) / std::pow(static_cast<long double>(spec.a_hat), n);
            else m = std::exp(static_cast<long double>(log_factorial(n)) -
                              n * std::log(static_cast<long double>(spec.a_hat)));
            break;
        }
        case DistFamily::NormalAffine: {
            // Binomial expansion over standard-normal moments (k-1)!! (k even).
            long double acc = 0.0L;
            long double binom = 1.0L;
            for (int k = 0; k <= n; ++k) {
                if (k % 2 == 0) {
                    acc += binom * std::pow(static_cast<long double>(spec.mu), n - k) *
                           std::pow(static_cast<long double>(spec.s), k) * double_factorial_odd_ld(k);
                }
                binom = binom * (n - k) / (k + 1);
            }
            m = acc;
            break;
        }
        case DistFamily::Gamma: {
            // b^n * Gamma(n + a) / Gamma(a), log space for large n.
            if (spec.a_hat + n < 1700.0) {
                long double rising = 1.0L;
                for (int j = 0; j < n; ++j) rising *= (static_cast<long double>(spec.a_hat) + j);
                m = rising * std::pow(static_cast<long double>(spec.b_hat), n);
            } else {
                m = std::exp(n * std::log(static_cast<long double>(spec.b_hat)) +
                             static_cast<long double>(std::lgamma(spec.a_hat + n) - std::lgamma(spec.a_hat)));
            }
            break;
        }
        case DistFamily::ScaledChiSquare: {
            const auto mm = ncchi2_moments_ld(spec.b_hat, spec.c_hat, n);
            m = std::pow(static_cast<long double>(spec.a_hat), n) * mm[static_cast<std::size_t>(n)];
            break;
        }
        case DistFamily::Degenerate:
            m = std::pow(static_cast<long double>(spec.theta0), n);
            break;
    }
    if (!std::isfinite(static_cast<double>(m)))
        throw std::overflow_error("raw_moment: arithmetic overflow at moment order n = " +
                                  std::to_string(n));
    return m;
}

}  // namespace detail

double raw_moment(const DistributionSpec& spec, int n) {
    return static_cast<double>(detail::raw_moment_ld(spec, n));
}

std::vector<double> sample(const DistributionSpec& spec, std::mt19937_64& rng, std::size_t count) {
    spec.validate();
    std::vector<double> out(count);
    switch (spec.family) {
        case DistFamily::Uniform: {
            std::uniform_real_distribution<double> d(spec.a_hat, spec.b_hat);
            for (auto& x : out) x = d(rng);
            break;
        }
        case DistFamily::Exponential: {
            std::exponential_distribution<double> d(spec.a_hat);
            for (auto& x : out) x = d(rng);
            break;
        }
        case DistFamily::NormalAffine: {
            std::normal_distribution<double> d(spec.mu, spec.s);
            for (auto& x : out) x = d(rng);
            break;
        }
        case DistFamily::Gamma: {
            std::gamma_distribution<double> d(spec.a_hat, spec.b_hat);
            for (auto& x : out) x = d(rng);
            break;
        }
        case DistFamily::ScaledChiSquare: {
            // Poisson(nc/2) mixture of central chi-squares, chi^2_k = Gamma(k/2, 2).
            std::poisson_distribution<int> pois(spec.c_hat / 2.0);
            for (auto& x : out) {
                const int j = spec.c_hat > 0.0 ? pois(rng) : 0;
                std::gamma_distribution<double> g((spec.b_hat + 2.0 * j) / 2.0, 2.0);
                x = spec.a_hat * g(rng);
            }
            break;
        }
        case DistFamily::Degenerate:
            std::fill(out.begin(), out.end(), spec.theta0);
            break;
    }
    return out;
}

const char* family_name(DistFamily f) {
    switch (f) {
        case DistFamily::Uniform: return "uniform";
        case DistFamily::Exponential: return "exponential";
        case DistFamily::NormalAffine: return "normal";
        case DistFamily::Gamma: return "gamma";
        case DistFamily::ScaledChiSquare: return "scaled_chi_square";
        case DistFamily::Degenerate: return "degenerate";
    }
    return "?";
}

std::string to_json_string(const DistributionSpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    switch (spec.family) {
        case DistFamily::Uniform:
            j["a_hat"] = spec.a_hat;
            j["b_hat"] = spec.b_hat;
            break;
        case DistFamily::Exponential:
            j["a_hat"] = spec.a_hat;
            break;
        case DistFamily::NormalAffine:
            j["mu"] = spec.mu;
            j["s"] = spec.s;
            break;
        case DistFamily::Gamma:
            j["a_hat"] = spec.a_hat;
            j["b_hat"] = spec.b_hat;
            break;
        case DistFamily::ScaledChiSquare:
            j["a_hat"] = spec.a_hat;
            j["b_hat"] = spec.b_hat;
            j["c_hat"] = spec.c_hat;
            break;
        case DistFamily::Degenerate:
            j["theta0"] = spec.theta0;
            break;
    }
    return j.dump();
}

DistributionSpec spec_from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "uniform")
        return DistributionSpec::uniform(j.at("a_hat").get<double>(), j.at("b_hat").get<double>());
    if (fam == "exponential") return DistributionSpec::exponential(j.at("a_hat").get<double>());
    if (fam == "normal")
        return DistributionSpec::normal_affine(j.at("mu").get<double>(), j.at("s").get<double>());
    if (fam == "gamma")
        return DistributionSpec::gamma(j.at("a_hat").get<double>(), j.at("b_hat").get<double>());
    if (fam == "scaled_chi_square")
        return DistributionSpec::scaled_chi_square(j.at("a_hat").get<double>(),
                                                   j.at("b_hat").get<double>(),
                                                   j.at("c_hat").get<double>());
    if (fam == "degenerate") return DistributionSpec::degenerate(j.at("theta0").get<double>());
    throw std::invalid_argument("DistributionSpec: unknown family '" + fam + "'");
}

}  // namespace randiff
