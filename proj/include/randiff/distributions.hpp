#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace randiff {

// Families admissible as parameter randomizers. Each one has closed-form raw
// moments, which is what the quadrature construction consumes.
enum class DistFamily {
    Uniform,              // U([a_hat, b_hat])
    Exponential,          // rate a_hat, mean 1/a_hat
    NormalAffine,         // mu + s * N(0,1)
    Gamma,                // shape a_hat, scale b_hat
    ScaledChiSquare,      // a_hat * chi^2(df = b_hat, noncentrality = c_hat)
    Degenerate            // point mass at theta0
};

struct DistributionSpec {
    DistFamily family = DistFamily::Degenerate;
    double a_hat = 0.0;
    double b_hat = 0.0;
    double c_hat = 0.0;
    double mu = 0.0;
    double s = 1.0;
    double theta0 = 0.0;

    static DistributionSpec uniform(double a, double b);
    static DistributionSpec exponential(double rate);
    static DistributionSpec normal_affine(double mu, double s);
    static DistributionSpec gamma(double shape, double scale);
    static DistributionSpec scaled_chi_square(double scale, double df, double noncentrality);
    static DistributionSpec degenerate(double theta0);

    // Throws std::invalid_argument when the hyper-parameters violate the
    // family constraints (a_hat < b_hat for uniform, positivity, ...).
    void validate() const;

    bool is_degenerate() const { return family == DistFamily::Degenerate; }
};

// Support interval; lo/hi may be +-infinity.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double x) const;
};

Interval support(const DistributionSpec& spec);

// E[theta^n]. n = 0 returns 1 for every family. Throws std::overflow_error
// (naming n) when the closed form overflows.
double raw_moment(const DistributionSpec& spec, int n);

namespace detail {
// Extended-precision moments for the quadrature pipeline; the Gram
// conditioning amplifies last-digit moment noise into ~1e-9 node errors.
long double raw_moment_ld(const DistributionSpec& spec, int n);
}  // namespace detail

// i.i.d. draws; the caller owns the stream so sampling never touches shared state.
std::vector<double> sample(const DistributionSpec& spec, std::mt19937_64& rng, std::size_t count);

// Structured-text (JSON) round trip: key "family" plus the named
// hyper-parameter keys a_hat/b_hat/c_hat/mu/s/theta0 relevant to the family.
std::string to_json_string(const DistributionSpec& spec);
DistributionSpec spec_from_json_string(const std::string& text);

const char* family_name(DistFamily f);

}  // namespace randiff
