#pragma once

#include <stdexcept>

namespace randiff {

enum class OptionKind { Call, Put };

struct VanillaSpec {
    double spot;
    double strike;
    double rate;
    double expiry;  // years, > 0
    OptionKind kind = OptionKind::Call;

    void validate() const;
};

// Thrown by implied_vol when the target price violates the no-arbitrage
// bounds; `below_intrinsic` distinguishes the two sides.
class no_implied_vol : public std::domain_error {
  public:
    no_implied_vol(const std::string& what, bool below) : std::domain_error(what), below_intrinsic(below) {}
    bool below_intrinsic;
};

double bs_price(const VanillaSpec& v, double sigma);
double bs_vega(const VanillaSpec& v, double sigma);

// Safeguarded Newton inside a bisection bracket; sigma clamped to [1e-6, 5].
// bs_price(v, result) reproduces `price` to ~1e-10.
double implied_vol(double price, const VanillaSpec& v);

}  // namespace randiff
