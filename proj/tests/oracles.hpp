// Test-side reference implementations, deliberately independent of the
// library's quadrature/eigen path: classical Gauss rules by Newton iteration
// on the polynomial recurrences, plus a brute-force integrator for moment and
// coefficient oracles.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1] (probability weights sum to 2).
inline Rule gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double eps = 1e-15;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < eps) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

// Probabilists' Gauss-Hermite (weight e^{-x^2/2}/sqrt(2 pi), weights sum 1).
inline Rule gauss_hermite_prob(int n) {
    // Physicists' rule by Newton on H_n, then scale nodes by sqrt(2) and
    // weights by 1/sqrt(pi).
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double eps = 1e-15;
    const int m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double x = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1) x -= 1.14 * std::pow(n, 0.426) / x;
        else if (i == 2) x = 1.86 * x - 0.86 * r.nodes[n - 1];
        else if (i == 3) x = 1.91 * x - 0.91 * r.nodes[n - 2];
        else x = 2.0 * x - r.nodes[n - i + 1];
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < eps) break;
        }
        r.nodes[n - 1 - i] = x;
        r.nodes[i] = -x;
        r.weights[n - 1 - i] = r.weights[i] = 2.0 / (pp * pp);
    }
    for (int i = 0; i < n; ++i) {
        r.nodes[i] *= std::numbers::sqrt2;
        r.weights[i] /= std::sqrt(std::numbers::pi);
    }
    return r;
}

// Generalized Gauss-Laguerre with weight x^alf e^{-x}; probability weights
// (divide by Gamma(alf+1)) are the caller's business.
inline Rule gauss_laguerre(int n, double alf) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double eps = 1e-14;
    double x = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) x = (1.0 + alf) * (3.0 + 0.92 * alf) / (1.0 + 2.4 * n + 1.8 * alf);
        else if (i == 1) x += (15.0 + 6.25 * alf) / (1.0 + 0.9 * alf + 2.5 * n);
        else {
            const double ai = i - 1;
            x += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alf / (1.0 + 3.5 * ai)) * (x - r.nodes[i - 2]) /
                 (1.0 + 0.3 * alf);
        }
        double pp = 0.0, p2 = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0 + alf - x) * p2 - (j + alf) * p3) / (j + 1.0);
            }
            pp = (n * p1 - (n + alf) * p2) / x;
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < eps * std::max(1.0, x)) break;
        }
        r.nodes[i] = x;
        r.weights[i] = -std::exp(std::lgamma(alf + n) - std::lgamma(static_cast<double>(n))) / (pp * n * p2);
    }
    return r;
}

// Composite 61-point Gauss-Legendre panels; a straightforward, reliable
// brute-force integrator for oracle values.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64) {
    static const Rule g = gauss_legendre(61);
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < 61; ++i) {
            const double x = lo + 0.5 * h * (g.nodes[i] + 1.0);
            total += 0.5 * h * g.weights[i] * f(x);
        }
    }
    return total;
}

}  // namespace oracles
