#pragma once

#include <functional>
#include <utility>

namespace randiff {

double norm_pdf(double x);
double norm_cdf(double x);

// Unnormalized-argument Fresnel integrals,
//   C_F(x) = int_0^x cos(t^2) dt,  S_F(x) = int_0^x sin(t^2) dt,
// odd in x, both tending to sqrt(pi/8) as x -> +inf.
struct FresnelResult {
    double c;
    double s;
};
FresnelResult fresnel(double x);

// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Noncentral chi-square chi^2(df, nc): Poisson-weighted central series with
// two-sided truncation at relative tail mass 1e-14.
double ncchi2_pdf(double x, double df, double nc);
double ncchi2_cdf(double x, double df, double nc);

// Smallest x with ncchi2_cdf(x) >= p, by bracketing + bisection. Used for
// tail-based integration limits.
double ncchi2_quantile(double p, double df, double nc);

// Closed-form upper bound on the (1 - prob) quantile with guaranteed
// coverage; cheap enough for per-node integration limits.
double ncchi2_tail_bound(double prob, double df, double nc);

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 60);

}  // namespace randiff
