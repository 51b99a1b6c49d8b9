#include "randiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace randiff {

namespace {

// Gram conditioning eats ~2 digits per order; the 80-bit intermediate keeps
// the N <= 10 classical-rule agreement below 1e-10.
using real = long double;

real hypot2(real a, real b) {
    const real aa = std::fabs(a), ab = std::fabs(b);
    if (aa > ab) {
        const real r = ab / aa;
        return aa * std::sqrt(1.0L + r * r);
    }
    if (ab == 0.0L) return 0.0L;
    const real r = aa / ab;
    return ab * std::sqrt(1.0L + r * r);
}

// Upper-triangular Cholesky M = R^T R in extended precision.
std::vector<real> cholesky_upper(const std::vector<real>& m, int n, int order_for_msg) {
    std::vector<real> r(static_cast<std::size_t>(n) * n, 0.0L);
    for (int i = 0; i < n; ++i) {
        real s = m[i * n + i];
        for (int k = 0; k < i; ++k) s -= r[k * n + i] * r[k * n + i];
        if (!(s > 0.0L)) {
            throw conditioning_error(
                "quadrature: moment Gram matrix is not positive definite at pivot " +
                std::to_string(i) + " for order N = " + std::to_string(order_for_msg) +
                "; the randomizer is (near-)degenerate at this order, use a smaller N");
        }
        r[i * n + i] = std::sqrt(s);
        for (int j = i + 1; j < n; ++j) {
            real v = m[i * n + j];
            for (int k = 0; k < i; ++k) v -= r[k * n + i] * r[k * n + j];
            r[i * n + j] = v / r[i * n + i];
        }
    }
    return r;
}

struct RecurrenceLd {
    std::vector<real> alpha, beta;
};

RecurrenceLd recurrence_from_gram_ld(const std::vector<real>& gram, int order) {
    const int n = order + 1;
    const auto R = cholesky_upper(gram, n, order);
    auto at = [&](int i, int j) { return R[static_cast<std::size_t>(i) * n + j]; };

    RecurrenceLd rc;
    rc.alpha.resize(order);
    rc.beta.resize(std::max(order - 1, 0));
    // 1-based Golub-Welsch relation with r_{0,0} = 1, r_{0,1} = 0 folds into
    // the first row below (0-based indexing into R).
    rc.alpha[0] = at(0, 1) / at(0, 0);
    if (order > 1) rc.beta[0] = std::pow(at(1, 1) / at(0, 0), 2.0L);
    for (int i = 2; i < order; ++i) {
        rc.alpha[i - 1] = at(i - 1, i) / at(i - 1, i - 1) - at(i - 2, i - 1) / at(i - 2, i - 2);
        rc.beta[i - 1] = std::pow(at(i, i) / at(i - 1, i - 1), 2.0L);
    }
    if (order > 1)
        rc.alpha[order - 1] =
            at(order - 1, order) / at(order - 1, order - 1) - at(order - 2, order - 1) / at(order - 2, order - 2);
    return rc;
}

// QL with implicit shifts on (d, e); z carries the first row of the
// accumulated rotation product, so z_i^2 lands on the Gauss weights.
void ql_implicit(std::vector<real>& d, std::vector<real>& e, std::vector<real>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    e.push_back(0.0L);
    const real eps = std::numeric_limits<real>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const real dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iter > 60)
                    throw std::runtime_error("tridiagonal_eigen: QL failed to converge");
                real g = (d[l + 1] - d[l]) / (2.0L * e[l]);
                real r = hypot2(g, 1.0L);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0L ? std::fabs(r) : -std::fabs(r)));
                real s = 1.0L, c = 1.0L, p = 0.0L;
                int i;
                for (i = m - 1; i >= l; --i) {
                    real f = s * e[i];
                    const real b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0L) {
                        d[i + 1] -= p;
                        e[m] = 0.0L;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0L * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0L && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0L;
            }
        } while (m != l);
    }
    e.pop_back();
}

std::vector<real> gram_ld(const DistributionSpec& spec, int order) {
    const int n = order + 1;
    std::vector<real> moments(static_cast<std::size_t>(2 * order) + 1);
    for (int k = 0; k <= 2 * order; ++k) moments[k] = detail::raw_moment_ld(spec, k);
    std::vector<real> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i) * n + j] = moments[i + j];
    return m;
}

void check_order(int order) {
    if (order < 1) throw std::invalid_argument("quadrature: order N must be >= 1");
    if (order > kMaxQuadratureOrder)
        throw std::invalid_argument("quadrature: order N = " + std::to_string(order) +
                                    " exceeds the supported cap N <= " +
                                    std::to_string(kMaxQuadratureOrder));
}

}  // namespace

std::vector<double> gram_matrix(const DistributionSpec& spec, int order) {
    check_order(order);
    const auto m = gram_ld(spec, order);
    return {m.begin(), m.end()};
}

RecurrenceCoefficients recurrence_coefficients(const std::vector<double>& gram, int order) {
    check_order(order);
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    if (gram.size() != n * n)
        throw std::invalid_argument("recurrence_coefficients: Gram matrix size mismatch");
    const std::vector<real> m(gram.begin(), gram.end());
    const auto rc = recurrence_from_gram_ld(m, order);
    RecurrenceCoefficients out;
    out.alpha.assign(rc.alpha.begin(), rc.alpha.end());
    out.beta.assign(rc.beta.begin(), rc.beta.end());
    return out;
}

TridiagonalMatrix jacobi_matrix(const RecurrenceCoefficients& coeffs) {
    TridiagonalMatrix j;
    j.diag = coeffs.alpha;
    j.off.resize(coeffs.beta.size());
    for (std::size_t i = 0; i < coeffs.beta.size(); ++i) {
        if (!(coeffs.beta[i] > 0.0))
            throw std::invalid_argument("jacobi_matrix: beta_" + std::to_string(i + 1) +
                                        " must be positive");
        j.off[i] = std::sqrt(coeffs.beta[i]);
    }
    return j;
}

void tridiagonal_eigen(const TridiagonalMatrix& jm, std::vector<double>& eigenvalues,
                       std::vector<double>& first_component_sq) {
    const std::size_t n = jm.diag.size();
    if (jm.off.size() + 1 != n)
        throw std::invalid_argument("tridiagonal_eigen: off-diagonal size mismatch");
    std::vector<real> d(jm.diag.begin(), jm.diag.end());
    std::vector<real> e(jm.off.begin(), jm.off.end());
    std::vector<real> z(n, 0.0L);
    z[0] = 1.0L;
    ql_implicit(d, e, z);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    eigenvalues.resize(n);
    first_component_sq.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        eigenvalues[k] = static_cast<double>(d[idx[k]]);
        first_component_sq[k] = static_cast<double>(z[idx[k]] * z[idx[k]]);
    }
}

QuadratureRule quadrature_rule(const DistributionSpec& spec, int order) {
    check_order(order);
    spec.validate();

    QuadratureRule rule;
    rule.source = spec;
    rule.order = order;

    if (spec.is_degenerate()) {
        // Rank-1 Gram: the one-point rule is exact for every order.
        rule.nodes = {spec.theta0};
        rule.weights = {1.0};
        rule.order = 1;
        return rule;
    }

    // Normal rules come from the standard normal and get affinely mapped,
    // which sidesteps the conditioning of off-centred moment matrices.
    const bool affine_normal = spec.family == DistFamily::NormalAffine;
    const DistributionSpec base =
        affine_normal ? DistributionSpec::normal_affine(0.0, 1.0) : spec;

    const auto gram = gram_ld(base, order);
    const auto rc = recurrence_from_gram_ld(gram, order);

    std::vector<real> d = rc.alpha;
    std::vector<real> e = rc.beta;
    for (auto& b : e) {
        if (!(b > 0.0L))
            throw conditioning_error("quadrature: nonpositive beta for order N = " +
                                     std::to_string(order) + "; use a smaller N");
        b = std::sqrt(b);
    }
    std::vector<real> z(d.size(), 0.0L);
    z[0] = 1.0L;
    ql_implicit(d, e, z);

    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b2) { return d[a] < d[b2]; });

    rule.nodes.resize(d.size());
    rule.weights.resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        double node = static_cast<double>(d[idx[k]]);
        if (affine_normal) node = spec.mu + spec.s * node;
        rule.nodes[k] = node;
        rule.weights[k] = static_cast<double>(z[idx[k]] * z[idx[k]]);
    }
    return rule;
}

}  // namespace randiff
