#pragma once

#include <stdexcept>
#include <vector>

#include "randiff/distributions.hpp"

namespace randiff {

// Thrown when the moment Gram matrix stops being numerically positive
// definite (near-degenerate randomizer or N too large for the conditioning).
class conditioning_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Gauss pairs {(omega_n, theta_n)} generated from the randomizer's moments.
// Invariants: weights > 0 and sum to 1; nodes ascending, inside the support;
// sum omega_n theta_n^k reproduces raw_moment(spec, k) for k <= 2N-1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    DistributionSpec source;
    int order = 0;
};

// Three-term recurrence coefficients of the monic orthogonal polynomials of
// the randomizer's law; beta_j > 0 is required for the real symmetric
// tridiagonal reduction.
struct RecurrenceCoefficients {
    std::vector<double> alpha;  // N entries
    std::vector<double> beta;   // N-1 entries
};

struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> off;  // size diag.size() - 1
};

// Hard cap on the rule order; the Gram conditioning degrades roughly
// geometrically in N and everything in the experiments lives at N <= 9.
inline constexpr int kMaxQuadratureOrder = 20;

// (N+1)x(N+1) moment matrix, row-major; entry (i,j) = E[theta^{i+j}] (0-based).
std::vector<double> gram_matrix(const DistributionSpec& spec, int order);

// Cholesky of the Gram matrix and the Golub-Welsch ratios.
RecurrenceCoefficients recurrence_coefficients(const std::vector<double>& gram, int order);

TridiagonalMatrix jacobi_matrix(const RecurrenceCoefficients& coeffs);

// Eigenvalues (ascending) of a symmetric tridiagonal matrix together with the
// squared first components of the normalized eigenvectors. QL with implicit
// shifts; only the first eigenvector row is carried.
void tridiagonal_eigen(const TridiagonalMatrix& j, std::vector<double>& eigenvalues,
                       std::vector<double>& first_component_sq);

// Full pipeline. Degenerate specs short-circuit to the single pair
// {(1, theta0)}; NormalAffine rules are built for N(0,1) and affinely mapped.
QuadratureRule quadrature_rule(const DistributionSpec& spec, int order);

}  // namespace randiff
