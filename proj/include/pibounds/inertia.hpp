#pragma once

// Principal inertia decomposition of a joint distribution and the
// correlation measures derived from it.
//
// For P with positive marginals, D_X^{-1/2} P D_Y^{-1/2} has leading singular
// value 1 with singular vectors (sqrt(p_X), sqrt(p_Y)). The remaining squared
// singular values are the principal inertias lambda_1 >= ... >= lambda_d,
// d = min(m, n) - 1. Their partial sums are the k-correlations J_k; J_1 is the
// squared maximal correlation and J_d is the chi-squared statistic.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pibounds/dist.hpp"

namespace pibounds {

/// Singular values below this are reported as exactly zero.
inline constexpr double kSingularValueFloor = 1e-12;

struct InertiaDecomposition {
    /// Principal inertias, non-increasing, each in [0, 1].
    std::vector<double> lambdas;
    /// m x (d+1); first column is p_X and left_factor^T D_X^{-1} left_factor = I.
    Eigen::MatrixXd left_factor;
    /// n x (d+1); first column is p_Y and right_factor^T D_Y^{-1} right_factor = I.
    Eigen::MatrixXd right_factor;
    /// (1, sqrt(lambda_1), ..., sqrt(lambda_d)).
    Eigen::VectorXd sigma;

    std::size_t dimension() const noexcept { return lambdas.size(); }
    /// left_factor * diag(sigma) * right_factor^T, which reproduces P.
    Eigen::MatrixXd reconstruct() const;
};

/// Throws ZeroMarginal unless every marginal entry is positive.
void require_full_support(const JointDistribution& joint);

/// The decomposition is computed on the orthogonal complement of the trivial
/// singular pair, so the first factor columns are exactly p_X and p_Y even
/// when other singular values tie with 1.
InertiaDecomposition decompose(const JointDistribution& joint);

/// All singular values of D_X^{-1/2} P D_Y^{-1/2}, non-increasing, from a
/// dense SVD of the unreduced matrix.
std::vector<double> normalized_singular_values(const JointDistribution& joint);

/// Sum of the k largest principal inertias; 1 <= k <= d.
double k_correlation(const JointDistribution& joint, std::size_t k);
double k_correlation(const InertiaDecomposition& decomposition, std::size_t k);

/// sqrt(lambda_1), or 0 when d = 0.
double maximal_correlation(const InertiaDecomposition& decomposition);

/// sum_{i,j} (p(i,j) - p_X(i) p_Y(j))^2 / (p_X(i) p_Y(j)), without any SVD.
double chi_squared_direct(const JointDistribution& joint);

/// Mutual information in bits, with 0 log 0 = 0.
double mutual_information_bits(const JointDistribution& joint);

/// Trace of D_X C Q C^T where C = P_{Y|X} - 1 p_Y^T and Q = D_Y^{-1}: the
/// weighted moment of inertia of the conditional profiles about their
/// barycenter p_Y under the chi-square metric.
double total_inertia_spatial(const JointDistribution& joint);

struct AceOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;
    /// Seed for the random fallback start.
    std::uint64_t seed = 42;
};

struct AceResult {
    double correlation = 0.0;
    std::size_t iterations = 0;
    /// || E[g(Y) | X] - rho f ||, measured in L2(p_X), at exit.
    double residual = 0.0;
    /// Whether the start had to fall back to a random function.
    bool used_random_start = false;
};

/// Maximal correlation by alternating conditional expectations. Throws
/// NoConvergence if the residual is still above tolerance after
/// max_iterations rounds.
AceResult ace_maxcorr(const JointDistribution& joint, const AceOptions& options = {});

}  // namespace pibounds
