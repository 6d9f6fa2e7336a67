#pragma once

// Exact ground truth (Bayes errors) and seeded sweeps that certify the bounds
// and structural properties against it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pibounds/dist.hpp"
#include "pibounds/report.hpp"

namespace pibounds {

/// 1 - sum_j max_i p(i, j), the error of the maximum-likelihood estimator.
double bayes_error(const JointDistribution& joint);

/// Bayes error of estimating f(X) from Y.
double function_bayes_error(const JointDistribution& joint, const Surjection& f);

/// Componentwise lambda_i(J) >= lambda_i(F J) - 1e-9, shorter list padded with
/// zeros. Zero-mass rows and columns are dropped before decomposing.
OracleReport dpi_verify(const JointDistribution& joint, const DegradationMap& map);

/// J_k(p, t W0 + (1-t) W1) <= t J_k(p, W0) + (1-t) J_k(p, W1) + 1e-9 for each t.
OracleReport convexity_probe(const ProbabilityVector& p, const StochasticMatrix& w0, const StochasticMatrix& w1,
                             const std::vector<double>& t_grid, std::size_t k);

/// Runs `body(i)` for i in [0, count) on up to `jobs` threads and merges the
/// reports in index order, so the result does not depend on `jobs`.
OracleReport run_instances(std::string subject, std::size_t count, std::size_t jobs,
                           const std::function<OracleReport(std::size_t)>& body);

struct SweepOptions {
    std::uint64_t seed = 42;
    std::size_t instances = 0;
    std::size_t jobs = 1;
};

// Seeded sweeps. Instance i of each sweep draws only from
// instance_rng(seed, i, <sweep stream>).

/// theorem3_bound(p_X, lambda(J)) <= bayes_error(J); m, n in [2, 6].
OracleReport soundness_sweep(const SweepOptions& options);
/// lambda = 1 gives bound 0, lambda = 0 gives 1 - p(1).
OracleReport remark_sweep(const SweepOptions& options);
/// LP primal = dual = f0_star.
OracleReport lp_duality_sweep(const SweepOptions& options);
/// sigma_0 = 1, J_d = chi^2 = spatial trace, ACE = sqrt(lambda_1).
OracleReport decomposition_sweep(const SweepOptions& options);
OracleReport dpi_sweep(const SweepOptions& options);
/// Nine mixture points, k in {1, d}.
OracleReport convexity_sweep(const SweepOptions& options);
/// Fano bound on mixed-permutation pairs, theta in {0, H/4, H/2}.
OracleReport schur_sweep(const SweepOptions& options);
/// peM_bruteforce >= peM_bound for both measures, m <= 5, M in {2, 3}.
OracleReport function_bound_sweep(const SweepOptions& options);
/// theorem3_bound with constant lambda equals the optimized maxcorr corollary.
OracleReport corollary_collapse_sweep(const SweepOptions& options);

/// Joint pmf drawn as a symmetric Dirichlet over all m * n cells.
JointDistribution draw_joint(std::size_t m, std::size_t n, Rng& rng, double concentration = 1.0);

}  // namespace pibounds
