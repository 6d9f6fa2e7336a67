#pragma once

// Error-rate functions: the smallest Hamming distortion 1 - tr(D_X P_{Xhat|X})
// achievable by a channel whose information measure stays within a budget.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pibounds/dist.hpp"
#include "pibounds/report.hpp"

namespace pibounds {

/// Shannon entropy in bits, 0 log 0 = 0.
double entropy_bits(const ProbabilityVector& p);

/// h_b(d) in bits.
double binary_entropy_bits(double d);

struct FanoResult {
    /// Solution of h_b(d) + d log2(M - 1) = max(H(p) - theta, 0) on [0, 1 - 1/M].
    double d_star = 0.0;
    /// Set when p has a single entry; d_star is then 0 by convention.
    bool degenerate_support = false;
};

/// Lower bound on the error-rate function for mutual information (bits). M is
/// the length of p.
FanoResult fano_error_rate(const ProbabilityVector& p, double theta_bits);

struct SolverParams {
    /// Factor by which the barrier weight grows between centering steps.
    double mu = 10.0;
    /// Stop once (number of inequalities) / t falls below this.
    double gap_tolerance = 1e-7;
    double initial_t = 1.0;
    /// Newton decrement^2 / 2 at which centering stops.
    double newton_tolerance = 1e-9;
    std::size_t max_newton_steps = 200;
    std::size_t max_outer_steps = 64;
    /// Starting weight on the identity channel before backtracking.
    double initial_identity_weight = 0.5;
};

struct JkSolution {
    /// Program objective at the final iterate minus the duality-gap bound.
    double lower_bound = 0.0;
    /// Objective at the final (feasible) iterate.
    double objective = 0.0;
    double gap = 0.0;
    /// Final channel P_{Xhat|X}.
    Eigen::MatrixXd channel;
    std::size_t newton_steps = 0;
    /// Cleared when centering or the outer loop hit its iteration limit.
    bool converged = true;
    /// Set when the constraint admits no strictly feasible point; the optimum
    /// is then known in closed form.
    bool degenerate = false;
};

/// Lower bound on e_{J_k}(p, theta) from the convex program
///   min 1 - sum_i p(i) P(i|i)
///   s.t. sum_{i<=k} sum_j p(i) P(j|i)^2 / y_j <= theta + 1,
///        y_j = sum_i p(i) P(j|i),  P row-stochastic,
/// solved with a log-barrier interior-point method.
JkSolution jk_error_rate_lower(const ProbabilityVector& p, double theta, std::size_t k,
                               const SolverParams& params = {});

/// Constraint function sum_{i<=k} sum_j p(i) P(j|i)^2 / y_j.
double jk_constraint_value(const ProbabilityVector& p, const Eigen::MatrixXd& channel, std::size_t k);

/// True iff p majorizes q: equal totals and every prefix sum of sorted p
/// dominates that of sorted q, each within 1e-9. Throws LengthMismatch.
bool majorizes(const ProbabilityVector& p, const ProbabilityVector& q);

/// A lower bound L(p, theta) under test for Schur-concavity.
struct NamedBound {
    std::string name;
    std::function<double(const ProbabilityVector&, double)> fn;
};

struct MajorizationPair {
    /// The more concentrated vector.
    ProbabilityVector p;
    ProbabilityVector q;
};

/// Checks fn(q, theta) >= fn(p, theta) - 1e-9 over all pairs. Throws
/// NotAMajorizationPair when p does not majorize q.
OracleReport schur_probe(const NamedBound& bound, const std::vector<MajorizationPair>& pairs, double theta);

/// q = sum_i weights[i] * (p permuted by permutations[i]), returned sorted.
/// Majorized by p by construction.
ProbabilityVector mix_permutations(const ProbabilityVector& p, const std::vector<double>& weights,
                                   const std::vector<std::vector<std::size_t>>& permutations);

/// Random majorization pair with p drawn on m points and q from `terms`
/// random permutations of p.
MajorizationPair random_majorization_pair(std::size_t m, std::size_t terms, Rng& rng);

}  // namespace pibounds
