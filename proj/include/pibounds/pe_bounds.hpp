#pragma once

// Lower bounds on the Bayes error P_e of estimating X from Y given only the
// marginal p_X and (upper bounds on) the principal inertias of P_{X,Y}.
//
// Throughout, p is sorted non-increasing and indices in comments are 1-based
// to match the usual statement of the bound: lambda_0 = 1, lambda_m = 0.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pibounds/dist.hpp"

namespace pibounds {

/// How to extend an inertia list shorter than m - 1.
enum class InertiaCompletion {
    /// Only the leading components are known; the rest are at most 0.
    PadWithZeros,
    /// Only the maximal correlation is known; every component is at most lambda_1.
    ReplicateLargest,
};

/// Marginal p (canonical, length m) with componentwise inertia upper bounds
/// lambda_1 >= ... >= lambda_{m-1}.
class InertiaBoundInput {
public:
    /// `lambdas` must have exactly p.size() - 1 entries.
    InertiaBoundInput(ProbabilityVector p, std::vector<double> lambdas);
    InertiaBoundInput(ProbabilityVector p, std::vector<double> lambdas, InertiaCompletion completion);

    /// Canonical p_X of `joint` with its principal inertias, zero-padded.
    static InertiaBoundInput from_joint(const JointDistribution& joint);

    const ProbabilityVector& p() const noexcept { return p_; }
    std::span<const double> lambdas() const noexcept { return lambdas_; }
    std::size_t m() const noexcept { return p_.size(); }

    /// lambda_i for 0 <= i <= m with lambda_0 = 1 and lambda_m = 0.
    double lambda(std::size_t i) const noexcept;
    /// p(i) for 1 <= i <= m + 1 with p(m + 1) = 0.
    double prob(std::size_t i) const noexcept { return i <= p_.size() ? p_[i - 1] : 0.0; }

private:
    ProbabilityVector p_;
    std::vector<double> lambdas_;
};

/// A bound before and after clamping to [0, 1].
struct Bound {
    double raw = 0.0;
    double value = 0.0;

    static Bound clamped(double raw);
};

struct BoundResult {
    /// max(0, 1 - u1)
    double lower_bound = 0.0;
    /// 1 - u1 before clamping.
    double raw = 0.0;
    double beta_star = 0.0;
    double alpha_star = 0.0;
    /// 1-based.
    std::size_t k_star = 1;
    double f0_star = 0.0;
    double u1 = 1.0;
};

/// Largest 1-based k with p(k) >= p^T p. Always >= 1.
std::size_t kstar(const ProbabilityVector& p);

/// The alpha-parametrized relaxation f_0(alpha, p, lambda); alpha in [0, 1].
double f0(double alpha, const InertiaBoundInput& input);

/// min over alpha of f0, in closed form.
double f0_star(const InertiaBoundInput& input);

/// beta + sqrt(f + sum_i ([p(i) - beta]^+)^2)
double u0(double beta, const ProbabilityVector& p, double f);

struct U0Minimum {
    double beta = 0.0;
    double value = 0.0;
};

/// Exact minimum of u0 over beta in [0, beta_max]. On each interval between
/// consecutive p values the stationarity condition is a quadratic in beta, so
/// the minimum is among its roots and the breakpoints.
U0Minimum minimize_u0(const ProbabilityVector& p, double f, double beta_max);

/// P_e >= 1 - min_{0 <= beta <= p(2)} u0(beta, p, f0_star).
BoundResult theorem3_bound(const InertiaBoundInput& input);

/// What is known about a uniformly distributed X.
struct UniformInformation {
    enum class Kind { ChiSquared, Lambda1 };
    Kind kind;
    double value;
};

Bound corollary_uniform_bound(std::size_t m, UniformInformation info);

struct MaxCorrBound {
    Bound bound;
    /// The beta that produced `bound` (supplied or optimized).
    double beta = 0.0;
    /// 1 - p(1) - rho_m sqrt(1 - p^T p).
    Bound weak_closed_form;
};

/// Bound from p and lambda_1 = rho_m^2 alone. Without beta the bound is
/// optimized over [0, p(2)].
MaxCorrBound corollary_maxcorr_bound(const ProbabilityVector& p, double lambda1,
                                     std::optional<double> beta = std::nullopt);

/// Upper bound rho_m sqrt(1 - p^T p) on |1 - p(1) - P_e|.
double advantage_bound(const ProbabilityVector& p, double lambda1);

struct BoxLpSolution {
    double value = 0.0;
    std::vector<double> x;
};

/// max w^T x s.t. sum x = budget, lower <= x <= upper, by greedy filling in
/// order of decreasing weight. Throws InfeasibleBox when the box cannot meet
/// the budget.
BoxLpSolution solve_box_lp(std::span<const double> weights, std::span<const double> lower,
                           std::span<const double> upper, double budget);

struct LpCertificate {
    double primal = 0.0;
    double dual = 0.0;
    /// Minimizing alpha of the dual.
    double dual_alpha = 0.0;
    double f0_star = 0.0;
    std::vector<double> sigma;
    /// primal, dual and f0_star agree within kLpAgreement.
    bool consistent = false;
};

inline constexpr double kLpAgreement = 1e-9;

/// Solves the eigenvalue-allocation LP behind f0_star and its dual, and
/// checks both against the closed form.
LpCertificate lp_sigma_oracle(const InertiaBoundInput& input);

/// Value of the dual objective at alpha with y_i = [lambda_i - alpha]^+.
double lp_dual_objective(double alpha, const InertiaBoundInput& input);

}  // namespace pibounds
