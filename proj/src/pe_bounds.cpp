#include "pibounds/pe_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pibounds/error.hpp"
#include "pibounds/inertia.hpp"

namespace pibounds {

namespace {

constexpr double kLambdaTolerance = 1e-9;
// p(k) >= p^T p is decided with this slack so that uniform inputs land on k* = m
// despite rounding in p^T p. The value of f0_star does not depend on the choice
// at an exact tie.
constexpr double kKstarSlack = 1e-12;

void require_canonical(const ProbabilityVector& p) {
    if (!p.is_canonical()) throw Error(ErrorCode::NotCanonical, "p must be sorted non-increasing");
}

std::vector<double> validate_lambdas(std::vector<double> lambdas) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        double& l = lambdas[i];
        if (!std::isfinite(l) || l < -kLambdaTolerance || l > 1.0 + kLambdaTolerance) {
            throw Error(ErrorCode::InvalidInertias, "lambda_" + std::to_string(i + 1) + " outside [0, 1]");
        }
        l = std::clamp(l, 0.0, 1.0);
        if (i > 0 && l > lambdas[i - 1] + kInternalTolerance) {
            throw Error(ErrorCode::InvalidInertias, "inertias must be non-increasing");
        }
    }
    return lambdas;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// InertiaBoundInput

InertiaBoundInput::InertiaBoundInput(ProbabilityVector p, std::vector<double> lambdas)
    : p_(std::move(p)), lambdas_(validate_lambdas(std::move(lambdas))) {
    require_canonical(p_);
    if (lambdas_.size() != p_.size() - 1) {
        throw Error(ErrorCode::InvalidInertias, "expected " + std::to_string(p_.size() - 1) + " inertias, got " +
                                                    std::to_string(lambdas_.size()));
    }
}

InertiaBoundInput::InertiaBoundInput(ProbabilityVector p, std::vector<double> lambdas, InertiaCompletion completion)
    : p_(std::move(p)), lambdas_(validate_lambdas(std::move(lambdas))) {
    require_canonical(p_);
    const std::size_t d = p_.size() - 1;
    if (lambdas_.size() > d) {
        throw Error(ErrorCode::InvalidInertias, "more than m - 1 inertias supplied");
    }
    if (completion == InertiaCompletion::ReplicateLargest) {
        if (lambdas_.empty()) throw Error(ErrorCode::InvalidInertias, "nothing to replicate");
        lambdas_.assign(d, lambdas_.front());
    } else {
        lambdas_.resize(d, 0.0);
    }
}

InertiaBoundInput InertiaBoundInput::from_joint(const JointDistribution& joint) {
    const auto decomposition = decompose(joint);
    return InertiaBoundInput(joint.row_marginal().sorted(), decomposition.lambdas, InertiaCompletion::PadWithZeros);
}

double InertiaBoundInput::lambda(std::size_t i) const noexcept {
    if (i == 0) return 1.0;
    if (i >= p_.size()) return 0.0;
    return lambdas_[i - 1];
}

Bound Bound::clamped(double raw) {
    return Bound{raw, std::clamp(raw, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// f0 and its minimum over alpha

std::size_t kstar(const ProbabilityVector& p) {
    require_canonical(p);
    const double s = p.sum_of_squares();
    std::size_t k = 1;
    for (std::size_t i = 1; i <= p.size(); ++i) {
        if (p[i - 1] >= s - kKstarSlack) k = i;
    }
    return k;
}

double f0(double alpha, const InertiaBoundInput& input) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha outside [0, 1]");
    const std::size_t m = input.m();
    const std::size_t d = m - 1;
    const double s = input.p().sum_of_squares();
    // c_i = [lambda_i - alpha]^+ for i <= d, c_{d+1} = 0
    const auto c = [&](std::size_t i) { return i <= d ? positive_part(input.lambda(i) - alpha) : 0.0; };

    double value = input.prob(1) * (c(1) + alpha) - alpha * s;
    for (std::size_t i = 2; i <= d + 1; ++i) {
        value += input.prob(i) * (input.lambda(i - 1) + c(i) - c(i - 1));
    }
    return value;
}

double f0_star(const InertiaBoundInput& input) {
    const std::size_t m = input.m();
    const std::size_t k = kstar(input.p());
    double value = 0.0;
    for (std::size_t i = 1; i <= k; ++i) value += input.lambda(i) * input.prob(i);
    for (std::size_t i = k + 1; i <= m; ++i) value += input.lambda(i - 1) * input.prob(i);
    return value - input.lambda(k) * input.p().sum_of_squares();
}

// ---------------------------------------------------------------------------
// Minimization over beta

double u0(double beta, const ProbabilityVector& p, double f) {
    double g = f;
    for (double pi : p) {
        const double excess = positive_part(pi - beta);
        g += excess * excess;
    }
    return beta + std::sqrt(std::max(g, 0.0));
}

U0Minimum minimize_u0(const ProbabilityVector& p, double f, double beta_max) {
    require_canonical(p);
    beta_max = std::max(beta_max, 0.0);
    const std::size_t m = p.size();

    std::vector<double> candidates{0.0, beta_max};
    for (double pi : p) {
        if (pi <= beta_max) candidates.push_back(pi);
    }

    // On [p(j+1), p(j)] the active set is {1..j}; g0 = f + S2 - 2 beta S1 + j beta^2
    // and the derivative of u0 vanishes where sqrt(g0) = S1 - j beta. Squaring
    // gives (j - 1) (j beta^2 - 2 S1 beta) + S1^2 - S2 - f = 0.
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        s1 += p[j - 1];
        s2 += p[j - 1] * p[j - 1];
        if (j < 2) continue;
        const double lo = j < m ? p[j] : 0.0;
        const double hi = std::min(p[j - 1], beta_max);
        if (lo >= hi) continue;
        const double jd = static_cast<double>(j);
        const double c = (s1 * s1 - s2 - f) / (jd - 1.0);
        const double disc = s1 * s1 - jd * c;
        if (disc < 0.0) continue;
        const double root = std::sqrt(disc);
        for (double beta : {(s1 - root) / jd, (s1 + root) / jd}) {
            if (beta >= lo && beta <= hi && s1 - jd * beta >= 0.0) candidates.push_back(beta);
        }
    }

    U0Minimum best{candidates.front(), u0(candidates.front(), p, f)};
    for (double beta : candidates) {
        const double value = u0(beta, p, f);
        if (value < best.value || (value == best.value && beta < best.beta)) best = {beta, value};
    }
    return best;
}

BoundResult theorem3_bound(const InertiaBoundInput& input) {
    BoundResult out;
    out.k_star = kstar(input.p());
    out.alpha_star = input.lambda(out.k_star);
    out.f0_star = f0_star(input);
    const auto minimum = minimize_u0(input.p(), out.f0_star, input.prob(2));
    out.beta_star = minimum.beta;
    out.u1 = minimum.value;
    out.raw = 1.0 - out.u1;
    out.lower_bound = std::clamp(out.raw, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Corollaries

Bound corollary_uniform_bound(std::size_t m, UniformInformation info) {
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "uniform bound needs m >= 2");
    if (!(info.value >= 0.0)) throw Error(ErrorCode::InvalidArgument, "information value must be >= 0");
    const double md = static_cast<double>(m);
    switch (info.kind) {
        case UniformInformation::Kind::ChiSquared:
            return Bound::clamped(1.0 - 1.0 / md - std::sqrt((md - 1.0) * info.value) / md);
        case UniformInformation::Kind::Lambda1:
            if (info.value > 1.0 + kLambdaTolerance) throw Error(ErrorCode::InvalidInertias, "lambda_1 > 1");
            return Bound::clamped(1.0 - 1.0 / md - std::sqrt(std::min(info.value, 1.0)) * (1.0 - 1.0 / md));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown information kind");
}

MaxCorrBound corollary_maxcorr_bound(const ProbabilityVector& p, double lambda1, std::optional<double> beta) {
    require_canonical(p);
    if (!(lambda1 >= -kLambdaTolerance && lambda1 <= 1.0 + kLambdaTolerance)) {
        throw Error(ErrorCode::InvalidInertias, "lambda_1 outside [0, 1]");
    }
    lambda1 = std::clamp(lambda1, 0.0, 1.0);
    const double spread = 1.0 - p.sum_of_squares();
    const double f = lambda1 * spread;

    MaxCorrBound out;
    if (beta) {
        if (!(*beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
        out.beta = *beta;
        out.bound = Bound::clamped(1.0 - u0(*beta, p, f));
    } else {
        const auto minimum = minimize_u0(p, f, p.size() > 1 ? p[1] : 0.0);
        out.beta = minimum.beta;
        out.bound = Bound::clamped(1.0 - minimum.value);
    }
    out.weak_closed_form = Bound::clamped(1.0 - p[0] - std::sqrt(lambda1) * std::sqrt(std::max(spread, 0.0)));
    return out;
}

double advantage_bound(const ProbabilityVector& p, double lambda1) {
    if (!(lambda1 >= -kLambdaTolerance && lambda1 <= 1.0 + kLambdaTolerance)) {
        throw Error(ErrorCode::InvalidInertias, "lambda_1 outside [0, 1]");
    }
    return std::sqrt(std::clamp(lambda1, 0.0, 1.0)) * std::sqrt(std::max(1.0 - p.sum_of_squares(), 0.0));
}

// ---------------------------------------------------------------------------
// LP oracle

BoxLpSolution solve_box_lp(std::span<const double> weights, std::span<const double> lower,
                           std::span<const double> upper, double budget) {
    if (weights.size() != lower.size() || weights.size() != upper.size()) {
        throw Error(ErrorCode::LengthMismatch, "box LP arrays differ in length");
    }
    double lower_total = 0.0, upper_total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (lower[i] > upper[i] + kInternalTolerance) {
            throw Error(ErrorCode::InfeasibleBox, "lower bound exceeds upper bound at " + std::to_string(i));
        }
        lower_total += lower[i];
        upper_total += upper[i];
    }
    if (lower_total > budget + kInternalTolerance || upper_total < budget - kInternalTolerance) {
        throw Error(ErrorCode::InfeasibleBox, "budget " + std::to_string(budget) + " outside [" +
                                                  std::to_string(lower_total) + ", " + std::to_string(upper_total) +
                                                  "]");
    }

    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

    BoxLpSolution out;
    out.x.assign(lower.begin(), lower.end());
    double remaining = std::max(budget - lower_total, 0.0);
    for (std::size_t i : order) {
        const double add = std::min(std::max(upper[i] - lower[i], 0.0), remaining);
        out.x[i] += add;
        remaining -= add;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) out.value += weights[i] * out.x[i];
    return out;
}

double lp_dual_objective(double alpha, const InertiaBoundInput& input) {
    const std::size_t m = input.m();
    double value = alpha * (input.prob(1) - input.p().sum_of_squares());
    for (std::size_t i = 1; i <= m - 1; ++i) {
        const double delta = input.prob(i) - input.prob(i + 1);
        const double gamma = input.lambda(i) * input.prob(i + 1);
        value += delta * positive_part(input.lambda(i) - alpha) + gamma;
    }
    return value;
}

LpCertificate lp_sigma_oracle(const InertiaBoundInput& input) {
    const std::size_t d = input.m() - 1;
    std::vector<double> lower(d), upper(d);
    for (std::size_t i = 1; i <= d; ++i) {
        lower[i - 1] = input.prob(i + 1);
        upper[i - 1] = input.prob(i);
    }
    const auto primal = solve_box_lp(input.lambdas(), lower, upper, 1.0 - input.p().sum_of_squares());

    LpCertificate out;
    out.primal = primal.value;
    out.sigma = primal.x;

    std::vector<double> alphas{0.0, 1.0};
    alphas.insert(alphas.end(), input.lambdas().begin(), input.lambdas().end());
    out.dual_alpha = alphas.front();
    out.dual = lp_dual_objective(out.dual_alpha, input);
    for (double alpha : alphas) {
        const double value = lp_dual_objective(alpha, input);
        if (value < out.dual) {
            out.dual = value;
            out.dual_alpha = alpha;
        }
    }

    out.f0_star = f0_star(input);
    out.consistent = std::abs(out.primal - out.dual) <= kLpAgreement &&
                     std::abs(out.primal - out.f0_star) <= kLpAgreement &&
                     std::abs(out.dual - out.f0_star) <= kLpAgreement;
    return out;
}

}  // namespace pibounds
