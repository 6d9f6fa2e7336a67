#pragma once

// Bounds on P_{e,M}: the smallest error of estimating some surjective M-ary
// function of X from Y.

#include <cstddef>

#include "pibounds/dist.hpp"
#include "pibounds/pe_bounds.hpp"

namespace pibounds {

/// g_M merges the m - M + 1 most likely outcomes into class 0 and keeps the
/// remaining M - 1 outcomes as singletons. p_U is the induced pmf, which
/// majorizes the pmf of f(X) for every M-ary surjection f.
struct AggregationMap {
    std::size_t M = 1;
    Surjection mapping;
    ProbabilityVector p_U;
};

/// p must be canonical. Throws MOutOfRange unless 1 <= M <= m.
AggregationMap aggregate_gM(const ProbabilityVector& p, std::size_t M);

enum class FunctionMeasure {
    /// theta bounds I(X;Y) in bits.
    MutualInformation,
    /// theta bounds rho_m(X;Y) (not its square).
    MaxCorrelation,
};

/// Lower bound on P_{e,M} evaluated on p_U of the sorted p.
Bound peM_bound(const ProbabilityVector& p, double theta, std::size_t M, FunctionMeasure measure);

struct FunctionSearch {
    double value = 0.0;
    Surjection argmin;
};

inline constexpr double kDefaultSurjectionCap = 1e7;

/// Exact P_{e,M} by enumerating surjections up to relabeling of the range
/// (restricted growth strings). Throws TooLarge when m > 10 or
/// S(m, M) * M! exceeds `cap`.
FunctionSearch peM_bruteforce(const JointDistribution& joint, std::size_t M, double cap = kDefaultSurjectionCap);

/// Stirling number of the second kind, as a double.
double stirling2(std::size_t n, std::size_t k);

}  // namespace pibounds
