#include "pibounds/fn_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pibounds/error.hpp"
#include "pibounds/error_rate.hpp"

namespace pibounds {

AggregationMap aggregate_gM(const ProbabilityVector& p, std::size_t M) {
    const std::size_t m = p.size();
    if (M < 1 || M > m) throw Error(ErrorCode::MOutOfRange, "M must lie in [1, " + std::to_string(m) + "]");
    if (!p.is_canonical()) throw Error(ErrorCode::NotCanonical, "p must be sorted non-increasing");

    const std::size_t merged = m - M + 1;
    std::vector<std::size_t> image(m);
    std::vector<double> pu(M, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
        image[x] = x < merged ? 0 : x - (m - M);
        pu[image[x]] += p[x];
    }
    return {M, Surjection(std::move(image), M), ProbabilityVector(std::move(pu))};
}

Bound peM_bound(const ProbabilityVector& p, double theta, std::size_t M, FunctionMeasure measure) {
    if (!(theta >= 0.0)) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
    const AggregationMap agg = aggregate_gM(p.sorted(), M);
    switch (measure) {
        case FunctionMeasure::MutualInformation:
            return Bound::clamped(fano_error_rate(agg.p_U, theta).d_star);
        case FunctionMeasure::MaxCorrelation: {
            if (theta > 1.0) throw Error(ErrorCode::ThetaOutOfRange, "a bound on rho_m must lie in [0, 1]");
            const double spread = std::sqrt(std::max(0.0, 1.0 - agg.p_U.sum_of_squares()));
            return Bound::clamped(1.0 - agg.p_U[0] - theta * spread);
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

double stirling2(std::size_t n, std::size_t k) {
    // S(n, k) = k S(n-1, k) + S(n-1, k-1)
    std::vector<double> row(k + 1, 0.0);
    row[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = std::min(i, k); j >= 1; --j) row[j] = static_cast<double>(j) * row[j] + row[j - 1];
        row[0] = 0.0;
    }
    return row[k];
}

FunctionSearch peM_bruteforce(const JointDistribution& joint, std::size_t M, double cap) {
    const auto m = static_cast<std::size_t>(joint.rows());
    const auto n = static_cast<std::size_t>(joint.cols());
    if (M < 1 || M > m) throw Error(ErrorCode::MOutOfRange, "M must lie in [1, " + std::to_string(m) + "]");
    double count = stirling2(m, M);
    for (std::size_t i = 2; i <= M; ++i) count *= static_cast<double>(i);
    if (m > 10 || count > cap)
        throw Error(ErrorCode::TooLarge, "enumeration over " + std::to_string(m) + " symbols into " +
                                             std::to_string(M) + " classes exceeds the cap");

    const Eigen::MatrixXd& P = joint.matrix();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_image;

    // Restricted growth string: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<std::size_t> a(m, 0);
    std::vector<std::size_t> prefix_max(m, 0);
    std::vector<double> classes(M);
    const auto evaluate = [&] {
        double hit = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            std::fill(classes.begin(), classes.end(), 0.0);
            for (std::size_t x = 0; x < m; ++x) classes[a[x]] += P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
            hit += *std::max_element(classes.begin(), classes.end());
        }
        const double err = 1.0 - hit;
        if (err < best) {
            best = err;
            best_image = a;
        }
    };

    // Depth-first over positions, pruning strings that can no longer reach M classes.
    const auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == m) {
            if (prefix_max[m - 1] + 1 == M) evaluate();
            return;
        }
        const std::size_t used = prefix_max[i - 1] + 1;
        for (std::size_t c = 0; c <= std::min(used, M - 1); ++c) {
            const std::size_t now = std::max(used, c + 1);
            if (now + (m - i - 1) < M) continue;
            a[i] = c;
            prefix_max[i] = now - 1;
            self(self, i + 1);
        }
    };
    a[0] = 0;
    prefix_max[0] = 0;
    if (m == 1) {
        evaluate();
    } else {
        recurse(recurse, 1);
    }
    return {std::max(best, 0.0), Surjection(std::move(best_image), M)};
}

}  // namespace pibounds
