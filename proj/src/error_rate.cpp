#include "pibounds/error_rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "householder.hpp"
#include "pibounds/error.hpp"

namespace pibounds {

double entropy_bits(const ProbabilityVector& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

double binary_entropy_bits(double d) {
    if (d <= 0.0 || d >= 1.0) return 0.0;
    return -d * std::log2(d) - (1.0 - d) * std::log2(1.0 - d);
}

FanoResult fano_error_rate(const ProbabilityVector& p, double theta_bits) {
    if (!(theta_bits >= 0.0)) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
    const std::size_t M = p.size();
    if (M == 1) return {0.0, true};

    const double target = std::max(entropy_bits(p) - theta_bits, 0.0);
    const double log_rest = std::log2(static_cast<double>(M - 1));
    const auto lhs = [&](double d) { return binary_entropy_bits(d) + d * log_rest; };

    // lhs is increasing on [0, 1 - 1/M], from 0 to log2 M.
    double lo = 0.0;
    double hi = 1.0 - 1.0 / static_cast<double>(M);
    if (target <= 0.0) return {0.0, false};
    // lhs is flat at its maximum log2 M, so rounding in H(p) of a few ulps would
    // otherwise move d* by ~1e-8.
    if (target >= std::log2(static_cast<double>(M)) * (1.0 - 8.0 * std::numeric_limits<double>::epsilon()))
        return {hi, false};
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (lhs(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), false};
}

namespace {

// State of the barrier problem for one channel. Variables are P(i, j).
struct JkProblem {
    const Eigen::VectorXd& p;
    Eigen::VectorXd w;  // p(i) on the first k rows, 0 below
    double budget;      // theta + 1
    Eigen::Index m;

    double objective(const Eigen::MatrixXd& P) const { return 1.0 - (p.array() * P.diagonal().array()).sum(); }

    double constraint(const Eigen::MatrixXd& P) const {
        const Eigen::VectorXd y = P.transpose() * p;
        const Eigen::VectorXd a = P.cwiseAbs2().transpose() * w;
        double g = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) g += a(j) / y(j);
        return g;
    }

    bool interior(const Eigen::MatrixXd& P) const {
        return (P.array() > 0.0).all() && constraint(P) < budget;
    }

    double barrier(const Eigen::MatrixXd& P, double t) const {
        return t * objective(P) - P.array().log().sum() - std::log(budget - constraint(P));
    }
};

}  // namespace

double jk_constraint_value(const ProbabilityVector& p, const Eigen::MatrixXd& channel, std::size_t k) {
    const auto m = static_cast<Eigen::Index>(p.size());
    if (channel.rows() != m || channel.cols() != m)
        throw Error(ErrorCode::ShapeMismatch, "channel must be m x m");
    const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.entries().data(), m);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(static_cast<Eigen::Index>(k), m); ++i) w(i) = pv(i);
    const Eigen::VectorXd y = channel.transpose() * pv;
    const Eigen::VectorXd a = channel.cwiseAbs2().transpose() * w;
    double g = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (a(j) > 0.0) g += a(j) / y(j);
    }
    return g;
}

JkSolution jk_error_rate_lower(const ProbabilityVector& p, double theta, std::size_t k, const SolverParams& params) {
    const auto m = static_cast<Eigen::Index>(p.size());
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "need at least two symbols");
    if (!(theta >= 0.0)) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
    if (k < 1 || k > p.size() - 1)
        throw Error(ErrorCode::KOutOfRange, "k must lie in [1, " + std::to_string(p.size() - 1) + "]");

    const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.entries().data(), m);
    JkProblem prob{pv, Eigen::VectorXd::Zero(m), theta + 1.0, m};
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) prob.w(i) = pv(i);

    JkSolution out;
    const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(m, m, 1.0 / static_cast<double>(m));

    // With every row equal, y = p-weighted row and g = sum_{i<=k} p(i). If that
    // already uses the whole budget, no strictly feasible channel exists and
    // the only feasible channels have identical rows on the support of p.
    if (prob.budget - prob.constraint(uniform) <= 1e-12) {
        out.degenerate = true;
        out.objective = 1.0 - p.max();
        out.lower_bound = out.objective;
        out.channel = Eigen::MatrixXd::Zero(m, m);
        const auto best = static_cast<Eigen::Index>(std::max_element(p.begin(), p.end()) - p.begin());
        out.channel.col(best).setOnes();
        return out;
    }

    double eps = params.initial_identity_weight;
    Eigen::MatrixXd P = (1.0 - eps) * uniform + eps * Eigen::MatrixXd::Identity(m, m);
    while (!prob.interior(P)) {
        eps *= 0.5;
        P = (1.0 - eps) * uniform + eps * Eigen::MatrixXd::Identity(m, m);
    }

    // Row sums stay at one along directions Z z, Z block diagonal with an
    // orthonormal basis of the zero-sum subspace in each row.
    const Eigen::MatrixXd q = detail::orthogonal_complement(
        Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m))));
    const Eigen::Index nv = m * m;
    const Eigen::Index nz = m * (m - 1);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(nv, nz);
    // Variable index: i + m * j (column-major, matching Eigen storage).
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index c = 0; c < m - 1; ++c) Z(i + m * j, i * (m - 1) + c) = q(j, c);
        }
    }

    const double n_ineq = static_cast<double>(nv + 1);
    double t = params.initial_t;
    Eigen::VectorXd grad(nv);
    Eigen::MatrixXd hess(nv, nv);
    Eigen::VectorXd gg(nv);

    for (std::size_t outer = 0;; ++outer) {
        bool centered = false;
        for (std::size_t step = 0; step < params.max_newton_steps; ++step) {
            const Eigen::VectorXd y = P.transpose() * pv;
            const Eigen::VectorXd a = P.cwiseAbs2().transpose() * prob.w;
            double g = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) g += a(j) / y(j);
            const double s = prob.budget - g;

            hess.setZero();
            for (Eigen::Index j = 0; j < m; ++j) {
                const double yj = y(j);
                const Eigen::VectorXd u = prob.w.cwiseProduct(P.col(j));
                gg.segment(m * j, m) = (2.0 / yj) * u - (a(j) / (yj * yj)) * pv;
                hess.block(m * j, m * j, m, m) = (2.0 / yj) * Eigen::MatrixXd(prob.w.asDiagonal()) -
                                                 (2.0 / (yj * yj)) * (u * pv.transpose() + pv * u.transpose()) +
                                                 (2.0 * a(j) / (yj * yj * yj)) * pv * pv.transpose();
            }
            hess /= s;
            hess.noalias() += (gg * gg.transpose()) / (s * s);
            grad = gg / s;
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    const Eigen::Index v = i + m * j;
                    const double x = P(i, j);
                    grad(v) -= 1.0 / x;
                    hess(v, v) += 1.0 / (x * x);
                }
                grad(i + m * i) -= t * pv(i);
            }

            const Eigen::VectorXd rg = Z.transpose() * grad;
            const Eigen::MatrixXd rh = Z.transpose() * hess * Z;
            const Eigen::VectorXd dz = rh.ldlt().solve(-rg);
            const double decrement2 = -rg.dot(dz);
            ++out.newton_steps;
            if (!(decrement2 / 2.0 > params.newton_tolerance)) {
                centered = true;
                break;
            }

            const Eigen::VectorXd dx = Z * dz;
            const Eigen::MatrixXd D = Eigen::Map<const Eigen::MatrixXd>(dx.data(), m, m);
            double step_size = 1.0;
            while (step_size > 1e-16 && !prob.interior(P + step_size * D)) step_size *= 0.5;
            const double phi = prob.barrier(P, t);
            const double slope = grad.dot(dx);
            double phi_new = prob.barrier(P + step_size * D, t);
            while (step_size > 1e-16 && phi_new > phi + 0.25 * step_size * slope) {
                step_size *= 0.5;
                phi_new = prob.barrier(P + step_size * D, t);
            }
            // Inside the quadratic region a full step is always accepted in
            // exact arithmetic. A damped step there means the direction is
            // limited by rounding and the iterate is as centered as it gets.
            const bool stalled = step_size < 1.0 || phi - phi_new <= 1e-14 * std::max(1.0, std::abs(phi));
            if (stalled && decrement2 / 2.0 < 1e-6) {
                centered = true;
                break;
            }
            if (step_size <= 1e-16) break;
            P += step_size * D;
        }
        if (!centered) out.converged = false;

        if (n_ineq / t < params.gap_tolerance) break;
        if (outer + 1 >= params.max_outer_steps) {
            out.converged = false;
            break;
        }
        t *= params.mu;
    }

    out.channel = P;
    out.objective = prob.objective(P);
    out.gap = n_ineq / t;
    out.lower_bound = out.objective - out.gap;
    return out;
}

bool majorizes(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "majorization needs equal lengths");
    const ProbabilityVector ps = p.sorted();
    const ProbabilityVector qs = q.sorted();
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        sp += ps[i];
        sq += qs[i];
        if (sp < sq - 1e-9) return false;
    }
    return std::abs(sp - sq) <= 1e-9;
}

OracleReport schur_probe(const NamedBound& bound, const std::vector<MajorizationPair>& pairs, double theta) {
    OracleReport report;
    report.subject = "schur:" + bound.name;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [p, q] = pairs[i];
        if (!majorizes(p, q))
            throw Error(ErrorCode::NotAMajorizationPair, "pair " + std::to_string(i) + " is not ordered");
        report.add({bound.name, i, bound.fn(q, theta), bound.fn(p, theta), Certificate::Relation::AtLeast, 1e-9});
    }
    return report;
}

ProbabilityVector mix_permutations(const ProbabilityVector& p, const std::vector<double>& weights,
                                   const std::vector<std::vector<std::size_t>>& permutations) {
    if (weights.size() != permutations.size())
        throw Error(ErrorCode::LengthMismatch, "one weight per permutation");
    const ProbabilityVector w(weights);
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t t = 0; t < permutations.size(); ++t) {
        const auto& perm = permutations[t];
        if (perm.size() != p.size()) throw Error(ErrorCode::LengthMismatch, "permutation length");
        std::vector<bool> seen(p.size(), false);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            if (perm[i] >= p.size() || seen[perm[i]])
                throw Error(ErrorCode::InvalidArgument, "not a permutation");
            seen[perm[i]] = true;
            q[i] += w[t] * p[perm[i]];
        }
    }
    return ProbabilityVector(std::move(q)).sorted();
}

MajorizationPair random_majorization_pair(std::size_t m, std::size_t terms, Rng& rng) {
    if (m == 0 || terms == 0) throw Error(ErrorCode::InvalidArgument, "need m >= 1 and terms >= 1");
    ProbabilityVector p = random_probability_vector(m, rng).sorted();
    const ProbabilityVector w = random_probability_vector(terms, rng);
    std::vector<std::vector<std::size_t>> perms(terms, std::vector<std::size_t>(m));
    for (auto& perm : perms) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    ProbabilityVector q = mix_permutations(p, {w.begin(), w.end()}, perms);
    return {std::move(p), std::move(q)};
}

}  // namespace pibounds
