#include "pibounds/inertia.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "householder.hpp"
#include "pibounds/error.hpp"

namespace pibounds {

namespace {

Eigen::VectorXd as_eigen(const ProbabilityVector& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.entries().data(), static_cast<Eigen::Index>(p.size()));
}

// D_X^{-1/2} (P - p_X p_Y^T) D_Y^{-1/2}
Eigen::MatrixXd centered_normalized(const JointDistribution& joint) {
    const Eigen::VectorXd px = as_eigen(joint.row_marginal());
    const Eigen::VectorXd py = as_eigen(joint.col_marginal());
    Eigen::MatrixXd s = joint.matrix() - px * py.transpose();
    return px.cwiseSqrt().cwiseInverse().asDiagonal() * s * py.cwiseSqrt().cwiseInverse().asDiagonal();
}

}  // namespace

Eigen::MatrixXd InertiaDecomposition::reconstruct() const {
    return left_factor * sigma.asDiagonal() * right_factor.transpose();
}

void require_full_support(const JointDistribution& joint) {
    for (std::size_t i = 0; i < joint.row_marginal().size(); ++i) {
        if (!(joint.row_marginal()[i] > 0.0)) throw Error(ErrorCode::ZeroMarginal, "p_X(" + std::to_string(i) + ") = 0");
    }
    for (std::size_t j = 0; j < joint.col_marginal().size(); ++j) {
        if (!(joint.col_marginal()[j] > 0.0)) throw Error(ErrorCode::ZeroMarginal, "p_Y(" + std::to_string(j) + ") = 0");
    }
}

InertiaDecomposition decompose(const JointDistribution& joint) {
    require_full_support(joint);
    const Eigen::Index m = joint.rows();
    const Eigen::Index n = joint.cols();
    const Eigen::Index d = std::min(m, n) - 1;

    const Eigen::VectorXd px = as_eigen(joint.row_marginal());
    const Eigen::VectorXd py = as_eigen(joint.col_marginal());
    const Eigen::VectorXd sx = px.cwiseSqrt();
    const Eigen::VectorXd sy = py.cwiseSqrt();

    Eigen::MatrixXd u(m, d + 1);
    Eigen::MatrixXd v(n, d + 1);
    Eigen::VectorXd sigma(d + 1);
    u.col(0) = sx;
    v.col(0) = sy;
    sigma(0) = 1.0;

    InertiaDecomposition out;
    out.lambdas.resize(static_cast<std::size_t>(d));
    if (d > 0) {
        const Eigen::MatrixXd qx = detail::orthogonal_complement(sx);
        const Eigen::MatrixXd qy = detail::orthogonal_complement(sy);
        const Eigen::MatrixXd reduced = qx.transpose() * centered_normalized(joint) * qy;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& values = svd.singularValues();
        for (Eigen::Index i = 0; i < d; ++i) {
            double s = values(i);
            if (s < kSingularValueFloor) s = 0.0;
            if (s > 1.0) s = 1.0;
            sigma(i + 1) = s;
            out.lambdas[static_cast<std::size_t>(i)] = s * s;
        }
        u.rightCols(d) = qx * svd.matrixU().leftCols(d);
        v.rightCols(d) = qy * svd.matrixV().leftCols(d);
    }

    out.left_factor = sx.asDiagonal() * u;
    out.right_factor = sy.asDiagonal() * v;
    out.sigma = std::move(sigma);
    return out;
}

std::vector<double> normalized_singular_values(const JointDistribution& joint) {
    require_full_support(joint);
    const Eigen::VectorXd px = as_eigen(joint.row_marginal());
    const Eigen::VectorXd py = as_eigen(joint.col_marginal());
    const Eigen::MatrixXd s0 =
        px.cwiseSqrt().cwiseInverse().asDiagonal() * joint.matrix() * py.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s0);
    const Eigen::VectorXd& values = svd.singularValues();
    return {values.data(), values.data() + values.size()};
}

double k_correlation(const InertiaDecomposition& decomposition, std::size_t k) {
    if (k < 1 || k > decomposition.dimension()) {
        throw Error(ErrorCode::KOutOfRange,
                    "k = " + std::to_string(k) + " with d = " + std::to_string(decomposition.dimension()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += decomposition.lambdas[i];
    return total;
}

double k_correlation(const JointDistribution& joint, std::size_t k) {
    return k_correlation(decompose(joint), k);
}

double maximal_correlation(const InertiaDecomposition& decomposition) {
    return decomposition.lambdas.empty() ? 0.0 : std::sqrt(decomposition.lambdas.front());
}

double chi_squared_direct(const JointDistribution& joint) {
    require_full_support(joint);
    double chi2 = 0.0;
    for (Eigen::Index i = 0; i < joint.rows(); ++i) {
        const double px = joint.row_marginal()[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < joint.cols(); ++j) {
            const double expected = px * joint.col_marginal()[static_cast<std::size_t>(j)];
            const double diff = joint(i, j) - expected;
            chi2 += diff * diff / expected;
        }
    }
    return chi2;
}

double mutual_information_bits(const JointDistribution& joint) {
    double mi = 0.0;
    for (Eigen::Index i = 0; i < joint.rows(); ++i) {
        const double px = joint.row_marginal()[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < joint.cols(); ++j) {
            const double p = joint(i, j);
            if (p > 0.0) mi += p * std::log2(p / (px * joint.col_marginal()[static_cast<std::size_t>(j)]));
        }
    }
    return std::max(mi, 0.0);
}

double total_inertia_spatial(const JointDistribution& joint) {
    require_full_support(joint);
    const Eigen::VectorXd px = as_eigen(joint.row_marginal());
    const Eigen::VectorXd py = as_eigen(joint.col_marginal());
    const Eigen::MatrixXd profiles = conditional_of_y(joint).matrix();
    const Eigen::MatrixXd centered = profiles - Eigen::VectorXd::Ones(joint.rows()) * py.transpose();
    const Eigen::MatrixXd metric = py.cwiseInverse().asDiagonal();
    return (px.asDiagonal() * centered * metric * centered.transpose()).trace();
}

// ---------------------------------------------------------------------------
// Alternating conditional expectations

namespace {

// Centers f under weights w and scales it to unit second moment. Returns the
// pre-scaling standard deviation.
double standardize(Eigen::VectorXd& f, const Eigen::VectorXd& w) {
    f.array() -= w.dot(f);
    const double sd = std::sqrt(std::max(w.dot(f.cwiseProduct(f)), 0.0));
    if (sd > 0.0) f /= sd;
    return sd;
}

constexpr double kDegenerateSpread = 1e-12;

}  // namespace

AceResult ace_maxcorr(const JointDistribution& joint, const AceOptions& options) {
    require_full_support(joint);
    const Eigen::VectorXd px = as_eigen(joint.row_marginal());
    const Eigen::VectorXd py = as_eigen(joint.col_marginal());
    const Eigen::MatrixXd& p = joint.matrix();
    const Eigen::Index m = joint.rows();

    AceResult result;
    if (m < 2 || joint.cols() < 2) return result;

    // E[f(X) | Y] and E[g(Y) | X]
    const auto given_y = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd {
        return (p.transpose() * f).cwiseQuotient(py);
    };
    const auto given_x = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd { return (p * g).cwiseQuotient(px); };

    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    f(0) = 1.0;
    standardize(f, px);
    Eigen::VectorXd g = given_y(f);
    if (standardize(g, py) < kDegenerateSpread) {
        result.used_random_start = true;
        Rng rng = instance_rng(options.seed, 0, 0x616365);
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < m; ++i) f(i) = normal(rng);
        standardize(f, px);
        g = given_y(f);
        if (standardize(g, py) < kDegenerateSpread) return result;
    }

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        Eigen::VectorXd back = given_x(g);
        back.array() -= px.dot(back);
        const double rho = std::sqrt(std::max(px.dot(back.cwiseProduct(back)), 0.0));
        // At a fixed point E[g(Y) | X] = rho f.
        const Eigen::VectorXd r = back - rho * f;
        result.residual = std::sqrt(px.dot(r.cwiseProduct(r)));
        result.iterations = it;
        if (rho < kDegenerateSpread) {
            result.correlation = 0.0;
            return result;
        }
        result.correlation = rho;
        f = back / rho;
        if (result.residual <= options.tolerance) return result;
        g = given_y(f);
        if (standardize(g, py) < kDegenerateSpread) {
            result.correlation = 0.0;
            return result;
        }
    }
    throw Error(ErrorCode::NoConvergence, "ACE residual " + std::to_string(result.residual) + " after " +
                                              std::to_string(options.max_iterations) + " iterations");
}

}  // namespace pibounds
