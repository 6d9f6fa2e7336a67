#include "pibounds/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pibounds/error.hpp"

namespace pibounds {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

// Clamps entries in [-tolerance, 0) and returns the total; throws on anything worse.
template <typename Derived>
double clamp_and_sum(const Eigen::MatrixBase<Derived>& block, double tolerance) {
    auto& m = const_cast<Eigen::MatrixBase<Derived>&>(block).derived();
    double total = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            double& v = m(i, j);
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFinite, "entry (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            if (v < -tolerance) {
                std::ostringstream os;
                os << "entry (" << i << ", " << j << ") = " << v;
                throw Error(ErrorCode::NegativeMass, os.str());
            }
            if (v < 0.0) v = 0.0;
            total += v;
        }
    }
    return total;
}

std::vector<std::size_t> stable_descending_order(std::span<const double> keys) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
    return order;
}

std::vector<double> dirichlet(std::size_t k, Rng& rng, double concentration) {
    if (!(concentration > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "concentration must be positive");
    }
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> x(k);
    double total = 0.0;
    for (double& v : x) {
        v = std::max(gamma(rng), std::numeric_limits<double>::min());
        total += v;
    }
    for (double& v : x) v /= total;
    return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<double> entries, double tolerance) : p_(std::move(entries)) {
    if (p_.empty()) throw Error(ErrorCode::EmptyMatrix, "probability vector is empty");
    Eigen::Map<Eigen::MatrixXd> view(p_.data(), static_cast<Eigen::Index>(p_.size()), 1);
    const double total = clamp_and_sum(view, tolerance);
    if (std::abs(total - 1.0) > tolerance) {
        std::ostringstream os;
        os << "entries sum to " << total;
        throw Error(ErrorCode::NotNormalized, os.str());
    }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t size) {
    if (size == 0) throw Error(ErrorCode::EmptyMatrix, "uniform vector of size 0");
    return ProbabilityVector(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

bool ProbabilityVector::is_canonical() const noexcept {
    return std::is_sorted(p_.begin(), p_.end(), std::greater<>{});
}

ProbabilityVector ProbabilityVector::sorted() const {
    ProbabilityVector out = *this;
    std::stable_sort(out.p_.begin(), out.p_.end(), std::greater<>{});
    return out;
}

double ProbabilityVector::sum_of_squares() const noexcept {
    return std::inner_product(p_.begin(), p_.end(), p_.begin(), 0.0);
}

double ProbabilityVector::max() const noexcept {
    return *std::max_element(p_.begin(), p_.end());
}

// ---------------------------------------------------------------------------
// Channels and maps

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd matrix, double tolerance) : w_(std::move(matrix)) {
    if (w_.size() == 0) throw Error(ErrorCode::EmptyMatrix, "stochastic matrix is empty");
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
        const double total = clamp_and_sum(w_.row(i), tolerance);
        if (std::abs(total - 1.0) > tolerance) {
            throw Error(ErrorCode::NotNormalized, "row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

StochasticMatrix mix(const StochasticMatrix& a, const StochasticMatrix& b, double t) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "mixed channels differ in shape");
    }
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mixture weight outside [0, 1]");
    return StochasticMatrix(t * a.matrix() + (1.0 - t) * b.matrix());
}

DegradationMap::DegradationMap(Eigen::MatrixXd matrix, double tolerance) : f_(std::move(matrix)) {
    if (f_.size() == 0) throw Error(ErrorCode::EmptyMatrix, "degradation map is empty");
    for (Eigen::Index j = 0; j < f_.cols(); ++j) {
        const double total = clamp_and_sum(f_.col(j), tolerance);
        if (std::abs(total - 1.0) > tolerance) {
            throw Error(ErrorCode::NotNormalized, "column " + std::to_string(j) + " does not sum to 1");
        }
    }
}

DegradationMap DegradationMap::identity(Eigen::Index m) {
    return DegradationMap(Eigen::MatrixXd::Identity(m, m));
}

DegradationMap DegradationMap::collapse(Eigen::Index m) {
    return DegradationMap(Eigen::MatrixXd::Ones(1, m));
}

Surjection::Surjection(std::vector<std::size_t> image, std::size_t range) : image_(std::move(image)), range_(range) {
    if (image_.empty() || range_ == 0) throw Error(ErrorCode::NotSurjective, "empty domain or range");
    std::vector<bool> hit(range_, false);
    for (std::size_t x = 0; x < image_.size(); ++x) {
        if (image_[x] >= range_) {
            throw Error(ErrorCode::NotSurjective,
                        "f(" + std::to_string(x) + ") = " + std::to_string(image_[x]) + " is outside the range");
        }
        hit[image_[x]] = true;
    }
    const auto missing = std::find(hit.begin(), hit.end(), false);
    if (missing != hit.end()) {
        throw Error(ErrorCode::NotSurjective,
                    "value " + std::to_string(missing - hit.begin()) + " has no preimage");
    }
}

Surjection Surjection::identity(std::size_t m) {
    std::vector<std::size_t> image(m);
    std::iota(image.begin(), image.end(), std::size_t{0});
    return Surjection(std::move(image), m);
}

Surjection Surjection::constant(std::size_t m) {
    return Surjection(std::vector<std::size_t>(m, 0), 1);
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution JointDistribution::with_computed_marginals(Eigen::MatrixXd p) {
    Eigen::VectorXd rows = p.rowwise().sum();
    Eigen::VectorXd cols = p.colwise().sum().transpose();
    ProbabilityVector px(to_vector(rows));
    ProbabilityVector py(to_vector(cols));
    return JointDistribution(std::move(p), std::move(px), std::move(py));
}

JointDistribution JointDistribution::from_matrix(Eigen::MatrixXd matrix, double tolerance) {
    if (matrix.size() == 0) throw Error(ErrorCode::EmptyMatrix, "joint distribution is empty");
    const double total = clamp_and_sum(matrix, tolerance);
    if (std::abs(total - 1.0) > tolerance) {
        std::ostringstream os;
        os << "entries sum to " << total;
        throw Error(ErrorCode::NotNormalized, os.str());
    }
    if (total != 1.0) matrix /= total;
    return with_computed_marginals(std::move(matrix));
}

bool JointDistribution::has_full_support() const noexcept {
    const auto positive = [](double v) { return v > 0.0; };
    return std::all_of(px_.begin(), px_.end(), positive) && std::all_of(py_.begin(), py_.end(), positive);
}

JointDistribution load_joint(const std::vector<std::vector<double>>& raw, double tolerance) {
    if (raw.empty() || raw.front().empty()) throw Error(ErrorCode::EmptyMatrix, "no entries");
    const std::size_t n = raw.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].size() != n) {
            throw Error(ErrorCode::ShapeMismatch, "row " + std::to_string(i) + " has " +
                                                      std::to_string(raw[i].size()) + " entries, expected " +
                                                      std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = raw[i][j];
        }
    }
    return JointDistribution::from_matrix(std::move(m), tolerance);
}

JointDistribution joint_from_channel(const ProbabilityVector& p, const StochasticMatrix& channel) {
    if (static_cast<Eigen::Index>(p.size()) != channel.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "input pmf length differs from channel rows");
    }
    Eigen::Map<const Eigen::VectorXd> pv(p.entries().data(), channel.rows());
    return JointDistribution::from_matrix(pv.asDiagonal() * channel.matrix());
}

StochasticMatrix conditional_of_y(const JointDistribution& joint) {
    Eigen::MatrixXd w = joint.matrix();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double px = joint.row_marginal()[static_cast<std::size_t>(i)];
        if (!(px > 0.0)) throw Error(ErrorCode::ZeroMarginal, "p_X(" + std::to_string(i) + ") = 0");
        w.row(i) /= px;
    }
    return StochasticMatrix(std::move(w));
}

CanonicalForm canonicalize(const JointDistribution& joint) {
    const auto rows = stable_descending_order(joint.row_marginal().entries());
    const auto cols = stable_descending_order(joint.col_marginal().entries());

    Eigen::MatrixXd p(joint.rows(), joint.cols());
    std::vector<double> px(rows.size()), py(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        px[i] = joint.row_marginal()[rows[i]];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                joint(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    for (std::size_t j = 0; j < cols.size(); ++j) py[j] = joint.col_marginal()[cols[j]];

    return CanonicalForm{
        JointDistribution(std::move(p), ProbabilityVector(std::move(px)), ProbabilityVector(std::move(py))),
        rows, cols};
}

JointDistribution degrade(const JointDistribution& joint, const DegradationMap& map) {
    if (map.matrix().cols() != joint.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "degradation map has " + std::to_string(map.matrix().cols()) +
                                                  " columns, joint has " + std::to_string(joint.rows()) + " rows");
    }
    return JointDistribution::from_matrix(map.matrix() * joint.matrix());
}

JointDistribution pushforward(const JointDistribution& joint, const Surjection& f) {
    if (static_cast<Eigen::Index>(f.domain_size()) != joint.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "surjection domain differs from the number of rows");
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f.range()), joint.cols());
    for (std::size_t x = 0; x < f.domain_size(); ++x) {
        out.row(static_cast<Eigen::Index>(f(x))) += joint.matrix().row(static_cast<Eigen::Index>(x));
    }
    return JointDistribution::from_matrix(std::move(out));
}

SupportRestriction restrict_to_support(const JointDistribution& joint) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < joint.row_marginal().size(); ++i) {
        if (joint.row_marginal()[i] > 0.0) rows.push_back(i);
    }
    for (std::size_t j = 0; j < joint.col_marginal().size(); ++j) {
        if (joint.col_marginal()[j] > 0.0) cols.push_back(j);
    }
    Eigen::MatrixXd p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                joint(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return {JointDistribution::from_matrix(std::move(p)), std::move(rows), std::move(cols)};
}

// ---------------------------------------------------------------------------
// Seeded generation

Rng instance_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

JointDistribution random_joint(std::size_t m, std::size_t n, std::uint64_t seed, double concentration) {
    if (m == 0 || n == 0) throw Error(ErrorCode::EmptyMatrix, "random_joint needs m, n >= 1");
    Rng rng = instance_rng(seed, 0, 0x6a6f696e74);
    const auto x = dirichlet(m * n, rng, concentration);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * n + j];
        }
    }
    return JointDistribution::from_matrix(std::move(p));
}

ProbabilityVector random_probability_vector(std::size_t m, Rng& rng, double concentration) {
    if (m == 0) throw Error(ErrorCode::EmptyMatrix, "empty probability vector requested");
    return ProbabilityVector(dirichlet(m, rng, concentration));
}

StochasticMatrix random_channel(std::size_t m, std::size_t n, Rng& rng, double concentration) {
    Eigen::MatrixXd w(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = dirichlet(n, rng, concentration);
        for (std::size_t j = 0; j < n; ++j) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    return StochasticMatrix(std::move(w));
}

DegradationMap random_degradation(std::size_t m_out, std::size_t m_in, Rng& rng, double concentration) {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(m_out), static_cast<Eigen::Index>(m_in));
    for (std::size_t j = 0; j < m_in; ++j) {
        const auto col = dirichlet(m_out, rng, concentration);
        for (std::size_t i = 0; i < m_out; ++i) f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return DegradationMap(std::move(f));
}

}  // namespace pibounds
