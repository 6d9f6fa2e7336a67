#pragma once

// Finite probability vectors, joint distributions and channels.
//
// All types here are immutable once constructed and validate on entry, so a
// value that exists is a value that satisfies its invariants.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pibounds {

/// Normalization tolerance applied to externally supplied data.
inline constexpr double kIngestTolerance = 1e-9;
/// Tolerance for identities that only accumulate rounding from our own arithmetic.
inline constexpr double kInternalTolerance = 1e-12;

using Rng = std::mt19937_64;

/// A pmf over {0, ..., size-1}.
class ProbabilityVector {
public:
    /// Validates: nonempty, no entry below -tolerance, sum within tolerance of 1.
    /// Entries in [-tolerance, 0) are clamped to zero; nothing is renormalized.
    explicit ProbabilityVector(std::vector<double> entries, double tolerance = kIngestTolerance);

    static ProbabilityVector uniform(std::size_t size);

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    std::span<const double> entries() const noexcept { return p_; }
    auto begin() const noexcept { return p_.begin(); }
    auto end() const noexcept { return p_.end(); }

    /// True when entries are non-increasing.
    bool is_canonical() const noexcept;
    /// Stable non-increasing sort.
    ProbabilityVector sorted() const;
    /// p^T p
    double sum_of_squares() const noexcept;
    double max() const noexcept;

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
    std::vector<double> p_;
};

/// Row-stochastic m x n matrix; row i is the conditional pmf of Y given X = i.
class StochasticMatrix {
public:
    explicit StochasticMatrix(Eigen::MatrixXd matrix, double tolerance = kIngestTolerance);

    const Eigen::MatrixXd& matrix() const noexcept { return w_; }
    Eigen::Index rows() const noexcept { return w_.rows(); }
    Eigen::Index cols() const noexcept { return w_.cols(); }

private:
    Eigen::MatrixXd w_;
};

/// t * a + (1 - t) * b. Both must share a shape.
StochasticMatrix mix(const StochasticMatrix& a, const StochasticMatrix& b, double t);

/// Column-stochastic m' x m matrix F with F(i, j) = p(X' = i | X = j).
class DegradationMap {
public:
    explicit DegradationMap(Eigen::MatrixXd matrix, double tolerance = kIngestTolerance);

    static DegradationMap identity(Eigen::Index m);
    /// Single output symbol: every input collapses onto it.
    static DegradationMap collapse(Eigen::Index m);

    const Eigen::MatrixXd& matrix() const noexcept { return f_; }

private:
    Eigen::MatrixXd f_;
};

/// A surjection from {0..domain-1} onto {0..range-1}.
class Surjection {
public:
    Surjection(std::vector<std::size_t> image, std::size_t range);

    static Surjection identity(std::size_t m);
    static Surjection constant(std::size_t m);

    std::size_t domain_size() const noexcept { return image_.size(); }
    std::size_t range() const noexcept { return range_; }
    std::size_t operator()(std::size_t x) const { return image_[x]; }
    std::span<const std::size_t> image() const noexcept { return image_; }

    friend bool operator==(const Surjection&, const Surjection&) = default;

private:
    std::vector<std::size_t> image_;
    std::size_t range_;
};

struct CanonicalForm;

/// Joint pmf of (X, Y) stored as an m x n matrix with rows indexed by X.
class JointDistribution {
public:
    /// Validates and normalizes. Entries below -tolerance raise NegativeMass,
    /// entries in [-tolerance, 0) are clamped to zero, a total further than
    /// tolerance from one raises NotNormalized. The result is divided by its sum.
    static JointDistribution from_matrix(Eigen::MatrixXd matrix, double tolerance = kIngestTolerance);

    const Eigen::MatrixXd& matrix() const noexcept { return p_; }
    Eigen::Index rows() const noexcept { return p_.rows(); }
    Eigen::Index cols() const noexcept { return p_.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return p_(i, j); }

    const ProbabilityVector& row_marginal() const noexcept { return px_; }
    const ProbabilityVector& col_marginal() const noexcept { return py_; }

    /// True when every row and column marginal is strictly positive.
    bool has_full_support() const noexcept;

    friend bool operator==(const JointDistribution& a, const JointDistribution& b) {
        return a.p_.rows() == b.p_.rows() && a.p_.cols() == b.p_.cols() && a.p_ == b.p_ && a.px_ == b.px_ && a.py_ == b.py_;
    }

private:
    JointDistribution(Eigen::MatrixXd p, ProbabilityVector px, ProbabilityVector py)
        : p_(std::move(p)), px_(std::move(px)), py_(std::move(py)) {}

    static JointDistribution with_computed_marginals(Eigen::MatrixXd p);

    friend CanonicalForm canonicalize(const JointDistribution& joint);

    Eigen::MatrixXd p_;
    ProbabilityVector px_;
    ProbabilityVector py_;
};

/// Loads a rectangular, nonempty grid (rows indexed by X).
JointDistribution load_joint(const std::vector<std::vector<double>>& raw, double tolerance = kIngestTolerance);

/// Joint distribution diag(p) * W.
JointDistribution joint_from_channel(const ProbabilityVector& p, const StochasticMatrix& channel);

/// Conditional distribution of Y given X. Requires positive row marginals.
StochasticMatrix conditional_of_y(const JointDistribution& joint);

struct CanonicalForm {
    JointDistribution joint;
    /// row_permutation[k] is the original index of row k of `joint`.
    std::vector<std::size_t> row_permutation;
    std::vector<std::size_t> col_permutation;
};

/// Sorts rows by p_X and columns by p_Y, both non-increasing and stable on
/// ties. Marginals are carried through the permutation rather than recomputed,
/// which makes the operation idempotent bit for bit.
CanonicalForm canonicalize(const JointDistribution& joint);

/// Joint of (X', Y) given X' <- X through `map`, i.e. F * P.
JointDistribution degrade(const JointDistribution& joint, const DegradationMap& map);

/// Joint of (f(X), Y): row u is the sum of rows x with f(x) = u.
JointDistribution pushforward(const JointDistribution& joint, const Surjection& f);

struct SupportRestriction {
    JointDistribution joint;
    std::vector<std::size_t> kept_rows;
    std::vector<std::size_t> kept_cols;
};

/// Drops rows and columns whose marginal is exactly zero.
SupportRestriction restrict_to_support(const JointDistribution& joint);

/// Seeded symmetric-Dirichlet draw over the m*n simplex; every entry is
/// strictly positive.
JointDistribution random_joint(std::size_t m, std::size_t n, std::uint64_t seed, double concentration = 1.0);

// Generators for sweeps and tests; all draws come from the caller's engine.
ProbabilityVector random_probability_vector(std::size_t m, Rng& rng, double concentration = 1.0);
StochasticMatrix random_channel(std::size_t m, std::size_t n, Rng& rng, double concentration = 1.0);
DegradationMap random_degradation(std::size_t m_out, std::size_t m_in, Rng& rng, double concentration = 1.0);

/// Engine for instance `index` of a seeded sweep. Streams for different
/// indices and stream ids are independent of evaluation order.
Rng instance_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace pibounds
