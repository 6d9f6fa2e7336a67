#pragma once

#include <Eigen/Dense>

namespace pibounds::detail {

// Orthonormal basis (as columns) of the complement of the unit vector u,
// taken from the Householder reflection that swaps u and -e_1. Requires
// u(0) >= 0 so that u + e_1 does not cancel.
inline Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& u) {
    const Eigen::Index m = u.size();
    Eigen::VectorXd w = u;
    w(0) += 1.0;
    const double ww = w.squaredNorm();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m) - (2.0 / ww) * w * w.transpose();
    return h.rightCols(m - 1);
}

}  // namespace pibounds::detail
