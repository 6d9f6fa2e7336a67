#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pibounds {

/// One checked relation between an exact quantity and a bound on it.
struct Certificate {
    enum class Relation {
        /// exact >= bound - tolerance
        AtLeast,
        /// |exact - bound| <= tolerance
        Equal,
    };

    std::string name;
    std::size_t instance = 0;
    double exact = 0.0;
    double bound = 0.0;
    Relation relation = Relation::AtLeast;
    double tolerance = 1e-9;

    double slack() const noexcept { return exact - bound; }
    bool holds() const noexcept;
};

/// Exact quantities paired with the bounds they certify. Violations are the
/// certificates that do not hold.
struct OracleReport {
    std::string subject;
    std::size_t checked = 0;
    std::vector<Certificate> certified;
    std::vector<Certificate> violations;

    /// Records the certificate and files it under violations if it fails.
    void add(Certificate certificate);
    void merge(OracleReport other);
    bool ok() const noexcept { return violations.empty(); }
    /// Most negative slack seen over AtLeast certificates, or the largest
    /// deviation over Equal ones, reported as a nonpositive number.
    double worst_slack() const noexcept;
};

}  // namespace pibounds
