#include "pibounds/report.hpp"

#include <algorithm>
#include <cmath>

namespace pibounds {

bool Certificate::holds() const noexcept {
    switch (relation) {
        case Relation::AtLeast: return exact >= bound - tolerance;
        case Relation::Equal: return std::abs(exact - bound) <= tolerance;
    }
    return false;
}

void OracleReport::add(Certificate certificate) {
    ++checked;
    if (!certificate.holds()) violations.push_back(certificate);
    certified.push_back(std::move(certificate));
}

void OracleReport::merge(OracleReport other) {
    checked += other.checked;
    certified.insert(certified.end(), std::make_move_iterator(other.certified.begin()),
                     std::make_move_iterator(other.certified.end()));
    violations.insert(violations.end(), std::make_move_iterator(other.violations.begin()),
                      std::make_move_iterator(other.violations.end()));
}

double OracleReport::worst_slack() const noexcept {
    double worst = 0.0;
    for (const auto& c : certified) {
        const double s = c.relation == Certificate::Relation::AtLeast ? c.slack() : -std::abs(c.slack());
        worst = std::min(worst, s);
    }
    return worst;
}

}  // namespace pibounds
