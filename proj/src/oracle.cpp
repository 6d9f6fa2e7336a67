#include "pibounds/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "pibounds/error.hpp"
#include "pibounds/error_rate.hpp"
#include "pibounds/fn_bounds.hpp"
#include "pibounds/inertia.hpp"
#include "pibounds/pe_bounds.hpp"

namespace pibounds {

double bayes_error(const JointDistribution& joint) {
    // Summing the column maxima in sorted order makes the value exactly
    // invariant under row and column permutations.
    Eigen::RowVectorXd hits = joint.matrix().colwise().maxCoeff();
    std::sort(hits.data(), hits.data() + hits.size());
    return 1.0 - hits.sum();
}

double function_bayes_error(const JointDistribution& joint, const Surjection& f) {
    return bayes_error(pushforward(joint, f));
}

namespace {

std::vector<double> padded_lambdas(const JointDistribution& joint, std::size_t length) {
    std::vector<double> lambdas = decompose(restrict_to_support(joint).joint).lambdas;
    lambdas.resize(std::max(length, lambdas.size()), 0.0);
    return lambdas;
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random inertia bounds: sorted uniforms on [0, 1].
std::vector<double> draw_lambdas(std::size_t count, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> lambdas(count);
    for (auto& l : lambdas) l = u(rng);
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return lambdas;
}

// Alternate flat and peaked draws so sweeps also see lopsided instances.
double concentration_for(std::size_t instance) { return instance % 2 == 0 ? 1.0 : 0.5; }

enum Stream : std::uint64_t {
    kSoundness = 1,
    kRemark,
    kLpDuality,
    kDecomposition,
    kDpi,
    kConvexity,
    kSchur,
    kFunctionBound,
    kCollapse,
};

}  // namespace

OracleReport dpi_verify(const JointDistribution& joint, const DegradationMap& map) {
    if (map.matrix().cols() != joint.rows())
        throw Error(ErrorCode::ShapeMismatch, "degradation map input size must equal the number of rows");
    const JointDistribution degraded = degrade(joint, map);
    std::vector<double> before = padded_lambdas(joint, 0);
    std::vector<double> after = padded_lambdas(degraded, before.size());
    before.resize(after.size(), 0.0);

    OracleReport report;
    report.subject = "dpi";
    for (std::size_t i = 0; i < before.size(); ++i) {
        report.add({"lambda_" + std::to_string(i + 1), i, before[i], after[i], Certificate::Relation::AtLeast, 1e-9});
    }
    return report;
}

OracleReport convexity_probe(const ProbabilityVector& p, const StochasticMatrix& w0, const StochasticMatrix& w1,
                             const std::vector<double>& t_grid, std::size_t k) {
    if (w0.rows() != w1.rows() || w0.cols() != w1.cols())
        throw Error(ErrorCode::ShapeMismatch, "channels must share a shape");
    if (static_cast<Eigen::Index>(p.size()) != w0.rows())
        throw Error(ErrorCode::ShapeMismatch, "channel rows must match p");

    const double j0 = k_correlation(joint_from_channel(p, w0), k);
    const double j1 = k_correlation(joint_from_channel(p, w1), k);
    OracleReport report;
    report.subject = "convexity";
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double mixed = k_correlation(joint_from_channel(p, mix(w0, w1, t)), k);
        report.add({"J_" + std::to_string(k), i, t * j0 + (1.0 - t) * j1, mixed, Certificate::Relation::AtLeast, 1e-9});
    }
    return report;
}

OracleReport run_instances(std::string subject, std::size_t count, std::size_t jobs,
                           const std::function<OracleReport(std::size_t)>& body) {
    std::vector<OracleReport> parts(count);
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                parts[i] = body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    OracleReport report;
    report.subject = std::move(subject);
    for (auto& part : parts) report.merge(std::move(part));
    return report;
}

JointDistribution draw_joint(std::size_t m, std::size_t n, Rng& rng, double concentration) {
    const ProbabilityVector cells = random_probability_vector(m * n, rng, concentration);
    Eigen::MatrixXd p(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) p(i, j) = cells[i * n + j];
    }
    return JointDistribution::from_matrix(std::move(p));
}

OracleReport soundness_sweep(const SweepOptions& o) {
    return run_instances("soundness", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kSoundness);
        const std::size_t m = uniform_index(rng, 2, 6);
        const std::size_t n = uniform_index(rng, 2, 6);
        const JointDistribution joint = draw_joint(m, n, rng, concentration_for(i));
        OracleReport r;
        r.add({"theorem3", i, bayes_error(joint), theorem3_bound(InertiaBoundInput::from_joint(joint)).lower_bound,
               Certificate::Relation::AtLeast, 1e-9});
        return r;
    });
}

OracleReport remark_sweep(const SweepOptions& o) {
    return run_instances("remarks", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kRemark);
        const std::size_t m = uniform_index(rng, 2, 8);
        const ProbabilityVector p = random_probability_vector(m, rng, concentration_for(i)).sorted();
        OracleReport r;
        const auto ones = theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, 1.0)));
        r.add({"lambda_one", i, 0.0, ones.lower_bound, Certificate::Relation::Equal, 1e-12});
        const auto zeros = theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, 0.0)));
        r.add({"lambda_zero", i, 1.0 - p[0], zeros.lower_bound, Certificate::Relation::Equal, 1e-12});
        return r;
    });
}

OracleReport lp_duality_sweep(const SweepOptions& o) {
    return run_instances("lp_duality", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kLpDuality);
        const std::size_t m = uniform_index(rng, 2, 8);
        const ProbabilityVector p = random_probability_vector(m, rng, concentration_for(i)).sorted();
        const LpCertificate lp = lp_sigma_oracle(InertiaBoundInput(p, draw_lambdas(m - 1, rng)));
        OracleReport r;
        r.add({"primal_dual", i, lp.primal, lp.dual, Certificate::Relation::Equal, kLpAgreement});
        r.add({"primal_closed_form", i, lp.primal, lp.f0_star, Certificate::Relation::Equal, kLpAgreement});
        return r;
    });
}

OracleReport decomposition_sweep(const SweepOptions& o) {
    return run_instances("decomposition", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kDecomposition);
        const std::size_t m = uniform_index(rng, 2, 6);
        const std::size_t n = uniform_index(rng, 2, 6);
        const JointDistribution joint = draw_joint(m, n, rng, concentration_for(i));
        const InertiaDecomposition dec = decompose(joint);
        const double chi2 = chi_squared_direct(joint);
        OracleReport r;
        r.add({"sigma_0", i, 1.0, normalized_singular_values(joint).front(), Certificate::Relation::Equal, 1e-9});
        r.add({"J_d_chi2", i, chi2, k_correlation(dec, dec.dimension()), Certificate::Relation::Equal, 1e-9});
        r.add({"spatial_chi2", i, chi2, total_inertia_spatial(joint), Certificate::Relation::Equal, 1e-9});
        r.add({"ace_rho", i, maximal_correlation(dec), ace_maxcorr(joint).correlation, Certificate::Relation::Equal,
               1e-6});
        return r;
    });
}

OracleReport dpi_sweep(const SweepOptions& o) {
    return run_instances("dpi", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kDpi);
        const std::size_t m = uniform_index(rng, 2, 6);
        const std::size_t n = uniform_index(rng, 2, 6);
        const std::size_t m_out = uniform_index(rng, 1, 6);
        const JointDistribution joint = draw_joint(m, n, rng, concentration_for(i));
        OracleReport r = dpi_verify(joint, random_degradation(m_out, m, rng, concentration_for(i)));
        for (auto& c : r.certified) c.instance = i;
        for (auto& c : r.violations) c.instance = i;
        return r;
    });
}

OracleReport convexity_sweep(const SweepOptions& o) {
    return run_instances("convexity", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kConvexity);
        const std::size_t m = uniform_index(rng, 2, 6);
        const std::size_t n = uniform_index(rng, 2, 6);
        const ProbabilityVector p = random_probability_vector(m, rng, concentration_for(i));
        const StochasticMatrix w0 = random_channel(m, n, rng, concentration_for(i));
        const StochasticMatrix w1 = random_channel(m, n, rng, concentration_for(i));
        std::vector<double> grid;
        for (int t = 1; t <= 9; ++t) grid.push_back(t / 10.0);
        const std::size_t d = std::min(m, n) - 1;
        OracleReport r = convexity_probe(p, w0, w1, grid, 1);
        if (d > 1) r.merge(convexity_probe(p, w0, w1, grid, d));
        for (auto& c : r.certified) c.instance = i;
        for (auto& c : r.violations) c.instance = i;
        return r;
    });
}

OracleReport schur_sweep(const SweepOptions& o) {
    const NamedBound fano{"fano", [](const ProbabilityVector& p, double theta) {
                              return fano_error_rate(p, theta).d_star;
                          }};
    return run_instances("schur", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kSchur);
        const std::size_t m = uniform_index(rng, 2, 6);
        const std::size_t terms = uniform_index(rng, 1, 4);
        const MajorizationPair pair = random_majorization_pair(m, terms, rng);
        const double h = entropy_bits(pair.p);
        OracleReport r;
        for (double theta : {0.0, 0.25 * h, 0.5 * h}) r.merge(schur_probe(fano, {pair}, theta));
        for (auto& c : r.certified) c.instance = i;
        for (auto& c : r.violations) c.instance = i;
        return r;
    });
}

OracleReport function_bound_sweep(const SweepOptions& o) {
    return run_instances("function_bounds", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kFunctionBound);
        const std::size_t m = uniform_index(rng, 2, 5);
        const std::size_t n = uniform_index(rng, 2, 5);
        const JointDistribution joint = draw_joint(m, n, rng, concentration_for(i));
        const double rho = maximal_correlation(decompose(joint));
        const double info = mutual_information_bits(joint);
        OracleReport r;
        for (std::size_t M = 2; M <= std::min<std::size_t>(3, m); ++M) {
            const double exact = peM_bruteforce(joint, M).value;
            const std::string tag = "M" + std::to_string(M);
            r.add({tag + "_maxcorr", i, exact,
                   peM_bound(joint.row_marginal(), std::min(rho, 1.0), M, FunctionMeasure::MaxCorrelation).value,
                   Certificate::Relation::AtLeast, 1e-9});
            r.add({tag + "_mi", i, exact,
                   peM_bound(joint.row_marginal(), info, M, FunctionMeasure::MutualInformation).value,
                   Certificate::Relation::AtLeast, 1e-9});
        }
        return r;
    });
}

OracleReport corollary_collapse_sweep(const SweepOptions& o) {
    return run_instances("corollary_collapse", o.instances, o.jobs, [&](std::size_t i) {
        Rng rng = instance_rng(o.seed, i, kCollapse);
        const std::size_t m = uniform_index(rng, 2, 8);
        const ProbabilityVector p = random_probability_vector(m, rng, concentration_for(i)).sorted();
        const double lambda1 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const BoundResult full = theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, lambda1)));
        const MaxCorrBound corollary = corollary_maxcorr_bound(p, lambda1);
        OracleReport r;
        r.add({"constant_lambda", i, full.raw, corollary.bound.raw, Certificate::Relation::Equal, 1e-9});
        return r;
    });
}

}  // namespace pibounds
