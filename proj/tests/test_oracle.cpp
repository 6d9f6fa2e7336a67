#include <gtest/gtest.h>

#include "pibounds/error.hpp"
#include "pibounds/inertia.hpp"
#include "pibounds/oracle.hpp"

using namespace pibounds;

TEST(BayesError, Examples) {
    EXPECT_EQ(bayes_error(load_joint({{0.5, 0.0}, {0.0, 0.5}})), 0.0);
    EXPECT_NEAR(bayes_error(load_joint({{0.25, 0.25}, {0.25, 0.25}})), 0.5, 1e-15);
    EXPECT_NEAR(bayes_error(load_joint({{0.4, 0.1}, {0.2, 0.3}})), 0.3, 1e-15);
}

TEST(BayesError, NeverWorseThanBlindGuess) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto j = random_joint(2 + s % 5, 2 + (s / 5) % 5, s, 0.5);
        EXPECT_LE(bayes_error(j), 1.0 - j.row_marginal().max() + 1e-12);
    }
}

TEST(BayesError, PermutationInvariant) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto j = random_joint(4, 5, 100 + s);
        const auto c = canonicalize(j);
        EXPECT_EQ(bayes_error(c.joint), bayes_error(j));
        Eigen::MatrixXd rev = j.matrix().colwise().reverse().rowwise().reverse();
        EXPECT_NEAR(bayes_error(JointDistribution::from_matrix(rev)), bayes_error(j), 1e-15);
    }
}

TEST(FunctionBayesError, Examples) {
    const auto j = random_joint(3, 3, 7);
    EXPECT_EQ(function_bayes_error(j, Surjection::identity(3)), bayes_error(j));
    EXPECT_NEAR(function_bayes_error(j, Surjection::constant(3)), 0.0, 1e-15);

    double hit = 0.0;
    for (int y = 0; y < 3; ++y) hit += std::max(j(0, y) + j(1, y), j(2, y));
    EXPECT_NEAR(function_bayes_error(j, Surjection({0, 0, 1}, 2)), 1.0 - hit, 1e-15);
}

TEST(Dpi, Examples) {
    const auto j = random_joint(4, 3, 8);
    const auto same = dpi_verify(j, DegradationMap::identity(4));
    EXPECT_TRUE(same.ok());
    for (const auto& c : same.certified) EXPECT_NEAR(c.slack(), 0.0, 1e-12);

    const auto gone = dpi_verify(j, DegradationMap::collapse(4));
    EXPECT_TRUE(gone.ok());
    for (const auto& c : gone.certified) EXPECT_EQ(c.bound, 0.0);

    try {
        dpi_verify(j, DegradationMap::identity(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
    }
}

TEST(Convexity, Examples) {
    Rng rng = instance_rng(3, 0);
    const auto p = random_probability_vector(3, rng);
    const auto w0 = random_channel(3, 4, rng);
    const auto w1 = random_channel(3, 4, rng);
    const auto same = convexity_probe(p, w0, w0, {0.1, 0.5, 0.9}, 2);
    for (const auto& c : same.certified) EXPECT_NEAR(c.slack(), 0.0, 1e-12);
    const auto ends = convexity_probe(p, w0, w1, {0.0, 1.0}, 1);
    for (const auto& c : ends.certified) EXPECT_NEAR(c.slack(), 0.0, 1e-12);
    EXPECT_THROW(convexity_probe(p, w0, random_channel(3, 3, rng), {0.5}, 1), Error);
}

TEST(Sweeps, ZeroViolations) {
    const SweepOptions o{42, 100, 1};
    for (auto fn : {soundness_sweep, remark_sweep, lp_duality_sweep, decomposition_sweep, dpi_sweep, convexity_sweep,
                    schur_sweep, function_bound_sweep, corollary_collapse_sweep}) {
        const auto r = fn(o);
        EXPECT_TRUE(r.ok()) << r.subject;
        EXPECT_GE(r.checked, 100u) << r.subject;
    }
}

TEST(Sweeps, IndependentOfJobs) {
    const auto a = dpi_sweep({7, 60, 1});
    const auto b = dpi_sweep({7, 60, 4});
    ASSERT_EQ(a.certified.size(), b.certified.size());
    for (std::size_t i = 0; i < a.certified.size(); ++i) {
        EXPECT_EQ(a.certified[i].instance, b.certified[i].instance);
        EXPECT_EQ(a.certified[i].exact, b.certified[i].exact);
        EXPECT_EQ(a.certified[i].bound, b.certified[i].bound);
    }
}

TEST(Sweeps, ExceptionsPropagate) {
    EXPECT_THROW(run_instances("x", 5, 2, [](std::size_t i) -> OracleReport {
                     if (i == 3) throw Error(ErrorCode::InvalidArgument, "boom");
                     return {};
                 }),
                 Error);
}

TEST(Report, WorstSlack) {
    OracleReport r;
    r.add({"a", 0, 1.0, 0.5});
    r.add({"b", 1, 0.5, 0.6});
    r.add({"c", 2, 0.5, 0.5 + 1e-3, Certificate::Relation::Equal, 1e-2});
    EXPECT_EQ(r.checked, 3u);
    EXPECT_EQ(r.violations.size(), 1u);
    EXPECT_NEAR(r.worst_slack(), -0.1, 1e-15);
}
