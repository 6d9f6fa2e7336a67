#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "pibounds/error.hpp"
#include "pibounds/inertia.hpp"
#include "pibounds/pe_bounds.hpp"

using namespace pibounds;

namespace {

const ProbabilityVector kP({0.7, 0.2, 0.1});
const InertiaBoundInput kInput(kP, {0.5, 0.3});

ProbabilityVector draw_p(std::size_t m, Rng& rng) { return random_probability_vector(m, rng, 0.7).sorted(); }

std::vector<double> draw_lambdas(std::size_t count, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> l(count);
    for (auto& x : l) x = u(rng);
    std::sort(l.begin(), l.end(), std::greater<>());
    return l;
}

// Brute-force minimum of f0 over a uniform alpha grid.
double f0_grid_min(const InertiaBoundInput& input, std::size_t steps) {
    double best = f0(0.0, input);
    for (std::size_t i = 1; i <= steps; ++i) best = std::min(best, f0(static_cast<double>(i) / steps, input));
    return best;
}

// Brute-force minimum of u0 over a grid of spacing h on [0, hi].
U0Minimum u0_grid_min(const ProbabilityVector& p, double f, double hi, double h) {
    U0Minimum best{0.0, u0(0.0, p, f)};
    for (double b = h; b <= hi + 1e-15; b += h) {
        const double v = u0(b, p, f);
        if (v < best.value) best = {b, v};
    }
    return best;
}

}  // namespace

TEST(Kstar, Examples) {
    EXPECT_EQ(kstar(ProbabilityVector::uniform(4)), 4u);
    EXPECT_EQ(kstar(kP), 1u);
    EXPECT_EQ(kstar(ProbabilityVector({0.5, 0.5})), 2u);
}

TEST(F0, Examples) {
    EXPECT_NEAR(f0(0.0, InertiaBoundInput(kP, {0.0, 0.0})), 0.0, 1e-15);
    EXPECT_NEAR(f0(0.5, kInput), 0.21, 1e-12);

    // alpha = 1: every c_i vanishes.
    Rng rng = instance_rng(1, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = draw_p(5, rng);
        const InertiaBoundInput in(p, draw_lambdas(4, rng));
        double expect = p[0] - p.sum_of_squares();
        for (std::size_t i = 2; i <= 5; ++i) expect += in.lambda(i - 1) * p[i - 1];
        EXPECT_NEAR(f0(1.0, in), expect, 1e-12);
    }
}

TEST(F0Star, Examples) {
    EXPECT_NEAR(f0_star(InertiaBoundInput(kP, {0.0, 0.0})), 0.0, 1e-15);
    EXPECT_NEAR(f0_star(kInput), 0.21, 1e-12);
    const InertiaBoundInput uniform(ProbabilityVector::uniform(4), {0.6, 0.3, 0.1});
    EXPECT_NEAR(f0_star(uniform), 1.0 / 4.0, 1e-12);
    EXPECT_NEAR(f0_grid_min(uniform, 10000), 0.25, 1e-12);
}

TEST(F0Star, EqualsAlphaGridMinimum) {
    // f0 is piecewise linear with kinks at the lambdas, so a fine grid plus the
    // kinks themselves reaches the true minimum.
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = instance_rng(2, s);
        const std::size_t m = 2 + s % 7;
        const InertiaBoundInput in(draw_p(m, rng), draw_lambdas(m - 1, rng));
        double best = f0_grid_min(in, 2000);
        for (double l : in.lambdas()) best = std::min(best, f0(l, in));
        EXPECT_NEAR(f0_star(in), best, 1e-12) << s;
    }
}

TEST(InertiaBound, WorkedInstance) {
    const auto r = theorem3_bound(kInput);
    const double beta = (2.0 - std::sqrt(2.5)) / 6.0;
    EXPECT_NEAR(r.beta_star, beta, 1e-12);
    EXPECT_NEAR(r.u1, 0.8603796100, 1e-9);
    EXPECT_NEAR(r.lower_bound, 0.1396203900, 1e-9);
    EXPECT_EQ(r.k_star, 1u);
    EXPECT_NEAR(r.f0_star, 0.21, 1e-12);

    const auto grid = u0_grid_min(kP, 0.21, 0.2, 1e-6);
    EXPECT_NEAR(r.u1, grid.value, 1e-9);
    EXPECT_NEAR(r.beta_star, grid.beta, 2e-6);
}

TEST(InertiaBound, SpecialCases) {
    Rng rng = instance_rng(3, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 2 + rep % 6;
        const auto p = draw_p(m, rng);
        EXPECT_NEAR(theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, 1.0))).lower_bound, 0.0, 1e-12);
        EXPECT_NEAR(theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, 0.0))).lower_bound, 1.0 - p[0],
                    1e-12);
    }
}

TEST(InertiaBound, ExactMinimizerMatchesBetaGrid) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        Rng rng = instance_rng(4, s);
        const std::size_t m = 2 + s % 6;
        const InertiaBoundInput in(draw_p(m, rng), draw_lambdas(m - 1, rng));
        const auto r = theorem3_bound(in);
        const auto grid = u0_grid_min(in.p(), r.f0_star, in.prob(2), 1e-5);
        EXPECT_LE(r.u1, grid.value + 1e-12);
        EXPECT_NEAR(r.u1, grid.value, 1e-7);
        EXPECT_GE(r.beta_star, 0.0);
        EXPECT_LE(r.beta_star, in.prob(2));
    }
}

TEST(InertiaBound, BetaRestrictionCostsNothing) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = instance_rng(5, s);
        const std::size_t m = 2 + s % 7;
        const InertiaBoundInput in(draw_p(m, rng), draw_lambdas(m - 1, rng));
        const double f = f0_star(in);
        const auto restricted = minimize_u0(in.p(), f, in.prob(2));
        const auto free = minimize_u0(in.p(), f, 1.0);
        EXPECT_GE(free.value, restricted.value - 1e-9);
    }
}

TEST(InertiaBound, MonotoneInEachLambda) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng = instance_rng(6, s);
        const std::size_t m = 3 + s % 5;
        const auto p = draw_p(m, rng);
        const auto lambdas = draw_lambdas(m - 1, rng);
        const double base = theorem3_bound(InertiaBoundInput(p, lambdas)).lower_bound;
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            auto up = lambdas;
            up[i] += 1e-3;
            if (up[i] > 1.0 || (i > 0 && up[i] > up[i - 1])) continue;
            EXPECT_LE(theorem3_bound(InertiaBoundInput(p, up)).lower_bound, base + 1e-12);
        }
    }
}

TEST(InertiaBound, DominatesLambdaOneReplication) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto j = random_joint(2 + s % 5, 2 + (s / 5) % 5, 500 + s);
        const auto in = InertiaBoundInput::from_joint(j);
        const auto replicated =
            InertiaBoundInput(in.p(), {in.lambdas().front()}, InertiaCompletion::ReplicateLargest);
        EXPECT_GE(theorem3_bound(in).lower_bound, theorem3_bound(replicated).lower_bound - 1e-9);
    }
}

TEST(InertiaBound, InputValidation) {
    const auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code([] { InertiaBoundInput(ProbabilityVector({0.2, 0.8}), {0.1}); }), ErrorCode::NotCanonical);
    EXPECT_EQ(code([] { InertiaBoundInput(kP, {0.3, 0.5}); }), ErrorCode::InvalidInertias);
    EXPECT_EQ(code([] { InertiaBoundInput(kP, {1.5, 0.5}); }), ErrorCode::InvalidInertias);
    EXPECT_EQ(code([] { InertiaBoundInput(kP, {0.5}); }), ErrorCode::InvalidInertias);
    const InertiaBoundInput padded(kP, {0.5}, InertiaCompletion::PadWithZeros);
    EXPECT_EQ(padded.lambda(2), 0.0);
    const InertiaBoundInput replicated(kP, {0.5}, InertiaCompletion::ReplicateLargest);
    EXPECT_EQ(replicated.lambda(2), 0.5);
}

TEST(CorollaryUniform, Examples) {
    using K = UniformInformation::Kind;
    EXPECT_NEAR(corollary_uniform_bound(4, {K::ChiSquared, 0.0}).value, 0.75, 1e-12);
    EXPECT_NEAR(corollary_uniform_bound(4, {K::ChiSquared, 1.0}).value, 0.75 - std::sqrt(3.0) / 4.0, 1e-12);
    EXPECT_NEAR(corollary_uniform_bound(4, {K::ChiSquared, 1.0}).value, 0.3170, 1e-4);
    EXPECT_NEAR(corollary_uniform_bound(4, {K::ChiSquared, 3.0}).value, 0.0, 1e-12);
    EXPECT_NEAR(corollary_uniform_bound(4, {K::Lambda1, 0.25}).value, 0.75 - 0.5 * 0.75, 1e-12);
}

TEST(CorollaryUniform, SoundOnUniformInputs) {
    using K = UniformInformation::Kind;
    for (std::uint64_t s = 0; s < 300; ++s) {
        Rng rng = instance_rng(10, s);
        const std::size_t m = 2 + s % 5, n = 2 + (s / 5) % 5;
        const auto j = joint_from_channel(ProbabilityVector::uniform(m), random_channel(m, n, rng, s % 2 ? 0.3 : 1.0));
        const auto full = restrict_to_support(j).joint;
        if (full.rows() != j.rows()) continue;
        const double pe = 1.0 - j.matrix().colwise().maxCoeff().sum();
        const auto dec = decompose(full);
        EXPECT_LE(corollary_uniform_bound(m, {K::ChiSquared, chi_squared_direct(full)}).value, pe + 1e-9);
        EXPECT_LE(corollary_uniform_bound(m, {K::Lambda1, dec.lambdas[0]}).value, pe + 1e-9);
    }
}

TEST(CorollaryMaxCorr, Examples) {
    const ProbabilityVector half({0.5, 0.5});
    EXPECT_NEAR(corollary_maxcorr_bound(half, 0.0, 0.5).bound.value, 0.5, 1e-15);
    Rng rng = instance_rng(7, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = draw_p(2 + rep % 5, rng);
        EXPECT_NEAR(corollary_maxcorr_bound(p, 1.0).bound.value, 0.0, 1e-15);
    }
}

TEST(CorollaryMaxCorr, CollapsesTheorem3) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng = instance_rng(8, s);
        const std::size_t m = 2 + s % 7;
        const auto p = draw_p(m, rng);
        const double l = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto t = theorem3_bound(InertiaBoundInput(p, std::vector<double>(m - 1, l)));
        const auto c = corollary_maxcorr_bound(p, l);
        EXPECT_NEAR(t.raw, c.bound.raw, 1e-9);
        EXPECT_GE(c.bound.value, c.weak_closed_form.value - 1e-12);
    }
}

TEST(Advantage, Examples) {
    EXPECT_EQ(advantage_bound(kP, 0.0), 0.0);
    EXPECT_NEAR(advantage_bound(ProbabilityVector({0.5, 0.5}), 0.64), 0.8 * std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(advantage_bound(ProbabilityVector({0.5, 0.5}), 1.0), std::sqrt(0.5), 1e-15);
}

TEST(Advantage, BoundsTrueAdvantage) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto j = random_joint(2 + s % 5, 2 + (s / 5) % 5, 700 + s);
        const double lambda1 = decompose(j).lambdas[0];
        const double pe = 1.0 - j.matrix().colwise().maxCoeff().sum();
        const auto p = j.row_marginal().sorted();
        EXPECT_LE(std::abs(1.0 - p[0] - pe), advantage_bound(p, lambda1) + 1e-12);
    }
}

TEST(LpOracle, Examples) {
    const auto zero = lp_sigma_oracle(InertiaBoundInput(kP, {0.0, 0.0}));
    EXPECT_NEAR(zero.primal, 0.0, 1e-15);

    const auto worked = lp_sigma_oracle(kInput);
    ASSERT_EQ(worked.sigma.size(), 2u);
    EXPECT_NEAR(worked.sigma[0], 0.36, 1e-12);
    EXPECT_NEAR(worked.sigma[1], 0.10, 1e-12);
    EXPECT_NEAR(worked.primal, 0.21, 1e-12);
    EXPECT_TRUE(worked.consistent);

    const auto boxed = lp_sigma_oracle(InertiaBoundInput(ProbabilityVector::uniform(3), {0.6, 0.2}));
    EXPECT_NEAR(boxed.sigma[0], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(boxed.sigma[1], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(boxed.primal, 0.8 / 3.0, 1e-12);
}

TEST(LpOracle, StrongDualityOverSeeds) {
    for (std::uint64_t s = 0; s < 500; ++s) {
        Rng rng = instance_rng(9, s);
        const std::size_t m = 2 + s % 8;
        const InertiaBoundInput in(draw_p(m, rng), draw_lambdas(m - 1, rng));
        const auto lp = lp_sigma_oracle(in);
        EXPECT_TRUE(lp.consistent) << s;
        EXPECT_NEAR(lp.primal, lp.dual, 1e-9);
        EXPECT_NEAR(lp.primal, f0_star(in), 1e-9);
        // The dual is an upper bound at every alpha.
        for (double a : {0.0, 0.13, 0.5, 0.77, 1.0}) EXPECT_GE(lp_dual_objective(a, in), lp.primal - 1e-12);
    }
}

TEST(BoxLp, InfeasibleBox) {
    const std::vector<double> w{1.0, 0.5}, lo{0.5, 0.5}, hi{0.6, 0.6};
    try {
        solve_box_lp(w, lo, hi, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleBox);
    }
    const auto ok = solve_box_lp(w, lo, hi, 1.1);
    EXPECT_NEAR(ok.value, 0.6 + 0.25, 1e-15);
}
