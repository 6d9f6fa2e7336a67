#include <gtest/gtest.h>

#include <cmath>

#include "pibounds/error.hpp"
#include "pibounds/error_rate.hpp"
#include "pibounds/fn_bounds.hpp"
#include "pibounds/inertia.hpp"
#include "pibounds/oracle.hpp"

using namespace pibounds;

namespace {

// Every map {0..m-1} -> {0..M-1}, surjective or not.
template <typename Fn>
void for_each_map(std::size_t m, std::size_t M, Fn&& fn) {
    std::vector<std::size_t> image(m, 0);
    while (true) {
        fn(image);
        std::size_t i = 0;
        while (i < m && ++image[i] == M) image[i++] = 0;
        if (i == m) return;
    }
}

bool onto(const std::vector<std::size_t>& image, std::size_t M) {
    std::vector<bool> hit(M, false);
    for (auto u : image) hit[u] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

}  // namespace

TEST(AggregateGM, Examples) {
    const ProbabilityVector p({0.4, 0.3, 0.2, 0.1});
    const auto id = aggregate_gM(p, 4);
    EXPECT_EQ(id.mapping, Surjection::identity(4));
    EXPECT_EQ(id.p_U, p);

    const auto one = aggregate_gM(p, 1);
    ASSERT_EQ(one.p_U.size(), 1u);
    EXPECT_NEAR(one.p_U[0], 1.0, 1e-12);

    const auto two = aggregate_gM(p, 2);
    EXPECT_NEAR(two.p_U[0], 0.9, 1e-12);
    EXPECT_NEAR(two.p_U[1], 0.1, 1e-12);
    EXPECT_EQ(two.mapping.image()[2], 0u);
    EXPECT_EQ(two.mapping.image()[3], 1u);
}

TEST(AggregateGM, Errors) {
    const ProbabilityVector p({0.4, 0.3, 0.2, 0.1});
    for (std::size_t M : {std::size_t{0}, std::size_t{5}}) {
        try {
            aggregate_gM(p, M);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::MOutOfRange);
        }
    }
    EXPECT_THROW(aggregate_gM(ProbabilityVector({0.1, 0.9}), 1), Error);
}

TEST(AggregateGM, MajorizesEveryFunction) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        Rng rng = instance_rng(31, s);
        const std::size_t m = 2 + s % 5;
        const auto p = random_probability_vector(m, rng, 0.6).sorted();
        for (std::size_t M = 1; M <= m; ++M) {
            const auto agg = aggregate_gM(p, M);
            for (std::size_t i = 0; i < M; ++i) {
                const double expect = i == 0 ? std::accumulate(p.begin(), p.begin() + (m - M + 1), 0.0) : p[m - M + i];
                EXPECT_NEAR(agg.p_U[i], expect, 1e-12);
            }
            for_each_map(m, M, [&](const std::vector<std::size_t>& image) {
                if (!onto(image, M)) return;
                std::vector<double> q(M, 0.0);
                for (std::size_t x = 0; x < m; ++x) q[image[x]] += p[x];
                EXPECT_TRUE(majorizes(agg.p_U, ProbabilityVector(q)));
            });
        }
    }
}

TEST(PeMBound, Examples) {
    const auto u4 = ProbabilityVector::uniform(4);
    EXPECT_NEAR(peM_bound(u4, 0.0, 2, FunctionMeasure::MaxCorrelation).value, 0.25, 1e-12);
    EXPECT_NEAR(peM_bound(u4, 0.2, 2, FunctionMeasure::MaxCorrelation).value, 0.25 - 0.2 * std::sqrt(0.375), 1e-12);
    EXPECT_NEAR(peM_bound(u4, 0.2, 2, FunctionMeasure::MaxCorrelation).value, 0.1275, 1e-4);
    EXPECT_NEAR(peM_bound(ProbabilityVector::uniform(2), 0.5, 2, FunctionMeasure::MutualInformation).value, 0.1100,
                1e-3);
    EXPECT_EQ(peM_bound(u4, 0.8, 2, FunctionMeasure::MaxCorrelation).value, 0.0);
    EXPECT_LT(peM_bound(u4, 0.8, 2, FunctionMeasure::MaxCorrelation).raw, 0.0);
}

TEST(PeMBound, Errors) {
    const auto u4 = ProbabilityVector::uniform(4);
    const auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code([&] { peM_bound(u4, -0.1, 2, FunctionMeasure::MaxCorrelation); }), ErrorCode::NegativeTheta);
    EXPECT_EQ(code([&] { peM_bound(u4, 1.5, 2, FunctionMeasure::MaxCorrelation); }), ErrorCode::ThetaOutOfRange);
    EXPECT_EQ(code([&] { peM_bound(u4, 0.1, 5, FunctionMeasure::MutualInformation); }), ErrorCode::MOutOfRange);
}

TEST(PeMBound, FullRangeMatchesWeakClosedForm) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng = instance_rng(32, s);
        const std::size_t m = 2 + s % 6;
        const auto p = random_probability_vector(m, rng).sorted();
        const double rho = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        EXPECT_NEAR(peM_bound(p, rho, m, FunctionMeasure::MaxCorrelation).value,
                    corollary_maxcorr_bound(p, rho * rho).weak_closed_form.value, 1e-12);
    }
}

TEST(PeMBound, MonotoneInM) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng = instance_rng(33, s);
        const std::size_t m = 3 + s % 5;
        const auto p = random_probability_vector(m, rng).sorted();
        for (auto measure : {FunctionMeasure::MaxCorrelation, FunctionMeasure::MutualInformation}) {
            for (std::size_t M = 2; M <= m; ++M)
                EXPECT_LE(peM_bound(p, 0.3, M - 1, measure).value, peM_bound(p, 0.3, M, measure).value + 1e-12);
        }
    }
}

TEST(Stirling, SmallValues) {
    EXPECT_EQ(stirling2(4, 2), 7.0);
    EXPECT_EQ(stirling2(5, 3), 25.0);
    EXPECT_EQ(stirling2(10, 5), 42525.0);
    EXPECT_EQ(stirling2(6, 1), 1.0);
    EXPECT_EQ(stirling2(6, 6), 1.0);
}

TEST(BruteForce, Examples) {
    const auto j = random_joint(4, 3, 41);
    EXPECT_NEAR(peM_bruteforce(j, 4).value, bayes_error(j), 1e-15);
    EXPECT_NEAR(peM_bruteforce(j, 1).value, 0.0, 1e-15);

    const double rho = maximal_correlation(decompose(j));
    const auto r = peM_bruteforce(j, 2);
    EXPECT_GE(r.value, peM_bound(j.row_marginal(), rho, 2, FunctionMeasure::MaxCorrelation).value - 1e-9);
    EXPECT_NEAR(function_bayes_error(j, r.argmin), r.value, 1e-15);
}

TEST(BruteForce, MatchesExplicitEnumeration) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::size_t m = 2 + s % 4;
        const auto j = random_joint(m, 3, 60 + s, 0.5);
        for (std::size_t M = 1; M <= m; ++M) {
            double best = 1.0;
            for_each_map(m, M, [&](const std::vector<std::size_t>& image) {
                if (onto(image, M)) best = std::min(best, function_bayes_error(j, Surjection(image, M)));
            });
            EXPECT_NEAR(peM_bruteforce(j, M).value, best, 1e-15);
        }
    }
}

TEST(BruteForce, MonotoneInM) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto j = random_joint(5, 3, 80 + s);
        for (std::size_t M = 2; M <= 5; ++M) EXPECT_LE(peM_bruteforce(j, M - 1).value, peM_bruteforce(j, M).value + 1e-15);
    }
}

TEST(BruteForce, Cap) {
    const auto big = random_joint(11, 2, 1);
    EXPECT_THROW(peM_bruteforce(big, 2), Error);
    const auto ten = random_joint(10, 2, 1);
    try {
        peM_bruteforce(ten, 6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooLarge);
    }
    EXPECT_NO_THROW(peM_bruteforce(ten, 6, 1e8));
}

TEST(BruteForce, SoundnessBothMeasures) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t m = 2 + s % 4, n = 2 + (s / 4) % 4;
        const auto j = random_joint(m, n, 1500 + s, s % 2 ? 0.5 : 1.0);
        const double rho = maximal_correlation(decompose(j));
        const double info = mutual_information_bits(j);
        for (std::size_t M = 1; M <= m; ++M) {
            const double exact = peM_bruteforce(j, M).value;
            EXPECT_GE(exact, peM_bound(j.row_marginal(), rho, M, FunctionMeasure::MaxCorrelation).value - 1e-9);
            EXPECT_GE(exact, peM_bound(j.row_marginal(), info, M, FunctionMeasure::MutualInformation).value - 1e-9);
        }
    }
}
