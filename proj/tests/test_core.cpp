#include <hmsos/core.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <set>

using namespace hmsos;
using hmsos::testing::CountingProblem;
using hmsos::testing::sphere_problem;

TEST(RngStream, SameSeedSameSequence) {
    RngStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform01(), b.uniform01());
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(RngStream, Uniform01StaysInUnitInterval) {
    RngStream rng(7);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.01);
    EXPECT_LT(lo, 0.001);
    EXPECT_GT(hi, 0.999);
}

TEST(RngStream, NormalMoments) {
    RngStream rng(11);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        ASSERT_TRUE(std::isfinite(z));
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(RngStream, UniformIntCoversInclusiveRange) {
    RngStream rng(3);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.uniform_int(2, 5);
        ASSERT_GE(v, 2);
        ASSERT_LE(v, 5);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 4U);
    EXPECT_EQ(rng.uniform_int(4, 4), 4);
    EXPECT_THROW(rng.uniform_int(5, 4), ParameterError);
}

TEST(SearchBounds, ValidateRejectsDegenerateBox) {
    EXPECT_NO_THROW(SearchBounds::uniform(3, -1, 1).validate());
    EXPECT_THROW((SearchBounds{{0.0, 1.0}, {1.0, 1.0}}.validate()), ConfigurationError);
    EXPECT_THROW((SearchBounds{{0.0}, {1.0, 2.0}}.validate()), ConfigurationError);
    EXPECT_THROW((SearchBounds{{}, {}}.validate()), ConfigurationError);
}

TEST(Clamp, Examples) {
    const SearchBounds b{{-1.0, 0.0}, {1.0, 2.0}};
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{-3.0, 5.0}, b), (Vector{-1.0, 2.0}));
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{0.25, 1.5}, b), (Vector{0.25, 1.5}));
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{1.0, 0.0}, b), (Vector{1.0, 0.0}));
    EXPECT_THROW(clamp_to_bounds(std::vector<double>{0.0}, b), DimensionError);
}

TEST(Clamp, IdempotentAndInsideBox) {
    RngStream rng(5);
    const auto b = SearchBounds::uniform(4, -2.0, 3.0);
    for (int t = 0; t < 500; ++t) {
        Vector x(4);
        for (auto& v : x) v = rng.uniform(-10.0, 10.0);
        const auto once = clamp_to_bounds(x, b);
        EXPECT_EQ(clamp_to_bounds(once, b), once);
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_GE(once[j], -2.0);
            EXPECT_LE(once[j], 3.0);
        }
    }
}

TEST(Population, InitWithinBoundsAndCounted) {
    CountingProblem cp(sphere_problem(3, -5.0, 2.0));
    RngStream rng(1);
    const auto pop = init_population(cp.problem, 20, rng, 100);
    EXPECT_EQ(pop.size(), 20U);
    EXPECT_EQ(pop.nfe, 20U);
    EXPECT_EQ(cp.count(), 20U);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& bid : pop.bids) {
        ASSERT_TRUE(bid.evaluated);
        for (double v : bid.position) {
            EXPECT_GE(v, -5.0);
            EXPECT_LT(v, 2.0);
        }
        best = std::min(best, bid.value);
    }
    EXPECT_EQ(pop.best.value, best);
}

TEST(Population, InitRejectsTinyPopulation) {
    RngStream rng(1);
    EXPECT_THROW(init_population(sphere_problem(2), 1, rng), ConfigurationError);
}

TEST(Population, EvaluateOnlyTouchesUnevaluatedBids) {
    CountingProblem cp(sphere_problem(2));
    RngStream rng(2);
    auto pop = init_population(cp.problem, 5, rng);
    pop.bids[1].position = {0.5, 0.5};
    pop.bids[1].evaluated = false;
    pop.bids[3].position = {0.0, 0.0};
    pop.bids[3].evaluated = false;
    evaluate(pop, cp.problem);
    EXPECT_EQ(pop.nfe, 7U);
    EXPECT_EQ(cp.count(), 7U);
    EXPECT_DOUBLE_EQ(pop.bids[1].value, 0.5);
    EXPECT_EQ(pop.best.value, 0.0);
    EXPECT_EQ(pop.best.position, (Vector{0.0, 0.0}));
}

TEST(Population, BestOnlyUpdatesOnStrictImprovement) {
    auto problem = sphere_problem(1);
    Population pop;
    pop.charge(problem, std::vector<double>{0.5});
    pop.charge(problem, std::vector<double>{-0.5});
    EXPECT_EQ(pop.best.position, (Vector{0.5}));
    pop.charge(problem, std::vector<double>{0.1});
    EXPECT_EQ(pop.best.position, (Vector{0.1}));
    EXPECT_EQ(pop.nfe, 3U);
}

TEST(Population, NonFiniteObjectiveAbortsWithPosition) {
    ObjectiveProblem p{"nan", 2, SearchBounds::uniform(2, -1, 1),
                       [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); },
                       std::nullopt};
    Population pop;
    try {
        pop.charge(p, std::vector<double>{0.25, -0.75});
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("nan"), std::string::npos);
        EXPECT_NE(msg.find("0.25"), std::string::npos);
        EXPECT_NE(msg.find("-0.75"), std::string::npos);
    }
    EXPECT_EQ(pop.nfe, 1U);
}

TEST(ObjectiveProblem, ValidateCatchesMismatches) {
    auto p = sphere_problem(3);
    EXPECT_NO_THROW(p.validate());
    p.dimension = 2;
    EXPECT_THROW(p.validate(), DimensionError);
    p = sphere_problem(3);
    p.evaluator = nullptr;
    EXPECT_THROW(p.validate(), ConfigurationError);
}

TEST(Population, InitExampleSmallBox) {
    RngStream rng(4);
    const auto pop = init_population(sphere_problem(2), 4, rng);
    EXPECT_EQ(pop.size(), 4U);
    EXPECT_EQ(pop.nfe, 4U);
    for (const auto& b : pop.bids)
        for (double v : b.position) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(Population, SameSeedSamePopulation) {
    RngStream a(8), b(8);
    const auto p = init_population(sphere_problem(3), 6, a);
    const auto q = init_population(sphere_problem(3), 6, b);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(p.bids[i].position, q.bids[i].position);
        EXPECT_EQ(p.bids[i].value, q.bids[i].value);
    }
}

TEST(Clamp, ListedExamples) {
    const auto sq = SearchBounds::uniform(2, -1, 1);
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{1.5, -2.0}, sq), (Vector{1.0, -1.0}));
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{0.3, 0.7}, sq), (Vector{0.3, 0.7}));
    EXPECT_EQ(clamp_to_bounds(std::vector<double>{-5, 0, 5}, SearchBounds::uniform(3, 0, 1)), (Vector{0, 0, 1}));
}

TEST(Population, EvaluateExamples) {
    CountingProblem cp(sphere_problem(2));
    Population pop;
    pop.bids = {{{0, 0}, 0, false}, {{0.5, 0}, 0, false}, {{0, 1}, 0, false}};
    evaluate(pop, cp.problem);
    EXPECT_EQ(pop.nfe, 3U);
    EXPECT_EQ(pop.bids[0].value, 0.0);
    evaluate(pop, cp.problem);
    EXPECT_EQ(pop.nfe, 3U);
    EXPECT_EQ(cp.count(), 3U);
}
