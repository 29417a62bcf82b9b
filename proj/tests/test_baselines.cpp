#include <hmsos/baselines.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hmsos;
using hmsos::testing::ConstantUniform;
using hmsos::testing::CountingProblem;
using hmsos::testing::sphere_problem;

TEST(Pso, InertiaSchedule) {
    PsoConfig c;
    c.nfe_max = 1000;
    EXPECT_EQ(pso_inertia(c, 0), 1.0);
    EXPECT_EQ(pso_inertia(c, 500), 0.5);
    EXPECT_EQ(pso_inertia(c, 1000), 0.0);
    EXPECT_EQ(pso_inertia(c, 1500), 0.0);
}

TEST(Pso, StationarySwarmStaysPut) {
    auto problem = sphere_problem(2, -5, 5);
    Swarm s;
    s.pop.nfe_max = 100;
    const Vector x{1.0, -2.0};
    s.pop.bids = {{x, 5.0, true}, {x, 5.0, true}};
    s.pop.best = s.pop.bids[0];
    s.velocity.assign(2, Vector{0.0, 0.0});
    s.personal_best = s.pop.bids;
    PsoConfig c;
    c.nfe_max = 100;
    ConstantUniform src{0.7};
    pso_step(s, c, problem, src);
    for (const auto& b : s.pop.bids) EXPECT_EQ(b.position, x);
    EXPECT_EQ(src.draws, 8U);
}

TEST(Pso, VelocityLimitedToBoxWidth) {
    auto problem = sphere_problem(1, 0, 1);
    Swarm s;
    s.pop.nfe_max = 100;
    s.pop.bids = {{{0.0}, 0.0, true}};
    s.pop.best = s.pop.bids[0];
    s.velocity = {{50.0}};
    s.personal_best = s.pop.bids;
    PsoConfig c;
    c.nfe_max = 100;
    ConstantUniform src{0.0};
    pso_step(s, c, problem, src);
    EXPECT_EQ(s.velocity[0][0], 1.0);
    EXPECT_EQ(s.pop.bids[0].position[0], 1.0);
}

TEST(Pso, RunBudgetDeterminismAndProgress) {
    CountingProblem cp(sphere_problem(5, -10, 10));
    PsoConfig c;
    c.nfe_max = 5000;
    const auto a = run_pso(cp.problem, c, 8);
    EXPECT_EQ(cp.count(), a.records.back().nfe);
    EXPECT_GT(a.records.back().nfe, c.nfe_max);
    EXPECT_LE(a.records.back().nfe, c.nfe_max + c.n_pop);
    EXPECT_LT(a.best.value, a.records.front().best_value);
    const auto b = run_pso(cp.problem, c, 8);
    EXPECT_EQ(a.records, b.records);
}

TEST(Gwo, ASchedule) {
    EXPECT_EQ(gwo_a(0, 100), 2.0);
    EXPECT_EQ(gwo_a(50, 100), 1.0);
    EXPECT_EQ(gwo_a(100, 100), 0.0);
    EXPECT_EQ(gwo_a(150, 100), 0.0);
}

TEST(Gwo, LeadersSortedAndDistinct) {
    Leaders l;
    l.offer({{1}, 5, true});
    l.offer({{2}, 3, true});
    l.offer({{2}, 3, true});
    l.offer({{3}, 4, true});
    l.offer({{4}, 9, true});
    l.offer({{5}, 1, true});
    EXPECT_EQ(l.wolves[0].value, 1);
    EXPECT_EQ(l.wolves[1].value, 3);
    EXPECT_EQ(l.wolves[2].value, 4);
}

TEST(Gwo, ZeroAMovesEveryWolfToLeaderMean) {
    auto problem = sphere_problem(2, -10, 10);
    Population pop;
    pop.nfe = 100;
    pop.nfe_max = 100;
    pop.bids = {{{5, 5}, 50, true}, {{-3, 1}, 10, true}};
    Leaders l;
    l.offer({{0, 0}, 0, true});
    l.offer({{3, 0}, 9, true});
    l.offer({{0, 6}, 36, true});
    ConstantUniform src{0.3};
    gwo_step(pop, l, problem, src);
    for (const auto& b : pop.bids) {
        EXPECT_DOUBLE_EQ(b.position[0], 1.0);
        EXPECT_DOUBLE_EQ(b.position[1], 2.0);
    }
    EXPECT_EQ(src.draws, 2U * 2U * 6U);
}

TEST(Gwo, RunBudgetDeterminismAndProgress) {
    CountingProblem cp(sphere_problem(5, -10, 10));
    GwoConfig c;
    c.nfe_max = 5000;
    const auto a = run_gwo(cp.problem, c, 8);
    EXPECT_EQ(cp.count(), a.records.back().nfe);
    EXPECT_GT(a.records.back().nfe, c.nfe_max);
    EXPECT_LE(a.records.back().nfe, c.nfe_max + c.n_pop);
    EXPECT_LT(a.best.value, 1e-3);
    const auto b = run_gwo(cp.problem, c, 8);
    EXPECT_EQ(a.records, b.records);
    GwoConfig bad;
    bad.n_pop = 2;
    EXPECT_THROW(run_gwo(cp.problem, bad, 1), ConfigurationError);
}

TEST(Pso, MedianFinalBelowMedianInitialOnSphere) {
    auto problem = sphere_problem(2, -5, 5);
    std::vector<double> init, fin;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PsoConfig c;
        c.nfe_max = 1000;
        const auto t = run_pso(problem, c, seed);
        init.push_back(t.records.front().best_value);
        fin.push_back(t.best.value);
    }
    std::sort(init.begin(), init.end());
    std::sort(fin.begin(), fin.end());
    EXPECT_LT(fin[5], init[5]);
}

TEST(Gwo, CoincidentPackContractsAsAVanishes) {
    auto problem = sphere_problem(2, -10, 10);
    const Vector p{2.0, -3.0};
    RngStream rng(3);
    for (std::uint64_t nfe : {90U, 99U, 100U}) {
        Population pop;
        pop.nfe = nfe;
        pop.nfe_max = 100;
        pop.bids = {{p, 13, true}, {p, 13, true}, {p, 13, true}};
        Leaders l;
        l.offer({p, 13, true});
        gwo_step(pop, l, problem, rng);
        const double a = gwo_a(nfe, 100);
        for (const auto& b : pop.bids)
            for (std::size_t j = 0; j < 2; ++j) EXPECT_LE(std::abs(b.position[j] - p[j]), a * std::abs(p[j]) + 1e-12);
    }
}
