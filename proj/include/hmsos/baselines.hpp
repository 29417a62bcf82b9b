#pragma once

/// @file baselines.hpp
/// @brief Comparison optimizers: global-best PSO and grey wolf optimizer.
///
/// Both use the shared Population ledger, clamp positions after every move,
/// and stop under the same loop guard as HMS (iterate while nfe <= nfe_max).
/// Their schedules (inertia, GWO's a) are driven by nfe / nfe_max.

#include <hmsos/core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace hmsos {

// ---------------------------------------------------------------------------
// PSO
// ---------------------------------------------------------------------------

struct PsoConfig {
    std::size_t n_pop = 50;
    double c1 = 2.0;
    double c2 = 2.0;
    double w_start = 1.0;
    double w_end = 0.0;
    std::uint64_t nfe_max = 30000;

    void validate() const {
        if (n_pop < 2) throw ConfigurationError("pso: n_pop must be at least 2");
        if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ConfigurationError("pso: c1, c2 must be non-negative");
        if (!std::isfinite(w_start) || !std::isfinite(w_end)) throw ConfigurationError("pso: inertia must be finite");
        if (nfe_max == 0) throw ConfigurationError("pso: nfe_max must be positive");
    }
};

/// Inertia weight, linear from w_start at nfe = 0 to w_end at nfe_max, held at
/// w_end beyond the budget.
inline double pso_inertia(const PsoConfig& config, std::uint64_t nfe) {
    const double frac = std::min(1.0, static_cast<double>(nfe) / static_cast<double>(config.nfe_max));
    return config.w_start + (config.w_end - config.w_start) * frac;
}

struct Swarm {
    Population pop;
    std::vector<Vector> velocity;
    std::vector<Bid> personal_best;
};

/// One synchronous PSO update:
///   v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x),  x <- x + v
/// with |v_j| limited to the width of coordinate j's box. Draw order per
/// particle per coordinate: r1 then r2. Personal bests are refreshed after
/// the swarm is re-evaluated.
template <UniformSource Rng>
void pso_step(Swarm& swarm, const PsoConfig& config, const ObjectiveProblem& problem, Rng& rng) {
    const double w = pso_inertia(config, swarm.pop.nfe);
    const Vector gbest = swarm.pop.best.position;
    for (std::size_t i = 0; i < swarm.pop.size(); ++i) {
        auto& x = swarm.pop.bids[i].position;
        auto& v = swarm.velocity[i];
        const auto& p = swarm.personal_best[i].position;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double r1 = rng.uniform01();
            const double r2 = rng.uniform01();
            const double vmax = problem.bounds.upper[j] - problem.bounds.lower[j];
            v[j] = w * v[j] + config.c1 * r1 * (p[j] - x[j]) + config.c2 * r2 * (gbest[j] - x[j]);
            v[j] = std::clamp(v[j], -vmax, vmax);
            x[j] += v[j];
        }
        clamp_in_place(x, problem.bounds);
        swarm.pop.bids[i].evaluated = false;
    }
    evaluate(swarm.pop, problem);
    for (std::size_t i = 0; i < swarm.pop.size(); ++i)
        if (swarm.pop.bids[i].value < swarm.personal_best[i].value) swarm.personal_best[i] = swarm.pop.bids[i];
}

inline RunTrace run_pso(const ObjectiveProblem& problem, const PsoConfig& config, std::uint64_t seed) {
    config.validate();
    problem.validate();
    RngStream rng(seed);
    Swarm swarm;
    swarm.pop = init_population(problem, config.n_pop, rng, config.nfe_max);
    swarm.velocity.assign(config.n_pop, Vector(problem.dimension, 0.0));
    swarm.personal_best = swarm.pop.bids;

    RunTrace trace;
    trace.algorithm = "pso";
    trace.function = problem.name;
    trace.seed = seed;
    trace.record(swarm.pop);
    while (swarm.pop.nfe <= config.nfe_max) {
        pso_step(swarm, config, problem, rng);
        trace.record(swarm.pop);
    }
    trace.best = swarm.pop.best;
    return trace;
}

// ---------------------------------------------------------------------------
// GWO
// ---------------------------------------------------------------------------

struct GwoConfig {
    std::size_t n_pop = 50;
    std::uint64_t nfe_max = 30000;

    void validate() const {
        if (n_pop < 3) throw ConfigurationError("gwo: n_pop must be at least 3");
        if (nfe_max == 0) throw ConfigurationError("gwo: nfe_max must be positive");
    }
};

/// Encircling coefficient a, linear 2 -> 0 over the budget, clamped at 0.
inline double gwo_a(std::uint64_t nfe, std::uint64_t nfe_max) {
    const double a = 2.0 - 2.0 * static_cast<double>(nfe) / static_cast<double>(nfe_max);
    return a > 0.0 ? a : 0.0;
}

/// Alpha, beta and delta wolves: the three best distinct positions seen so far.
struct Leaders {
    std::array<Bid, 3> wolves;

    void offer(const Bid& candidate) {
        for (const auto& w : wolves)
            if (w.evaluated && w.position == candidate.position) return;
        for (std::size_t k = 0; k < wolves.size(); ++k) {
            if (!wolves[k].evaluated || candidate.value < wolves[k].value) {
                for (std::size_t m = wolves.size() - 1; m > k; --m) wolves[m] = wolves[m - 1];
                wolves[k] = candidate;
                return;
            }
        }
    }

    void offer_all(const Population& pop) {
        for (const auto& b : pop.bids) offer(b);
    }
};

/// One GWO position update. For each wolf and coordinate, per leader
/// (alpha, beta, delta in that order) draw r1, r2 and form
///   A = 2 a r1 - a,  C = 2 r2,  D = |C x_lead - x|,  X_k = x_lead - A D,
/// then x <- (X_1 + X_2 + X_3) / 3.
template <UniformSource Rng>
void gwo_step(Population& pop, Leaders& leaders, const ObjectiveProblem& problem, Rng& rng) {
    const double a = gwo_a(pop.nfe, pop.nfe_max);
    std::array<Vector, 3> lead;
    for (std::size_t k = 0; k < 3; ++k)
        lead[k] = leaders.wolves[k].evaluated ? leaders.wolves[k].position : leaders.wolves[0].position;
    for (auto& bid : pop.bids) {
        auto& x = bid.position;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                const double r1 = rng.uniform01();
                const double r2 = rng.uniform01();
                const double big_a = 2.0 * a * r1 - a;
                const double big_c = 2.0 * r2;
                const double d = std::abs(big_c * lead[k][j] - x[j]);
                sum += lead[k][j] - big_a * d;
            }
            x[j] = sum / 3.0;
        }
        clamp_in_place(x, problem.bounds);
        bid.evaluated = false;
    }
    evaluate(pop, problem);
    leaders.offer_all(pop);
}

inline RunTrace run_gwo(const ObjectiveProblem& problem, const GwoConfig& config, std::uint64_t seed) {
    config.validate();
    problem.validate();
    RngStream rng(seed);
    Population pop = init_population(problem, config.n_pop, rng, config.nfe_max);
    Leaders leaders;
    leaders.offer_all(pop);

    RunTrace trace;
    trace.algorithm = "gwo";
    trace.function = problem.name;
    trace.seed = seed;
    trace.record(pop);
    while (pop.nfe <= config.nfe_max) {
        gwo_step(pop, leaders, problem, rng);
        trace.record(pop);
    }
    trace.best = pop.best;
    return trace;
}

} // namespace hmsos
