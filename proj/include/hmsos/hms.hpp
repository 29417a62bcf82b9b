#pragma once

/// @file hms.hpp
/// @brief Standard Human Mental Search: Levy-flight mental search around each
/// bid, k-means grouping in decision space, and movement toward the best bid
/// of the winner cluster.
///
/// Random draw order within one iteration (the contract the HMS-OS collapse
/// test depends on):
///   1. for each bid i in order: q_i (draw_q), then beta_i, then for each of
///      the q_i candidates the (u, v) pairs coordinate by coordinate;
///   2. k-means++ seeding and Lloyd iterations for the search-space grouping;
///   3. for each bid i in order, one r per coordinate for movement.

#include <hmsos/clustering.hpp>
#include <hmsos/core.hpp>
#include <hmsos/levy.hpp>

#include <cstdint>
#include <string>

namespace hmsos {

struct HmsConfig {
    std::size_t n_pop = 50;
    std::size_t k_search = 5;
    double c = 1.0;
    std::int64_t m_low = 2;
    std::int64_t m_high = 5;
    double beta_low = 0.3;
    double beta_high = 1.99;
    std::uint64_t nfe_max = 30000;
    KmeansOptions kmeans{};

    void validate() const {
        if (n_pop < 2) throw ConfigurationError("hms: n_pop must be at least 2");
        if (k_search < 1 || k_search > n_pop) throw ConfigurationError("hms: k_search must lie in [1, n_pop]");
        if (m_low < 1) throw ConfigurationError("hms: m_low must be positive");
        if (m_low > m_high) throw ConfigurationError("hms: m_low must not exceed m_high");
        if (!(beta_low > 0.0 && beta_high < 2.0 && beta_low <= beta_high))
            throw ConfigurationError("hms: beta range must lie within (0, 2)");
        if (!std::isfinite(c)) throw ConfigurationError("hms: C must be finite");
        if (nfe_max == 0) throw ConfigurationError("hms: nfe_max must be positive");
    }
};

/// Number of Levy candidates for one bid, uniform on [m_low, m_high].
inline std::int64_t draw_q(const HmsConfig& config, RngStream& rng) {
    return rng.uniform_int(config.m_low, config.m_high);
}

/// Generates q Levy candidates around `bid`, clamps and evaluates each, and
/// returns the best candidate if it strictly improves on `bid`. The decay
/// factor uses the ledger's nfe at the start of the batch. `x_star` is
/// copied before any evaluation so the batch sees a fixed reference point.
inline Bid mental_search(const Bid& bid, const Vector& x_star, std::int64_t q, const ObjectiveProblem& problem,
                         const HmsConfig& config, Population& ledger, RngStream& rng) {
    if (q < 1) throw ParameterError("mental_search: q must be positive");
    if (!bid.evaluated) throw ParameterError("mental_search: bid not evaluated");
    const Vector reference = x_star;
    const double beta = rng.uniform(config.beta_low, config.beta_high);
    const std::uint64_t nfe_at_start = ledger.nfe;

    Bid best_candidate;
    for (std::int64_t j = 0; j < q; ++j) {
        Vector candidate = levy::levy_step(bid.position, reference, beta, nfe_at_start, ledger.nfe_max, rng);
        clamp_in_place(candidate, problem.bounds);
        const double value = ledger.charge(problem, candidate);
        if (!best_candidate.evaluated || value < best_candidate.value) {
            best_candidate.position = std::move(candidate);
            best_candidate.value = value;
            best_candidate.evaluated = true;
        }
    }
    return best_candidate.value < bid.value ? best_candidate : bid;
}

/// x_i <- x_i + C (r W - x_i), r fresh per coordinate; clamps, then
/// re-evaluates all bids (charging n_pop evaluations unconditionally).
template <UniformSource Rng>
Population& movement_standard(Population& population, const Bid& w, double c, const ObjectiveProblem& problem,
                              Rng& rng) {
    if (!w.evaluated) throw ParameterError("movement_standard: W not evaluated");
    const Vector target = w.position;
    for (auto& bid : population.bids) {
        for (std::size_t j = 0; j < bid.position.size(); ++j) {
            const double r = rng.uniform01();
            bid.position[j] += c * (r * target[j] - bid.position[j]);
        }
        clamp_in_place(bid.position, problem.bounds);
        bid.evaluated = false;
    }
    return evaluate(population, problem);
}

/// Runs standard HMS until the loop check finds nfe > nfe_max. The trace
/// holds one record after initialisation and one after every iteration.
inline RunTrace run_hms(const ObjectiveProblem& problem, const HmsConfig& config, std::uint64_t seed) {
    config.validate();
    problem.validate();
    RngStream rng(seed);
    Population pop = init_population(problem, config.n_pop, rng, config.nfe_max);

    RunTrace trace;
    trace.algorithm = "hms";
    trace.function = problem.name;
    trace.seed = seed;
    trace.record(pop);

    while (pop.nfe <= config.nfe_max) {
        for (auto& bid : pop.bids) {
            const std::int64_t q = draw_q(config, rng);
            bid = mental_search(bid, pop.best.position, q, problem, config, pop, rng);
        }
        const auto winner = winner_cluster_search_space(pop, config.k_search, rng, config.kmeans);
        movement_standard(pop, winner.bid, config.c, problem, rng);
        trace.record(pop);
    }
    trace.best = pop.best;
    return trace;
}

} // namespace hmsos
