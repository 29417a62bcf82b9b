#pragma once

/// @file hms_os.hpp
/// @brief HMS-OS: HMS with grouping in both decision and objective space and
/// a rank-proportional number of mental searches per bid.
///
/// The two features are switchable so the same driver covers the ablation
/// variants:
///   adaptive_count  dual_clustering
///        true            true         HMS-OS
///        true            false        HMS-OS-V1 (adaptive count only)
///        false           true         HMS-OS-V2 (dual clustering only)
///        false           false        standard HMS with C = c1
///
/// Draw order matches hms.hpp. With adaptive_count on, no q draws are made.
/// With dual_clustering on, the search-space grouping consumes its draws
/// before the objective-space grouping, and movement then draws one r per
/// coordinate (two when independent_r is set: r1 then r2).

#include <hmsos/clustering.hpp>
#include <hmsos/core.hpp>
#include <hmsos/hms.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hmsos {

struct HmsOsConfig {
    HmsConfig base{.n_pop = 50, .k_search = 5, .c = 1.5, .m_low = 2, .m_high = 10};
    std::size_t k_objective = 10;
    double c1 = 1.5;
    double c2 = 1.5;
    bool adaptive_count = true;
    bool dual_clustering = true;
    /// Separate r vectors for the W and x-bar terms. Off by default.
    bool independent_r = false;

    void validate() const {
        base.validate();
        if (k_objective < 1 || k_objective > base.n_pop)
            throw ConfigurationError("hms-os: k_objective must lie in [1, n_pop]");
        if (!std::isfinite(c1) || !std::isfinite(c2)) throw ConfigurationError("hms-os: c1, c2 must be finite");
    }

    [[nodiscard]] std::string variant_name() const {
        if (adaptive_count && dual_clustering) return "hms-os";
        if (adaptive_count) return "hms-os-v1";
        if (dual_clustering) return "hms-os-v2";
        return "hms";
    }
};

/// M_L + round(((n_pop - rank + 1) / n_pop) * (M_H - M_L)), round half away
/// from zero. Rank 1 is the best bid.
inline std::int64_t adaptive_count(std::size_t rank, std::size_t n_pop, std::int64_t m_low, std::int64_t m_high) {
    if (n_pop == 0 || rank < 1 || rank > n_pop)
        throw ParameterError("adaptive_count: rank " + std::to_string(rank) + " outside [1, " +
                             std::to_string(n_pop) + "]");
    if (m_low > m_high) throw ParameterError("adaptive_count: m_low exceeds m_high");
    const double share = static_cast<double>(n_pop - rank + 1) / static_cast<double>(n_pop);
    return m_low + static_cast<std::int64_t>(std::round(share * static_cast<double>(m_high - m_low)));
}

/// Rank per bid (1 = lowest value), ties broken by bid index.
inline std::vector<std::size_t> rank_population(const Population& population) {
    require_evaluated(population, "rank_population");
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return population.bids[a].value < population.bids[b].value;
    });
    std::vector<std::size_t> ranks(population.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
    return ranks;
}

/// x_i <- x_i + c1 r (W - x_i) + c2 r (x_bar - x_i); clamps and re-evaluates
/// all bids.
template <UniformSource Rng>
Population& movement_dual(Population& population, const Bid& w, const Vector& x_bar, double c1, double c2,
                          const ObjectiveProblem& problem, Rng& rng, bool independent_r = false) {
    if (!w.evaluated) throw ParameterError("movement_dual: W not evaluated");
    if (x_bar.size() != w.position.size()) throw DimensionError("movement_dual: x_bar dimension mismatch");
    const Vector target = w.position;
    const Vector mid = x_bar;
    for (auto& bid : population.bids) {
        for (std::size_t j = 0; j < bid.position.size(); ++j) {
            const double r1 = rng.uniform01();
            const double r2 = independent_r ? rng.uniform01() : r1;
            const double x = bid.position[j];
            bid.position[j] = x + c1 * r1 * (target[j] - x) + c2 * r2 * (mid[j] - x);
        }
        clamp_in_place(bid.position, problem.bounds);
        bid.evaluated = false;
    }
    return evaluate(population, problem);
}

inline RunTrace run_hms_os(const ObjectiveProblem& problem, const HmsOsConfig& config, std::uint64_t seed) {
    config.validate();
    problem.validate();
    const HmsConfig& base = config.base;
    RngStream rng(seed);
    Population pop = init_population(problem, base.n_pop, rng, base.nfe_max);

    RunTrace trace;
    trace.algorithm = config.variant_name();
    trace.function = problem.name;
    trace.seed = seed;
    trace.record(pop);

    std::vector<std::size_t> ranks;
    while (pop.nfe <= base.nfe_max) {
        if (config.adaptive_count) ranks = rank_population(pop);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::int64_t q = config.adaptive_count
                                       ? adaptive_count(ranks[i], base.n_pop, base.m_low, base.m_high)
                                       : draw_q(base, rng);
            pop.bids[i] = mental_search(pop.bids[i], pop.best.position, q, problem, base, pop, rng);
        }
        const auto winner = winner_cluster_search_space(pop, base.k_search, rng, base.kmeans);
        if (config.dual_clustering) {
            const Vector x_bar = best_objective_centroid(pop, config.k_objective, rng, base.kmeans);
            movement_dual(pop, winner.bid, x_bar, config.c1, config.c2, problem, rng, config.independent_r);
        } else {
            movement_standard(pop, winner.bid, config.c1, problem, rng);
        }
        trace.record(pop);
    }
    trace.best = pop.best;
    return trace;
}

} // namespace hmsos
