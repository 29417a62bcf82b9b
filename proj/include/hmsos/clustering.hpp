#pragma once

/// @file clustering.hpp
/// @brief k-means grouping of a population in decision space and in the
/// one-dimensional objective space.

#include <hmsos/core.hpp>

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace hmsos {

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    std::vector<Vector> centroids;
    /// Mean objective value per cluster; empty until attach_mean_values().
    Vector mean_values;
    /// Within-cluster sum of squared distances.
    double inertia = 0.0;

    [[nodiscard]] std::vector<std::size_t> members(std::size_t cluster) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] == cluster) out.push_back(i);
        return out;
    }
};

struct KmeansOptions {
    std::size_t max_iters = 100;
    double tol = 1e-9;
    /// Independent seedings; the lowest-inertia result wins (first on ties).
    std::size_t restarts = 1;
};

namespace kmeans_detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

inline std::size_t nearest(const std::vector<Vector>& centroids, std::span<const double> p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(centroids[c], p);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline void validate_points(const std::vector<Vector>& points, std::size_t k) {
    if (points.empty()) throw ParameterError("kmeans: no points");
    if (k == 0) throw ParameterError("kmeans: k must be positive");
    if (k > points.size())
        throw ParameterError("kmeans: k=" + std::to_string(k) + " exceeds number of points " +
                             std::to_string(points.size()));
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw DimensionError("kmeans: points have unequal lengths");
}

/// k-means++ seeding: first centre uniform, then proportional to squared
/// distance from the nearest chosen centre. When every remaining distance is
/// zero the next centre is drawn uniformly.
inline std::vector<Vector> seed_plus_plus(const std::vector<Vector>& points, std::size_t k, RngStream& rng) {
    std::vector<Vector> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.index(points.size())]);
    Vector d2(points.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, squared_distance(c, points[i]));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = points.size() - 1;
        if (total > 0.0) {
            const double target = rng.uniform01() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += d2[i];
                if (target < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(points.size());
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

inline std::vector<Vector> mean_centroids(const std::vector<Vector>& points, const std::vector<std::size_t>& assign,
                                          std::size_t k) {
    const std::size_t dim = points.front().size();
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        ++counts[assign[i]];
        for (std::size_t j = 0; j < dim; ++j) sums[assign[i]][j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0)
            for (auto& x : sums[c]) x /= static_cast<double>(counts[c]);
    return sums;
}

} // namespace kmeans_detail

/// Sum of squared distances of every point to its assigned centroid.
inline double within_cluster_ss(const std::vector<Vector>& points, const Clustering& clustering) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        s += kmeans_detail::squared_distance(points[i], clustering.centroids[clustering.assignments[i]]);
    return s;
}

/// Moves the point farthest from its own centroid (taken from a cluster with
/// more than one member, lowest index on ties) into each empty cluster until
/// none is empty. Centroids are recomputed afterwards.
inline void repair_empty_clusters(const std::vector<Vector>& points, Clustering& clustering) {
    using namespace kmeans_detail;
    for (;;) {
        std::vector<std::size_t> counts(clustering.k, 0);
        for (auto a : clustering.assignments) ++counts[a];
        std::size_t empty = clustering.k;
        for (std::size_t c = 0; c < clustering.k; ++c)
            if (counts[c] == 0) {
                empty = c;
                break;
            }
        if (empty == clustering.k) break;

        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::size_t a = clustering.assignments[i];
            if (counts[a] < 2) continue;
            const double d = squared_distance(points[i], clustering.centroids[a]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        clustering.assignments[far] = empty;
        clustering.centroids[empty] = points[far];
    }
    clustering.centroids = mean_centroids(points, clustering.assignments, clustering.k);
}

/// One Lloyd iteration: assign to nearest centroid, repair empties, move
/// centroids to member means. Returns the largest squared centroid shift and
/// whether any assignment changed.
inline std::pair<double, bool> lloyd_iteration(const std::vector<Vector>& points, Clustering& clustering) {
    using namespace kmeans_detail;
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t c = nearest(clustering.centroids, points[i]);
        if (c != clustering.assignments[i]) {
            clustering.assignments[i] = c;
            changed = true;
        }
    }
    const auto previous = clustering.centroids;
    repair_empty_clusters(points, clustering);
    double shift = 0.0;
    for (std::size_t c = 0; c < clustering.k; ++c)
        shift = std::max(shift, squared_distance(previous[c], clustering.centroids[c]));
    clustering.inertia = within_cluster_ss(points, clustering);
    return {std::sqrt(shift), changed};
}

/// Lloyd's algorithm from k-means++ seeding. Stops when assignments are
/// stable, the largest centroid shift drops below tol, or after max_iters.
inline Clustering kmeans(const std::vector<Vector>& points, std::size_t k, RngStream& rng,
                         const KmeansOptions& options = {}) {
    using namespace kmeans_detail;
    validate_points(points, k);
    if (options.max_iters == 0) throw ParameterError("kmeans: max_iters must be positive");
    if (!(options.tol > 0.0)) throw ParameterError("kmeans: tol must be positive");

    Clustering best;
    bool have_best = false;
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
        Clustering cl;
        cl.k = k;
        cl.centroids = seed_plus_plus(points, k, rng);
        cl.assignments.assign(points.size(), k); // sentinel: every first assignment is a change
        for (std::size_t it = 0; it < options.max_iters; ++it) {
            const auto [shift, changed] = lloyd_iteration(points, cl);
            if (!changed || shift < options.tol) break;
        }
        if (!have_best || cl.inertia < best.inertia) {
            best = std::move(cl);
            have_best = true;
        }
    }
    return best;
}

/// Fills mean_values with the mean of `values` over each cluster's members.
inline void attach_mean_values(Clustering& clustering, std::span<const double> values) {
    if (values.size() != clustering.assignments.size())
        throw DimensionError("attach_mean_values: value count differs from assignment count");
    Vector sums(clustering.k, 0.0);
    std::vector<std::size_t> counts(clustering.k, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        sums[clustering.assignments[i]] += values[i];
        ++counts[clustering.assignments[i]];
    }
    clustering.mean_values.assign(clustering.k, 0.0);
    for (std::size_t c = 0; c < clustering.k; ++c)
        clustering.mean_values[c] = sums[c] / static_cast<double>(counts[c]);
}

/// Cluster with the lowest mean value; lowest index on ties.
inline std::size_t lowest_mean_cluster(const Clustering& clustering) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < clustering.k; ++c)
        if (clustering.mean_values[c] < clustering.mean_values[best]) best = c;
    return best;
}

struct WinnerCluster {
    std::size_t cluster = 0;
    /// Index into population.bids of the best member of the winner cluster.
    std::size_t bid_index = 0;
    Bid bid;
};

inline void require_evaluated(const Population& population, const char* where) {
    for (const auto& b : population.bids)
        if (!b.evaluated) throw ParameterError(std::string(where) + ": population not fully evaluated");
}

/// Groups bid positions with k-means, picks the cluster with the lowest mean
/// objective value and returns its best member W.
inline WinnerCluster winner_cluster_search_space(const Population& population, std::size_t k, RngStream& rng,
                                                 const KmeansOptions& options = {}) {
    require_evaluated(population, "winner_cluster_search_space");
    const auto values = population.values();
    auto cl = kmeans(population.positions(), k, rng, options);
    attach_mean_values(cl, values);
    WinnerCluster out;
    out.cluster = lowest_mean_cluster(cl);
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (cl.assignments[i] == out.cluster && values[i] < best_value) {
            best_value = values[i];
            out.bid_index = i;
        }
    }
    out.bid = population.bids[out.bid_index];
    return out;
}

/// Clusters the scalar objective values, picks the cluster with the lowest
/// mean value and returns the mean decision vector of its members.
inline Vector best_objective_centroid(const Population& population, std::size_t k, RngStream& rng,
                                      const KmeansOptions& options = {}) {
    require_evaluated(population, "best_objective_centroid");
    if (k > population.size()) throw ParameterError("best_objective_centroid: k exceeds population size");
    const auto values = population.values();
    std::vector<Vector> points;
    points.reserve(values.size());
    for (double v : values) points.push_back(Vector{v});
    auto cl = kmeans(points, k, rng, options);
    attach_mean_values(cl, values);
    const std::size_t winner = lowest_mean_cluster(cl);

    const std::size_t dim = population.bids.front().position.size();
    Vector centroid(dim, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (cl.assignments[i] != winner) continue;
        ++count;
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += population.bids[i].position[j];
    }
    for (auto& x : centroid) x /= static_cast<double>(count);
    return centroid;
}

} // namespace hmsos
