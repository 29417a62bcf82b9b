#pragma once

/// @file core.hpp
/// @brief Domain types shared by every optimizer: bids, bounds, problems, the
/// seeded random stream and the evaluation-budget ledger.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmsos {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid bounds, unknown names, invariant-violating overrides.
struct ConfigurationError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
struct ParameterError : Error {
    using Error::Error;
};

/// Objective returned a non-finite value. Aborts the run.
struct EvaluationError : Error {
    using Error::Error;
};

namespace detail {

inline std::string format_vector(std::span<const double> v) {
    std::ostringstream out;
    out.precision(17);
    out << '[';
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j != 0) out << ", ";
        out << v[j];
    }
    out << ']';
    return out.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Random stream
// ---------------------------------------------------------------------------

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the distributions are implemented here rather
/// than taken from <random> because the library distributions are
/// implementation-defined and would break cross-platform reproducibility.
///
/// Draw accounting: uniform01() consumes one engine word, normal() two,
/// uniform_int() one or more (rejection sampling).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (cosine branch only, no caching).
    double normal() noexcept {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw ParameterError("uniform_int: empty range");
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(engine_()); // full 64-bit range
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return lo + static_cast<std::int64_t>(x % range);
    }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Anything that can hand out uniform [0,1) draws. Movement operators accept
/// this so tests can force r to fixed values.
template <typename R>
concept UniformSource = requires(R& r) {
    { r.uniform01() } -> std::convertible_to<double>;
};

/// Additionally supplies standard normal draws (Levy steps).
template <typename R>
concept NormalSource = UniformSource<R> && requires(R& r) {
    { r.normal() } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

struct SearchBounds {
    Vector lower;
    Vector upper;

    [[nodiscard]] std::size_t dimension() const noexcept { return lower.size(); }

    /// Throws ConfigurationError unless lower[j] < upper[j] for all j.
    void validate() const {
        if (lower.size() != upper.size())
            throw ConfigurationError("bounds: lower and upper have different lengths");
        if (lower.empty()) throw ConfigurationError("bounds: zero dimension");
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (!(lower[j] < upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
                throw ConfigurationError("bounds: lower >= upper in coordinate " + std::to_string(j));
            }
        }
    }

    static SearchBounds uniform(std::size_t dimension, double lo, double hi) {
        return {Vector(dimension, lo), Vector(dimension, hi)};
    }
};

using Evaluator = std::function<double(std::span<const double>)>;

struct ObjectiveProblem {
    std::string name;
    std::size_t dimension = 0;
    SearchBounds bounds;
    Evaluator evaluator;
    std::optional<double> optimum_value;

    void validate() const {
        if (dimension == 0) throw ConfigurationError("problem: dimension must be positive");
        bounds.validate();
        if (bounds.dimension() != dimension)
            throw DimensionError("problem: bounds dimension differs from problem dimension");
        if (!evaluator) throw ConfigurationError("problem: missing evaluator");
    }
};

// ---------------------------------------------------------------------------
// Bids and population
// ---------------------------------------------------------------------------

struct Bid {
    Vector position;
    double value = std::numeric_limits<double>::infinity();
    bool evaluated = false;
};

/// Candidate solutions plus the best-so-far bid and the evaluation ledger.
/// Every objective evaluation goes through `charge`, which is the only place
/// nfe is incremented.
struct Population {
    std::vector<Bid> bids;
    Bid best;
    std::uint64_t nfe = 0;
    std::uint64_t nfe_max = 1;

    [[nodiscard]] std::size_t size() const noexcept { return bids.size(); }

    [[nodiscard]] Vector values() const {
        Vector out;
        out.reserve(bids.size());
        for (const auto& b : bids) out.push_back(b.value);
        return out;
    }

    [[nodiscard]] std::vector<Vector> positions() const {
        std::vector<Vector> out;
        out.reserve(bids.size());
        for (const auto& b : bids) out.push_back(b.position);
        return out;
    }

    /// Evaluates `position`, charges one evaluation and updates `best` on
    /// strict improvement.
    double charge(const ObjectiveProblem& problem, std::span<const double> position) {
        const double value = problem.evaluator(position);
        ++nfe;
        if (!std::isfinite(value)) {
            throw EvaluationError("objective '" + problem.name + "' returned non-finite value at " +
                                  detail::format_vector(position));
        }
        if (!best.evaluated || value < best.value) {
            best.position.assign(position.begin(), position.end());
            best.value = value;
            best.evaluated = true;
        }
        return value;
    }
};

/// Coordinate-wise clamp into [lower, upper].
inline Vector clamp_to_bounds(std::span<const double> position, const SearchBounds& bounds) {
    if (position.size() != bounds.dimension()) {
        throw DimensionError("clamp_to_bounds: vector length " + std::to_string(position.size()) +
                             " != bounds dimension " + std::to_string(bounds.dimension()));
    }
    Vector out(position.size());
    for (std::size_t j = 0; j < position.size(); ++j)
        out[j] = std::min(bounds.upper[j], std::max(bounds.lower[j], position[j]));
    return out;
}

inline void clamp_in_place(Vector& position, const SearchBounds& bounds) {
    for (std::size_t j = 0; j < position.size(); ++j)
        position[j] = std::min(bounds.upper[j], std::max(bounds.lower[j], position[j]));
}

/// Evaluates every bid with evaluated == false, in bid order.
inline Population& evaluate(Population& population, const ObjectiveProblem& problem) {
    for (auto& bid : population.bids) {
        if (bid.evaluated) continue;
        if (bid.position.size() != problem.dimension)
            throw DimensionError("evaluate: bid dimension differs from problem dimension");
        bid.value = population.charge(problem, bid.position);
        bid.evaluated = true;
    }
    return population;
}

/// Uniform random initialisation. Draw order: bid-major, coordinate-minor.
inline Population init_population(const ObjectiveProblem& problem, std::size_t n_pop, RngStream& rng,
                                  std::uint64_t nfe_max = 1) {
    problem.validate();
    if (n_pop < 2) throw ConfigurationError("init_population: n_pop must be at least 2");
    if (nfe_max == 0) throw ConfigurationError("init_population: nfe_max must be positive");

    Population pop;
    pop.nfe_max = nfe_max;
    pop.bids.resize(n_pop);
    for (auto& bid : pop.bids) {
        bid.position.resize(problem.dimension);
        for (std::size_t j = 0; j < problem.dimension; ++j)
            bid.position[j] = rng.uniform(problem.bounds.lower[j], problem.bounds.upper[j]);
    }
    evaluate(pop, problem);
    return pop;
}

// ---------------------------------------------------------------------------
// Run trace
// ---------------------------------------------------------------------------

struct TraceRecord {
    std::uint64_t nfe = 0;
    double best_value = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Per-iteration (nfe, best) history of one seeded run. Optimizers fill
/// `records` and `best`; the harness fills the identification fields and
/// `final_error`.
struct RunTrace {
    std::string algorithm;
    std::string function;
    std::uint64_t seed = 0;
    std::vector<TraceRecord> records;
    Bid best;
    double final_error = 0.0;

    void record(const Population& pop) { records.push_back({pop.nfe, pop.best.value}); }
};

} // namespace hmsos
