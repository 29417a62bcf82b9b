#pragma once

/// @file benchmarks.hpp
/// @brief Classic analytic test functions with known minima.
///
/// Bounds used by suite():
///   sphere, bent_cigar            [-100, 100]^D
///   sum_of_different_powers       [-1, 1]^D
///   rosenbrock                    [-5, 10]^D
///   rastrigin, hybrid_rastrigin_sphere  [-5.12, 5.12]^D
///   ackley                        [-32.768, 32.768]^D
///   griewank                      [-600, 600]^D
///   schwefel_2_26                 [-500, 500]^D
///   levy                          [-10, 10]^D

#include <hmsos/core.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hmsos::bench {

enum class Family { unimodal, multimodal, hybrid_like };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::unimodal: return "unimodal";
    case Family::multimodal: return "multimodal";
    case Family::hybrid_like: return "hybrid-like";
    }
    return "?";
}

struct BenchmarkSpec {
    std::string name;
    Family family = Family::unimodal;
    std::size_t dimension = 0;
    SearchBounds bounds;
    Evaluator evaluator;
    double optimum_value = 0.0;
    std::optional<Vector> optimum_position;
    /// False when the function is only bounded below inside its box, so
    /// evaluating it at x - offset could undercut the known optimum.
    bool shift_safe = true;

    [[nodiscard]] ObjectiveProblem to_problem() const {
        return ObjectiveProblem{name, dimension, bounds, evaluator, optimum_value};
    }
};

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

inline double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double bent_cigar(std::span<const double> x) {
    double s = x[0] * x[0];
    for (std::size_t j = 1; j < x.size(); ++j) s += 1e6 * x[j] * x[j];
    return s;
}

inline double sum_of_different_powers(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::pow(std::abs(x[j]), static_cast<double>(j + 2));
    return s;
}

inline double rosenbrock(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        const double a = x[j + 1] - x[j] * x[j];
        const double b = 1.0 - x[j];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

inline double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

inline double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

inline double griewank(std::span<const double> x) {
    double s = 0.0;
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        s += x[j] * x[j] / 4000.0;
        p *= std::cos(x[j] / std::sqrt(static_cast<double>(j + 1)));
    }
    return s - p + 1.0;
}

/// Maximiser of x sin(sqrt|x|) on [-500, 500] and the maximum itself.
inline constexpr double schwefel_argmax = 420.96874635998202731;
inline constexpr double schwefel_peak = 418.98288727243370627;

inline double schwefel_2_26(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += schwefel_peak - v * std::sin(std::sqrt(std::abs(v)));
    return s;
}

inline double levy_function(std::span<const double> x) {
    const double pi = std::numbers::pi;
    auto w = [&](std::size_t j) { return 1.0 + (x[j] - 1.0) / 4.0; };
    const double w0 = w(0);
    double s = std::pow(std::sin(pi * w0), 2);
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        const double wj = w(j);
        s += (wj - 1.0) * (wj - 1.0) * (1.0 + 10.0 * std::pow(std::sin(pi * wj + 1.0), 2));
    }
    const double wd = w(x.size() - 1);
    s += (wd - 1.0) * (wd - 1.0) * (1.0 + std::pow(std::sin(2.0 * pi * wd), 2));
    return s;
}

/// Fixed interior offset of the hybrid function.
inline Vector hybrid_offset(std::size_t dimension) {
    Vector s(dimension);
    for (std::size_t j = 0; j < dimension; ++j) s[j] = 2.5 * std::sin(1.7 * static_cast<double>(j + 1));
    return s;
}

/// 0.6 * Rastrigin(z) + 0.4 * Sphere(z) with z = x - hybrid_offset(D).
inline double hybrid_rastrigin_sphere(std::span<const double> x) {
    const Vector s = hybrid_offset(x.size());
    Vector z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = x[j] - s[j];
    return 0.6 * rastrigin(z) + 0.4 * sphere(z);
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

namespace detail {

inline BenchmarkSpec make(std::string name, Family family, std::size_t d, double lo, double hi,
                          double (*f)(std::span<const double>), std::optional<Vector> opt, bool shift_safe = true) {
    BenchmarkSpec s;
    s.name = std::move(name);
    s.family = family;
    s.dimension = d;
    s.bounds = SearchBounds::uniform(d, lo, hi);
    s.evaluator = f;
    s.optimum_value = 0.0;
    s.optimum_position = std::move(opt);
    s.shift_safe = shift_safe;
    return s;
}

} // namespace detail

/// The ten-function stand-in suite, in fixed order.
inline std::vector<BenchmarkSpec> suite(std::size_t dimension) {
    if (dimension < 2) throw ParameterError("suite: dimension must be at least 2");
    const std::size_t d = dimension;
    using detail::make;
    return {
        make("sphere", Family::unimodal, d, -100.0, 100.0, sphere, Vector(d, 0.0)),
        make("bent_cigar", Family::unimodal, d, -100.0, 100.0, bent_cigar, Vector(d, 0.0)),
        make("sum_of_different_powers", Family::unimodal, d, -1.0, 1.0, sum_of_different_powers, Vector(d, 0.0)),
        make("rosenbrock", Family::multimodal, d, -5.0, 10.0, rosenbrock, Vector(d, 1.0)),
        make("rastrigin", Family::multimodal, d, -5.12, 5.12, rastrigin, Vector(d, 0.0)),
        make("ackley", Family::multimodal, d, -32.768, 32.768, ackley, Vector(d, 0.0)),
        make("griewank", Family::multimodal, d, -600.0, 600.0, griewank, Vector(d, 0.0)),
        make("schwefel_2_26", Family::multimodal, d, -500.0, 500.0, schwefel_2_26, Vector(d, schwefel_argmax),
             false),
        make("levy", Family::multimodal, d, -10.0, 10.0, levy_function, Vector(d, 1.0)),
        make("hybrid_rastrigin_sphere", Family::hybrid_like, d, -5.12, 5.12, hybrid_rastrigin_sphere,
             hybrid_offset(d)),
    };
}

inline std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& s : suite(2)) names.push_back(s.name);
    return names;
}

/// Looks up one function of the suite by name; throws ConfigurationError.
inline BenchmarkSpec by_name(const std::string& name, std::size_t dimension) {
    for (auto& s : suite(dimension))
        if (s.name == name) return s;
    throw ConfigurationError("unknown benchmark function '" + name + "'");
}

/// Translates the function so that evaluator'(x) = evaluator(x - offset).
/// |offset_j| may not exceed half the width of coordinate j's box, and the
/// translated optimum must stay inside the box.
inline BenchmarkSpec shift(const BenchmarkSpec& spec, const Vector& offset) {
    if (offset.size() != spec.dimension) throw DimensionError("shift: offset length differs from dimension");
    for (std::size_t j = 0; j < offset.size(); ++j) {
        const double half = 0.5 * (spec.bounds.upper[j] - spec.bounds.lower[j]);
        if (!(std::abs(offset[j]) <= half))
            throw ParameterError("shift: offset exceeds half the bound range in coordinate " + std::to_string(j));
        if (spec.optimum_position) {
            const double moved = (*spec.optimum_position)[j] + offset[j];
            if (moved < spec.bounds.lower[j] || moved > spec.bounds.upper[j])
                throw ParameterError("shift: optimum leaves the bounds in coordinate " + std::to_string(j));
        }
    }
    BenchmarkSpec out = spec;
    out.evaluator = [inner = spec.evaluator, offset](std::span<const double> x) {
        Vector z(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) z[j] = x[j] - offset[j];
        return inner(z);
    };
    if (out.optimum_position)
        for (std::size_t j = 0; j < offset.size(); ++j) (*out.optimum_position)[j] += offset[j];
    return out;
}

/// Draws an offset keeping the optimum at least 10% of each admissible range
/// away from the edge of what shift() accepts.
inline Vector random_offset(const BenchmarkSpec& spec, RngStream& rng) {
    Vector offset(spec.dimension);
    for (std::size_t j = 0; j < spec.dimension; ++j) {
        const double half = 0.5 * (spec.bounds.upper[j] - spec.bounds.lower[j]);
        double lo = -half;
        double hi = half;
        if (spec.optimum_position) {
            lo = std::max(lo, spec.bounds.lower[j] - (*spec.optimum_position)[j]);
            hi = std::min(hi, spec.bounds.upper[j] - (*spec.optimum_position)[j]);
        }
        offset[j] = rng.uniform(0.9 * lo, 0.9 * hi);
    }
    return offset;
}

} // namespace hmsos::bench
