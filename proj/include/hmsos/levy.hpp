#pragma once

/// @file levy.hpp
/// @brief Mantegna-style Levy-flight steps used by mental search.

#include <hmsos/core.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace hmsos::levy {

/// Step scale multiplying every Levy step.
inline constexpr double step_scale = 0.01;

/// Gamma function via the Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 0.5. Relative error is below 1e-13 on (0, 3].
inline double gamma(double x) {
    static constexpr std::array<double, 9> coeff = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
    }
    x -= 1.0;
    double a = coeff[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < coeff.size(); ++i) a += coeff[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

inline void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 2.0))
        throw ParameterError("levy: beta must lie in (0, 2), got " + std::to_string(beta));
}

/// Standard deviation of the numerator draw u for stability exponent beta.
inline double sigma_u(double beta) {
    check_beta(beta);
    const double num = gamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
    const double den = gamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
    return std::pow(num / den, 1.0 / beta);
}

/// Linear budget decay 2 -> 0, clamped at zero once nfe overshoots nfe_max.
inline double decay_factor(std::uint64_t nfe, std::uint64_t nfe_max) {
    if (nfe_max == 0) throw ParameterError("decay_factor: nfe_max must be positive");
    const double f = 2.0 - 2.0 * static_cast<double>(nfe) / static_cast<double>(nfe_max);
    return f > 0.0 ? f : 0.0;
}

/// The heavy-tailed multiplier u / v^(1/beta), with the sign of v reattached
/// to |v|^(1/beta). Consumes two normal draws: u first, then v.
template <NormalSource Rng>
double mantegna_ratio(double sigma, double beta, Rng& rng) {
    const double u = sigma * rng.normal();
    const double v = rng.normal();
    const double denom = std::copysign(std::pow(std::abs(v), 1.0 / beta), v);
    return u / denom;
}

/// x + decay * 0.01 * (u / v^(1/beta)) * (x - x_star), with fresh (u, v) per
/// coordinate. Coordinates where x == x_star still consume their draws so the
/// stream position does not depend on the data.
template <NormalSource Rng>
Vector levy_step(std::span<const double> x, std::span<const double> x_star, double beta, std::uint64_t nfe,
                 std::uint64_t nfe_max, Rng& rng) {
    if (x.size() != x_star.size()) throw DimensionError("levy_step: x and x_star differ in length");
    check_beta(beta);
    const double scale = decay_factor(nfe, nfe_max) * step_scale;
    const double sigma = sigma_u(beta);
    Vector out(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double ratio = mantegna_ratio(sigma, beta, rng);
        const double diff = x[j] - x_star[j];
        if (diff != 0.0 && scale != 0.0) out[j] += scale * ratio * diff;
    }
    return out;
}

} // namespace hmsos::levy
