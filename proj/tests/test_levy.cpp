#include <hmsos/levy.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace hmsos;
using namespace hmsos::levy;

namespace {

// Reference values of the Mantegna sigma computed with 50-digit arithmetic.
struct SigmaCase {
    double beta;
    double sigma;
};
constexpr SigmaCase kSigmaOracle[] = {
    {1.0, 1.0},
    {1.5, 0.6965745025576968},
    {0.5, 1.4793375595943194},
    {0.3, 2.1041137929233265},
    {1.99, 0.11069302230728726},
};

double sigma_from_tgamma(double b) {
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double num = std::tgamma(1.0L + b) * std::sin(pi * b / 2.0L);
    const long double den = std::tgamma((1.0L + b) / 2.0L) * b * std::pow(2.0L, (b - 1.0L) / 2.0L);
    return static_cast<double>(std::pow(num / den, 1.0L / b));
}

/// Normal source that replays a fixed list of values.
struct ScriptedNormal {
    std::vector<double> script;
    std::size_t at = 0;
    double normal() { return script.at(at++); }
    double uniform01() { return 0.5; }
};

} // namespace

TEST(LevyGamma, MatchesStdTgamma) {
    for (double x = 0.05; x < 4.0; x += 0.05) EXPECT_NEAR(levy::gamma(x) / std::tgamma(x), 1.0, 1e-12) << x;
}

TEST(LevySigma, MatchesHighPrecisionOracle) {
    for (const auto& c : kSigmaOracle) EXPECT_NEAR(sigma_u(c.beta), c.sigma, 1e-12) << c.beta;
    EXPECT_NEAR(sigma_u(1.0), 1.0, 1e-10);
}

TEST(LevySigma, AgreesWithLongDoubleTgammaAcrossRange) {
    for (double b = 0.05; b < 1.999; b += 0.01) EXPECT_NEAR(sigma_u(b), sigma_from_tgamma(b), 1e-10) << b;
}

TEST(LevySigma, RejectsOutOfDomainBeta) {
    for (double b : {0.0, -0.5, 2.0, 3.0, std::nan("")}) EXPECT_THROW(sigma_u(b), ParameterError) << b;
}

TEST(LevyDecay, EndpointsAndClamp) {
    EXPECT_EQ(decay_factor(0, 30000), 2.0);
    EXPECT_EQ(decay_factor(30000, 30000), 0.0);
    EXPECT_EQ(decay_factor(15000, 30000), 1.0);
    EXPECT_EQ(decay_factor(31000, 30000), 0.0);
    EXPECT_THROW(decay_factor(1, 0), ParameterError);
}

TEST(LevyDecay, MonotoneNonIncreasing) {
    double prev = 3.0;
    for (std::uint64_t n = 0; n <= 1200; n += 7) {
        const double f = decay_factor(n, 1000);
        EXPECT_LE(f, prev);
        EXPECT_GE(f, 0.0);
        prev = f;
    }
}

TEST(LevyStep, ScriptedDrawsGiveExpectedStep) {
    // beta = 1: sigma = 1, ratio = u / v.
    ScriptedNormal src{{2.0, 4.0, -1.0, 0.5}};
    const std::vector<double> x{1.0, 3.0}, xs{0.0, 1.0};
    const auto out = levy_step(x, xs, 1.0, 0, 100, src);
    // scale = 2 * 0.01; coordinate 0: 0.02 * 0.5 * 1 ; coordinate 1: 0.02 * (-2) * 2
    EXPECT_DOUBLE_EQ(out[0], 1.0 + 0.02 * 0.5 * 1.0);
    EXPECT_DOUBLE_EQ(out[1], 3.0 + 0.02 * -2.0 * 2.0);
    EXPECT_EQ(src.at, 4U);
}

TEST(LevyStep, NegativeVKeepsSignThroughFractionalPower) {
    ScriptedNormal src{{1.0, -4.0}};
    const double beta = 0.5; // |v|^(1/beta) = 16
    const std::vector<double> x{1.0}, xs{0.0};
    const auto out = levy_step(x, xs, beta, 0, 100, src);
    EXPECT_DOUBLE_EQ(out[0], 1.0 + 0.02 * (sigma_u(beta) * 1.0 / -16.0));
}

TEST(LevyStep, FixpointWhenAtReference) {
    RngStream rng(9);
    const std::vector<double> x{0.3, -0.7, 2.0};
    for (int t = 0; t < 100; ++t) EXPECT_EQ(levy_step(x, x, 1.3, 10, 100, rng), x);
}

TEST(LevyStep, FixpointWhenBudgetSpent) {
    RngStream rng(9);
    const std::vector<double> x{0.3, -0.7}, xs{1.0, 1.0};
    EXPECT_EQ(levy_step(x, xs, 1.3, 100, 100, rng), x);
    EXPECT_EQ(levy_step(x, xs, 1.3, 250, 100, rng), x);
}

TEST(LevyStep, AlwaysConsumesTwoNormalsPerCoordinate) {
    ScriptedNormal src{{1, 1, 1, 1, 1, 1}};
    const std::vector<double> x{1.0, 1.0, 1.0};
    levy_step(x, x, 1.0, 0, 10, src);
    EXPECT_EQ(src.at, 6U);
}

TEST(LevyStep, DisplacementScalesWithDistanceToReference) {
    for (double k : {0.5, 3.0, -2.0}) {
        RngStream a(21), b(21);
        const std::vector<double> x{1.0, -2.0}, xs{0.0, 0.0};
        const std::vector<double> xk{k * 1.0, k * -2.0};
        const auto s1 = levy_step(x, xs, 1.2, 5, 100, a);
        const auto s2 = levy_step(xk, xs, 1.2, 5, 100, b);
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(s2[j] - xk[j], k * (s1[j] - x[j]), 1e-12);
    }
}

TEST(LevyStep, DimensionMismatchThrows) {
    RngStream rng(1);
    EXPECT_THROW(levy_step(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, 1.0, 0, 10, rng),
                 DimensionError);
}

TEST(LevyRatio, HeavyTailedComparedToGaussian) {
    // The ratio has infinite variance for beta < 2; its sample kurtosis sits
    // far above the Gaussian value of 3 and extreme quantiles dwarf 3 sigma.
    RngStream rng(123);
    const int n = 100000;
    const double beta = 1.5;
    const double s = sigma_u(beta);
    std::vector<double> r(n);
    for (auto& v : r) v = mantegna_ratio(s, beta, rng);
    double m = 0;
    for (double v : r) m += v;
    m /= n;
    double m2 = 0, m4 = 0;
    for (double v : r) {
        m2 += (v - m) * (v - m);
        m4 += std::pow(v - m, 4);
    }
    m2 /= n;
    m4 /= n;
    EXPECT_GT(m4 / (m2 * m2), 10.0);

    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = std::abs(r[i]);
    std::nth_element(a.begin(), a.begin() + n / 2, a.end());
    const double median = a[n / 2];
    std::nth_element(a.begin(), a.begin() + n - n / 1000, a.end());
    const double q999 = a[n - n / 1000];
    // For a Gaussian q99.9 / median is about 3.3 / 0.674 = 4.9.
    EXPECT_GT(q999 / median, 15.0);
}

TEST(LevySigma, HalfIsFinitePositive) {
    const double s = sigma_u(0.5);
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GT(s, 0.0);
}

TEST(LevyStep, ReproducibleWithReseededStream) {
    const std::vector<double> x{1, 1}, xs{0, 0};
    RngStream a(31), b(31);
    EXPECT_EQ(levy_step(x, xs, 1.5, 0, 100, a), levy_step(x, xs, 1.5, 0, 100, b));
}
