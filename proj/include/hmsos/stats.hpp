#pragma once

/// @file stats.hpp
/// @brief Summary tables, average ranks and the Wilcoxon signed-rank test.

#include <hmsos/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace hmsos::stats {

struct ReportingError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Descriptive statistics and ranks
// ---------------------------------------------------------------------------

inline double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Ascending ranks starting at 1; exactly equal values share their average rank.
inline Vector average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    Vector ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
        i = j + 1;
    }
    return ranks;
}

struct SummaryRow {
    std::string algorithm;
    std::string function;
    std::size_t runs = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    double rank = 0.0;
};

/// Final errors per (algorithm, function) cell. `algorithms` and `functions`
/// fix the output order.
struct ErrorTable {
    std::vector<std::string> algorithms;
    std::vector<std::string> functions;
    std::map<std::pair<std::string, std::string>, Vector> cells;

    void add(const std::string& algorithm, const std::string& function, double error) {
        cells[{algorithm, function}].push_back(error);
    }
};

struct Summary {
    /// Function-major, algorithms in table order within each function.
    std::vector<SummaryRow> rows;
    /// Mean over functions of each algorithm's per-function rank.
    std::vector<std::pair<std::string, double>> average_rank;
};

inline Summary summarize(const ErrorTable& table) {
    if (table.algorithms.empty() || table.functions.empty()) throw ReportingError("summarize: empty table");
    Summary out;
    std::map<std::string, double> rank_sum;
    for (const auto& fn : table.functions) {
        Vector means;
        const std::size_t first = out.rows.size();
        for (const auto& alg : table.algorithms) {
            const auto it = table.cells.find({alg, fn});
            if (it == table.cells.end() || it->second.empty())
                throw ReportingError("summarize: empty cell (" + alg + ", " + fn + ")");
            SummaryRow row;
            row.algorithm = alg;
            row.function = fn;
            row.runs = it->second.size();
            row.mean_error = mean(it->second);
            row.std_error = sample_stddev(it->second);
            means.push_back(row.mean_error);
            out.rows.push_back(std::move(row));
        }
        const Vector ranks = average_ranks(means);
        for (std::size_t a = 0; a < ranks.size(); ++a) {
            out.rows[first + a].rank = ranks[a];
            rank_sum[table.algorithms[a]] += ranks[a];
        }
    }
    for (const auto& alg : table.algorithms)
        out.average_rank.emplace_back(alg, rank_sum[alg] / static_cast<double>(table.functions.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test
// ---------------------------------------------------------------------------

enum class WilcoxonMethod { exact, normal_approximation };

inline const char* to_string(WilcoxonMethod m) {
    return m == WilcoxonMethod::exact ? "exact" : "normal-approximation";
}

struct WilcoxonResult {
    std::size_t n_effective = 0;
    /// min(W+, W-).
    double w_statistic = 0.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_value = 1.0;
    WilcoxonMethod method = WilcoxonMethod::exact;
};

/// automatic picks exact for n_effective <= exact_threshold.
enum class WilcoxonMode { automatic, exact, normal_approximation };

inline constexpr std::size_t exact_threshold = 25;
inline constexpr std::size_t minimum_pairs = 5;

namespace detail {

/// Nonzero differences and their averaged absolute-value ranks.
struct SignedRanks {
    Vector diffs;
    Vector ranks;
};

inline SignedRanks signed_ranks(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("wilcoxon: samples differ in length");
    SignedRanks sr;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) sr.diffs.push_back(d);
    }
    Vector abs_d(sr.diffs.size());
    for (std::size_t i = 0; i < sr.diffs.size(); ++i) abs_d[i] = std::abs(sr.diffs[i]);
    sr.ranks = average_ranks(abs_d);
    return sr;
}

/// Number of sign assignments whose positive-rank sum (in doubled units) is
/// at most `limit2`, by dynamic programming over doubled ranks.
inline double count_at_most(const std::vector<std::int64_t>& ranks2, std::int64_t limit2) {
    const std::int64_t total = std::accumulate(ranks2.begin(), ranks2.end(), std::int64_t{0});
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    std::int64_t reach = 0;
    for (const auto r : ranks2) {
        for (std::int64_t s = reach; s >= 0; --s)
            if (ways[static_cast<std::size_t>(s)] != 0.0) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
        reach += r;
    }
    double count = 0.0;
    for (std::int64_t s = 0; s <= std::min(limit2, total); ++s) count += ways[static_cast<std::size_t>(s)];
    return count;
}

} // namespace detail

/// Two-sided paired test on x - y. Zero differences are dropped; tied
/// |differences| share averaged ranks. For n_effective <= 25 the p-value comes
/// from the exact permutation distribution of the signed ranks (all 2^n sign
/// assignments, counted by dynamic programming). Above that, the normal
/// approximation with tie-corrected variance and continuity correction.
/// `mode` forces either method; exact is limited to n_effective <= 60.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                           WilcoxonMode mode = WilcoxonMode::automatic) {
    const auto sr = detail::signed_ranks(x, y);
    const std::size_t n = sr.diffs.size();
    if (n < minimum_pairs)
        throw InsufficientDataError("wilcoxon: " + std::to_string(n) + " nonzero differences, need at least " +
                                    std::to_string(minimum_pairs));

    WilcoxonResult res;
    res.n_effective = n;
    for (std::size_t i = 0; i < n; ++i) (sr.diffs[i] > 0.0 ? res.w_plus : res.w_minus) += sr.ranks[i];
    res.w_statistic = std::min(res.w_plus, res.w_minus);

    const bool exact = mode == WilcoxonMode::automatic ? n <= exact_threshold : mode == WilcoxonMode::exact;
    if (exact && n > 60) throw ParameterError("wilcoxon: exact method limited to 60 nonzero differences");
    if (exact) {
        res.method = WilcoxonMethod::exact;
        std::vector<std::int64_t> ranks2(n);
        for (std::size_t i = 0; i < n; ++i) ranks2[i] = std::llround(2.0 * sr.ranks[i]);
        const auto w2 = std::llround(2.0 * res.w_statistic);
        const double count = detail::count_at_most(ranks2, w2);
        res.p_value = std::min(1.0, 2.0 * count / std::ldexp(1.0, static_cast<int>(n)));
    } else {
        res.method = WilcoxonMethod::normal_approximation;
        const double nn = static_cast<double>(n);
        const double mu = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        Vector sorted = sr.ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            var -= (t * t * t - t) / 48.0;
            i = j;
        }
        const double z = std::max(0.0, std::abs(res.w_plus - mu) - 0.5) / std::sqrt(var);
        res.p_value = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
    }
    return res;
}

} // namespace hmsos::stats
