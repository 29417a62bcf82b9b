#pragma once

/// @file harness.hpp
/// @brief Experiment runner: config loading, paired multi-seed execution over
/// a worker pool, trace persistence, and the summary / rank / Wilcoxon /
/// convergence reports.
///
/// Output layout of run_experiment(config):
///   <output_dir>/traces/<algorithm>__<function>__<seed>.trace
///   <output_dir>/summary.csv   function,algorithm,runs,mean_error,std_error,rank
///   <output_dir>/ranks.csv     algorithm,average_rank
///   <output_dir>/wilcoxon.csv  reference,algorithm,n_effective,w_statistic,p_value,method
///   <output_dir>/failures.csv  algorithm,function,seed,message
///   <output_dir>/report.json   the same four tables
///
/// Report numbers are printed with %.6e. Trace files keep %.17g so reports
/// rebuilt from traces reproduce the original bytes.

#include <hmsos/benchmarks.hpp>
#include <hmsos/config.hpp>
#include <hmsos/core.hpp>
#include <hmsos/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace hmsos::harness {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

inline std::string fmt_e(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

inline std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Writes to a sibling temporary and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct AlgorithmEntry {
    std::string name;
    ParameterMap overrides;
};

struct ExperimentConfig {
    std::vector<AlgorithmEntry> algorithms;
    std::vector<std::string> functions;
    std::size_t dimension = 10;
    std::size_t runs = 25;
    std::uint64_t budget_multiplier = 3000;
    std::uint64_t base_seed = 0;
    std::size_t parallelism = 1;
    fs::path output_dir = "results";
    /// Algorithm every other one is tested against; defaults to hms-os when
    /// present, else the first algorithm.
    std::string reference;
    /// Translate shift-safe functions by a per-(function, seed) offset.
    bool shift = true;
    /// Optional wrapper applied to every problem before it is run (evaluation
    /// counters, fault injection). Not part of the fingerprint.
    std::function<ObjectiveProblem(ObjectiveProblem)> instrument;

    [[nodiscard]] std::uint64_t nfe_max() const { return budget_multiplier * dimension; }

    [[nodiscard]] std::uint64_t seed_for_run(std::size_t run) const { return base_seed + run; }

    [[nodiscard]] std::string reference_algorithm() const {
        if (!reference.empty()) return reference;
        for (const auto& a : algorithms)
            if (a.name == "hms-os") return a.name;
        return algorithms.empty() ? std::string{} : algorithms.front().name;
    }

    /// Checks every name and override before anything runs.
    void validate() const {
        if (algorithms.empty()) throw ConfigurationError("config: no algorithms");
        if (functions.empty()) throw ConfigurationError("config: no functions");
        if (dimension < 2) throw ConfigurationError("config: dimension must be at least 2");
        if (runs == 0) throw ConfigurationError("config: runs must be positive");
        if (budget_multiplier == 0) throw ConfigurationError("config: budget_multiplier must be positive");
        if (parallelism == 0) throw ConfigurationError("config: parallelism must be positive");
        std::set<std::string> seen;
        for (const auto& a : algorithms) {
            if (!seen.insert(a.name).second) throw ConfigurationError("config: duplicate algorithm '" + a.name + "'");
            defaults_for(a.name, a.overrides);
        }
        const auto known = bench::suite_names();
        std::set<std::string> seen_fn;
        for (const auto& f : functions) {
            if (std::find(known.begin(), known.end(), f) == known.end())
                throw ConfigurationError("config: unknown function '" + f + "'");
            if (!seen_fn.insert(f).second) throw ConfigurationError("config: duplicate function '" + f + "'");
        }
        if (!seen.count(reference_algorithm()))
            throw ConfigurationError("config: reference algorithm '" + reference_algorithm() + "' is not run");
    }

    /// Canonical JSON of every field that influences results.
    [[nodiscard]] nlohmann::json canonical_json() const {
        nlohmann::json j;
        j["algorithms"] = nlohmann::json::array();
        for (const auto& a : algorithms) {
            nlohmann::json e;
            e["name"] = a.name;
            e["parameters"] = defaults_for(a.name, a.overrides);
            j["algorithms"].push_back(e);
        }
        j["functions"] = functions;
        j["dimension"] = dimension;
        j["runs"] = runs;
        j["budget_multiplier"] = budget_multiplier;
        j["base_seed"] = base_seed;
        j["reference"] = reference_algorithm();
        j["shift"] = shift;
        return j;
    }

    [[nodiscard]] std::string fingerprint() const { return hex64(fnv1a(canonical_json().dump())); }
};

/// Parses the JSON config format. Keys mirror ExperimentConfig; unknown keys
/// are rejected. "functions" may be omitted to select the whole suite.
inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigurationError("config: top level must be an object");
    static const std::set<std::string> allowed = {"algorithms", "functions",   "dimension",  "runs",
                                                  "budget_multiplier", "base_seed", "parallelism", "output_dir",
                                                  "reference",  "shift"};
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigurationError("config: unknown key '" + key + "'");

    ExperimentConfig c;
    try {
        for (const auto& a : j.at("algorithms")) {
            AlgorithmEntry e;
            if (a.is_string()) {
                e.name = a.get<std::string>();
            } else {
                for (const auto& [key, _] : a.items())
                    if (key != "name" && key != "overrides")
                        throw ConfigurationError("config: unknown algorithm key '" + key + "'");
                e.name = a.at("name").get<std::string>();
                if (a.contains("overrides")) e.overrides = a.at("overrides").get<ParameterMap>();
            }
            c.algorithms.push_back(std::move(e));
        }
        if (j.contains("functions")) c.functions = j.at("functions").get<std::vector<std::string>>();
        else c.functions = bench::suite_names();
        if (j.contains("dimension")) c.dimension = j.at("dimension").get<std::size_t>();
        if (j.contains("runs")) c.runs = j.at("runs").get<std::size_t>();
        if (j.contains("budget_multiplier")) c.budget_multiplier = j.at("budget_multiplier").get<std::uint64_t>();
        if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("parallelism")) c.parallelism = j.at("parallelism").get<std::size_t>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("reference")) c.reference = j.at("reference").get<std::string>();
        if (j.contains("shift")) c.shift = j.at("shift").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw ConfigurationError(e.what());
    }
    return parse_config(text);
}

/// desk: D=10, 10 runs. paper: D=50, 25 runs. Budget stays 3000 x D unless
/// the config set another multiplier.
inline void apply_profile(ExperimentConfig& config, const std::string& profile) {
    if (profile == "desk") {
        config.dimension = 10;
        config.runs = 10;
    } else if (profile == "paper") {
        config.dimension = 50;
        config.runs = 25;
    } else {
        throw ConfigurationError("unknown profile '" + profile + "' (expected desk or paper)");
    }
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

/// The benchmark instance for (function, seed). The offset depends only on
/// the function name and seed, so every algorithm sees the same instance.
inline bench::BenchmarkSpec instance_for(const std::string& function, std::size_t dimension, std::uint64_t seed,
                                         bool shift) {
    auto spec = bench::by_name(function, dimension);
    if (shift && spec.shift_safe) {
        RngStream rng(seed ^ fnv1a(function));
        spec = bench::shift(spec, bench::random_offset(spec, rng));
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Trace files
// ---------------------------------------------------------------------------

struct TraceFile {
    std::string algorithm;
    std::string function;
    std::uint64_t seed = 0;
    std::size_t algorithm_index = 0;
    std::size_t function_index = 0;
    std::size_t dimension = 0;
    std::uint64_t nfe_max = 0;
    std::string reference;
    std::string fingerprint;
    bool ok = true;
    std::string message;
    double optimum_value = 0.0;
    double final_best = 0.0;
    double final_error = 0.0;
    std::vector<TraceRecord> records;
};

inline std::string trace_filename(const std::string& algorithm, const std::string& function, std::uint64_t seed) {
    return algorithm + "__" + function + "__" + std::to_string(seed) + ".trace";
}

inline std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

inline std::string serialize_trace(const TraceFile& t) {
    std::ostringstream out;
    out << "# hmsos-trace 1\n";
    out << "# algorithm: " << t.algorithm << '\n';
    out << "# function: " << t.function << '\n';
    out << "# seed: " << t.seed << '\n';
    out << "# algorithm_index: " << t.algorithm_index << '\n';
    out << "# function_index: " << t.function_index << '\n';
    out << "# dimension: " << t.dimension << '\n';
    out << "# nfe_max: " << t.nfe_max << '\n';
    out << "# reference: " << t.reference << '\n';
    out << "# fingerprint: " << t.fingerprint << '\n';
    out << "# status: " << (t.ok ? "ok" : "failed") << '\n';
    out << "# message: " << one_line(t.message) << '\n';
    out << "# optimum_value: " << fmt_exact(t.optimum_value) << '\n';
    out << "# final_best: " << fmt_exact(t.final_best) << '\n';
    out << "# final_error: " << fmt_exact(t.final_error) << '\n';
    out << "nfe,best_value\n";
    for (const auto& r : t.records) out << r.nfe << ',' << fmt_exact(r.best_value) << '\n';
    return out.str();
}

/// strtod with full-consumption check. Accepts subnormals, which std::stod
/// rejects as out of range.
inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error("not a number: '" + s + "'");
    return v;
}

inline TraceFile parse_trace(const std::string& text, const std::string& origin = "trace") {
    TraceFile t;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::map<std::string, std::string> meta;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon != std::string::npos) meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
            else if (colon == std::string::npos && line.back() == ':') meta[line.substr(2, line.size() - 3)] = "";
            continue;
        }
        if (line == "nfe,best_value") {
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (!header_seen || comma == std::string::npos) throw Error(origin + ": malformed line '" + line + "'");
        t.records.push_back({std::stoull(line.substr(0, comma)), parse_double(line.substr(comma + 1))});
    }
    try {
        t.algorithm = meta.at("algorithm");
        t.function = meta.at("function");
        t.seed = std::stoull(meta.at("seed"));
        t.algorithm_index = std::stoull(meta.at("algorithm_index"));
        t.function_index = std::stoull(meta.at("function_index"));
        t.dimension = std::stoull(meta.at("dimension"));
        t.nfe_max = std::stoull(meta.at("nfe_max"));
        t.reference = meta.at("reference");
        t.fingerprint = meta.at("fingerprint");
        t.ok = meta.at("status") == "ok";
        t.message = meta.count("message") ? meta.at("message") : "";
        t.optimum_value = parse_double(meta.at("optimum_value"));
        t.final_best = parse_double(meta.at("final_best"));
        t.final_error = parse_double(meta.at("final_error"));
    } catch (const std::exception& e) {
        throw Error(origin + ": missing or malformed header field (" + e.what() + ")");
    }
    return t;
}

/// Every *.trace file in `dir`, ordered by (algorithm_index, function_index, seed).
inline std::vector<TraceFile> load_traces(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("trace directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".trace") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<TraceFile> out;
    for (const auto& f : files) out.push_back(parse_trace(read_file(f), f.string()));
    std::sort(out.begin(), out.end(), [](const TraceFile& a, const TraceFile& b) {
        return std::tie(a.algorithm_index, a.function_index, a.seed) <
               std::tie(b.algorithm_index, b.function_index, b.seed);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct WilcoxonRow {
    std::string reference;
    std::string algorithm;
    std::optional<stats::WilcoxonResult> result;
    std::string note;
};

struct FailureRow {
    std::string algorithm;
    std::string function;
    std::uint64_t seed = 0;
    std::string message;
};

struct Report {
    std::vector<std::string> algorithms;
    std::vector<std::string> functions;
    std::vector<std::string> warnings;
    stats::Summary summary;
    std::vector<WilcoxonRow> wilcoxon;
    std::vector<FailureRow> failures;
};

/// Builds every table from persisted traces alone. Functions where some
/// algorithm has no successful run are left out of the summary and listed
/// in `warnings`. Wilcoxon pairs are (function, seed) cells where both the
/// reference and the other algorithm succeeded.
inline Report build_report(const std::vector<TraceFile>& traces) {
    if (traces.empty()) throw stats::ReportingError("report: no traces");
    Report rep;
    std::map<std::size_t, std::string> alg_by_index;
    std::map<std::size_t, std::string> fn_by_index;
    std::string reference = traces.front().reference;
    for (const auto& t : traces) {
        alg_by_index.emplace(t.algorithm_index, t.algorithm);
        fn_by_index.emplace(t.function_index, t.function);
        if (!t.ok) rep.failures.push_back({t.algorithm, t.function, t.seed, t.message});
    }
    for (const auto& [_, a] : alg_by_index) rep.algorithms.push_back(a);

    stats::ErrorTable table;
    table.algorithms = rep.algorithms;
    std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, double>> by_seed;
    for (const auto& t : traces)
        if (t.ok) {
            table.add(t.algorithm, t.function, t.final_error);
            by_seed[{t.algorithm, t.function}][t.seed] = t.final_error;
        }
    for (const auto& [_, f] : fn_by_index) {
        bool complete = true;
        for (const auto& a : rep.algorithms)
            if (!table.cells.count({a, f})) {
                complete = false;
                rep.warnings.push_back("no successful run for (" + a + ", " + f + "); function excluded from ranking");
            }
        if (complete) table.functions.push_back(f);
    }
    rep.functions = table.functions;
    if (!table.functions.empty()) rep.summary = stats::summarize(table);

    for (const auto& a : rep.algorithms) {
        if (a == reference) continue;
        WilcoxonRow row{reference, a, std::nullopt, ""};
        Vector x, y;
        for (const auto& f : table.functions) {
            const auto& ref = by_seed[{reference, f}];
            const auto& other = by_seed[{a, f}];
            for (const auto& [seed, e] : ref) {
                const auto it = other.find(seed);
                if (it == other.end()) continue;
                x.push_back(e);
                y.push_back(it->second);
            }
        }
        try {
            row.result = stats::wilcoxon_signed_rank(x, y);
        } catch (const stats::InsufficientDataError& e) {
            row.note = e.what();
        }
        rep.wilcoxon.push_back(std::move(row));
    }
    return rep;
}

inline std::string summary_csv(const Report& rep) {
    std::string out = "function,algorithm,runs,mean_error,std_error,rank\n";
    for (const auto& r : rep.summary.rows)
        out += r.function + ',' + r.algorithm + ',' + std::to_string(r.runs) + ',' + fmt_e(r.mean_error) + ',' +
               (r.runs > 1 ? fmt_e(r.std_error) : std::string("n/a")) + ',' + fmt_e(r.rank) + '\n';
    return out;
}

inline std::string ranks_csv(const Report& rep) {
    std::string out = "algorithm,average_rank\n";
    for (const auto& [a, r] : rep.summary.average_rank) out += a + ',' + fmt_e(r) + '\n';
    return out;
}

inline std::string wilcoxon_csv(const Report& rep) {
    std::string out = "reference,algorithm,n_effective,w_statistic,p_value,method\n";
    for (const auto& w : rep.wilcoxon) {
        if (w.result)
            out += w.reference + ',' + w.algorithm + ',' + std::to_string(w.result->n_effective) + ',' +
                   fmt_e(w.result->w_statistic) + ',' + fmt_e(w.result->p_value) + ',' +
                   stats::to_string(w.result->method) + '\n';
        else
            out += w.reference + ',' + w.algorithm + ",0,n/a,n/a,insufficient-data\n";
    }
    return out;
}

inline std::string failures_csv(const Report& rep) {
    std::string out = "algorithm,function,seed,message\n";
    for (const auto& f : rep.failures) {
        std::string msg = one_line(f.message);
        std::replace(msg.begin(), msg.end(), ',', ';');
        out += f.algorithm + ',' + f.function + ',' + std::to_string(f.seed) + ',' + msg + '\n';
    }
    return out;
}

/// JSON mirror; numbers carry exactly the values printed in the CSV files.
inline std::string report_json(const Report& rep) {
    using nlohmann::json;
    auto num = [](double v) { return parse_double(fmt_e(v)); };
    json j;
    j["warnings"] = rep.warnings;
    j["summary"] = json::array();
    for (const auto& r : rep.summary.rows) {
        json row = {{"function", r.function}, {"algorithm", r.algorithm}, {"runs", r.runs},
                    {"mean_error", num(r.mean_error)}, {"rank", num(r.rank)}};
        row["std_error"] = r.runs > 1 ? json(num(r.std_error)) : json(nullptr);
        j["summary"].push_back(row);
    }
    j["average_rank"] = json::array();
    for (const auto& [a, r] : rep.summary.average_rank)
        j["average_rank"].push_back({{"algorithm", a}, {"average_rank", num(r)}});
    j["wilcoxon"] = json::array();
    for (const auto& w : rep.wilcoxon) {
        json row = {{"reference", w.reference}, {"algorithm", w.algorithm}};
        if (w.result) {
            row["n_effective"] = w.result->n_effective;
            row["w_statistic"] = num(w.result->w_statistic);
            row["p_value"] = num(w.result->p_value);
            row["method"] = stats::to_string(w.result->method);
        } else {
            row["n_effective"] = 0;
            row["w_statistic"] = nullptr;
            row["p_value"] = nullptr;
            row["method"] = "insufficient-data";
        }
        j["wilcoxon"].push_back(row);
    }
    j["failures"] = json::array();
    for (const auto& f : rep.failures)
        j["failures"].push_back(
            {{"algorithm", f.algorithm}, {"function", f.function}, {"seed", f.seed}, {"message", f.message}});
    return j.dump(2) + "\n";
}

enum class ReportFormat { csv, json, both };

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "both") return ReportFormat::both;
    throw ConfigurationError("unknown report format '" + s + "'");
}

inline void write_report(const Report& rep, const fs::path& out_dir, ReportFormat format) {
    if (format != ReportFormat::json) {
        write_atomic(out_dir / "summary.csv", summary_csv(rep));
        write_atomic(out_dir / "ranks.csv", ranks_csv(rep));
        write_atomic(out_dir / "wilcoxon.csv", wilcoxon_csv(rep));
        write_atomic(out_dir / "failures.csv", failures_csv(rep));
    }
    if (format != ReportFormat::csv) write_atomic(out_dir / "report.json", report_json(rep));
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct Cell {
    std::size_t algorithm_index = 0;
    std::size_t function_index = 0;
    std::size_t run = 0;
};

struct ExperimentResult {
    std::size_t cells = 0;
    std::size_t failed = 0;
    Report report;

    [[nodiscard]] int exit_code() const { return failed == 0 ? 0 : 2; }
};

/// Runs one cell and returns its trace record. Errors inside the run are
/// captured into a failed trace rather than propagated.
inline TraceFile run_cell(const ExperimentConfig& config, const Cell& cell, const std::string& fingerprint) {
    const auto& alg = config.algorithms[cell.algorithm_index];
    const auto& fn = config.functions[cell.function_index];
    TraceFile t;
    t.algorithm = alg.name;
    t.function = fn;
    t.seed = config.seed_for_run(cell.run);
    t.algorithm_index = cell.algorithm_index;
    t.function_index = cell.function_index;
    t.dimension = config.dimension;
    t.nfe_max = config.nfe_max();
    t.reference = config.reference_algorithm();
    t.fingerprint = fingerprint;
    try {
        const auto spec = instance_for(fn, config.dimension, t.seed, config.shift);
        t.optimum_value = spec.optimum_value;
        const auto params = defaults_for(alg.name, alg.overrides);
        auto problem = spec.to_problem();
        if (config.instrument) problem = config.instrument(std::move(problem));
        const RunTrace run = run_algorithm(alg.name, params, problem, t.nfe_max, t.seed);
        t.records = run.records;
        t.final_best = run.best.value;
        t.final_error = run.best.value - spec.optimum_value;
    } catch (const std::exception& e) {
        t.ok = false;
        t.message = e.what();
        t.records.clear();
    }
    return t;
}

/// Executes every (algorithm x function x run) cell on a pool of
/// config.parallelism workers, persists each trace atomically, then builds
/// the reports from the persisted traces.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::string fingerprint = config.fingerprint();
    const fs::path trace_dir = config.output_dir / "traces";
    fs::create_directories(trace_dir);
    for (const auto& entry : fs::directory_iterator(trace_dir))
        if (entry.path().extension() == ".trace") fs::remove(entry.path());

    std::vector<Cell> cells;
    for (std::size_t a = 0; a < config.algorithms.size(); ++a)
        for (std::size_t f = 0; f < config.functions.size(); ++f)
            for (std::size_t r = 0; r < config.runs; ++r) cells.push_back({a, f, r});

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failed{0};
    std::mutex error_mutex;
    std::string io_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const TraceFile t = run_cell(config, cells[i], fingerprint);
            if (!t.ok) ++failed;
            try {
                write_atomic(trace_dir / trace_filename(t.algorithm, t.function, t.seed), serialize_trace(t));
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (io_error.empty()) io_error = e.what();
            }
        }
    };
    const std::size_t n_workers = std::min(config.parallelism, cells.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!io_error.empty()) throw Error(io_error);

    ExperimentResult res;
    res.cells = cells.size();
    res.failed = failed.load();
    res.report = build_report(load_traces(trace_dir));
    write_report(res.report, config.output_dir, ReportFormat::both);
    return res;
}

// ---------------------------------------------------------------------------
// Convergence series
// ---------------------------------------------------------------------------

/// Best value in effect at `nfe`: the last record with record.nfe <= nfe.
/// Empty before the first record.
inline std::optional<double> resample(const std::vector<TraceRecord>& records, std::uint64_t nfe) {
    std::optional<double> out;
    for (const auto& r : records) {
        if (r.nfe > nfe) break;
        out = r.best_value;
    }
    return out;
}

inline std::vector<std::uint64_t> nfe_grid(std::uint64_t nfe_max, std::size_t points) {
    std::vector<std::uint64_t> grid;
    for (std::size_t i = 1; i <= points; ++i) grid.push_back(nfe_max * i / points);
    return grid;
}

inline std::optional<double> median(Vector xs) {
    if (xs.empty()) return std::nullopt;
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct MedianSeries {
    std::string algorithm;
    std::vector<std::uint64_t> nfe;
    std::vector<std::optional<double>> value;
};

/// Median over seeds of the carried-forward best value at each grid point.
inline MedianSeries median_series(const std::vector<const TraceFile*>& traces, const std::string& algorithm,
                                  const std::vector<std::uint64_t>& grid) {
    MedianSeries s{algorithm, grid, {}};
    for (auto g : grid) {
        Vector at;
        for (const auto* t : traces)
            if (auto v = resample(t->records, g)) at.push_back(*v);
        s.value.push_back(median(at));
    }
    return s;
}

struct ConvergenceTable {
    std::vector<std::string> warnings;
    std::vector<MedianSeries> medians;
    std::string csv;
};

/// Long-format per-seed records plus one median series per algorithm on a
/// common grid of `grid_points` evenly spaced nfe values. An empty
/// `algorithms` list selects every algorithm found for the function.
inline ConvergenceTable emit_convergence(const std::vector<TraceFile>& traces, const std::string& function,
                                         std::vector<std::string> algorithms, std::size_t grid_points = 100) {
    ConvergenceTable out;
    if (algorithms.empty()) {
        std::map<std::size_t, std::string> found;
        for (const auto& t : traces)
            if (t.function == function) found.emplace(t.algorithm_index, t.algorithm);
        for (const auto& [_, a] : found) algorithms.push_back(a);
        if (algorithms.empty()) out.warnings.push_back("no traces for function '" + function + "'");
    }
    std::uint64_t nfe_max = 0;
    std::map<std::string, std::vector<const TraceFile*>> selected;
    for (const auto& t : traces)
        if (t.function == function && t.ok) {
            selected[t.algorithm].push_back(&t);
            nfe_max = std::max(nfe_max, t.nfe_max);
        }
    for (const auto& a : algorithms)
        if (selected[a].empty()) out.warnings.push_back("missing traces for (" + a + ", " + function + ")");

    const auto grid = nfe_grid(nfe_max, grid_points);
    std::string body = "series,algorithm,seed,nfe,best_value\n";
    for (const auto& a : algorithms)
        for (const auto* t : selected[a])
            for (const auto& r : t->records)
                body += "trace," + a + ',' + std::to_string(t->seed) + ',' + std::to_string(r.nfe) + ',' +
                        fmt_e(r.best_value) + '\n';
    for (const auto& a : algorithms) {
        if (selected[a].empty()) continue;
        auto m = median_series(selected[a], a, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            body += "median," + a + ",," + std::to_string(grid[i]) + ',' + (m.value[i] ? fmt_e(*m.value[i]) : "") +
                    '\n';
        out.medians.push_back(std::move(m));
    }
    std::string header = "# function: " + function + '\n';
    for (const auto& w : out.warnings) header += "# warning: " + w + '\n';
    out.csv = header + body;
    return out;
}

} // namespace hmsos::harness
