// Command-line front end for the experiment harness.
//
//   hmsos run --config PATH [--out DIR] [--parallelism N] [--profile desk|paper]
//   hmsos report --traces DIR [--format csv|json|both] [--out DIR]
//   hmsos convergence --traces DIR --function NAME --out FILE [--algorithms a,b] [--grid N]
//
// Exit codes: 0 success, 1 configuration error, 2 partial failures present.

#include <hmsos/harness.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using namespace hmsos;

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_partial = 2;

int cmd_run(const std::string& config_path, const std::string& out, std::size_t parallelism,
            const std::string& profile) {
    auto config = harness::load_config(config_path);
    if (!profile.empty()) harness::apply_profile(config, profile);
    if (!out.empty()) config.output_dir = out;
    if (parallelism > 0) config.parallelism = parallelism;
    config.validate();

    std::cerr << "running " << config.algorithms.size() << " algorithms x " << config.functions.size()
              << " functions x " << config.runs << " runs (D=" << config.dimension << ", nfe_max=" << config.nfe_max()
              << ", fingerprint " << config.fingerprint() << ")\n";
    const auto result = harness::run_experiment(config);
    std::cout << harness::ranks_csv(result.report);
    for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
    if (result.failed > 0)
        std::cerr << result.failed << " of " << result.cells << " cells failed; see "
                  << (config.output_dir / "failures.csv").string() << '\n';
    return result.exit_code();
}

int cmd_report(const std::string& traces, const std::string& format, const std::string& out) {
    const auto fmt = harness::parse_format(format);
    const auto loaded = harness::load_traces(traces);
    const auto rep = harness::build_report(loaded);
    fs::path out_dir = out.empty() ? fs::path(traces).parent_path() : fs::path(out);
    if (out_dir.empty()) out_dir = ".";
    harness::write_report(rep, out_dir, fmt);
    std::cout << harness::ranks_csv(rep);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    return rep.failures.empty() ? exit_ok : exit_partial;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_convergence(const std::string& traces, const std::string& function, const std::string& out,
                    const std::string& algorithms, std::size_t grid) {
    if (grid == 0) throw ConfigurationError("--grid must be positive");
    const auto loaded = harness::load_traces(traces);
    const auto table = harness::emit_convergence(loaded, function, split_list(algorithms), grid);
    harness::write_atomic(out, table.csv);
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
    return table.warnings.empty() ? exit_ok : exit_partial;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HMS / HMS-OS optimizer experiment harness"};
    app.require_subcommand(1);

    std::string config_path, out, profile;
    std::size_t parallelism = 0;
    auto* run = app.add_subcommand("run", "run every configured (algorithm, function, seed) cell");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out, "output directory (overrides output_dir)");
    run->add_option("--parallelism", parallelism, "worker threads (overrides parallelism)");
    run->add_option("--profile", profile, "desk (D=10, 10 runs) or paper (D=50, 25 runs)")
        ->check(CLI::IsMember({"desk", "paper"}));

    std::string traces, format = "csv", report_out;
    auto* report = app.add_subcommand("report", "rebuild summary, rank and Wilcoxon tables from traces");
    report->add_option("--traces", traces, "trace directory")->required();
    report->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    report->add_option("--out", report_out, "output directory (default: parent of the trace directory)");

    std::string conv_traces = "results/traces", function, conv_out, algorithms;
    std::size_t grid = 100;
    auto* conv = app.add_subcommand("convergence", "emit convergence series for one function");
    conv->add_option("--traces", conv_traces, "trace directory");
    conv->add_option("--function", function, "benchmark function name")->required();
    conv->add_option("--out", conv_out, "output CSV file")->required();
    conv->add_option("--algorithms", algorithms, "comma-separated subset (default: all)");
    conv->add_option("--grid", grid, "number of nfe grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(config_path, out, parallelism, profile);
        if (*report) return cmd_report(traces, format, report_out);
        if (*conv) return cmd_convergence(conv_traces, function, conv_out, algorithms, grid);
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return exit_ok;
}
