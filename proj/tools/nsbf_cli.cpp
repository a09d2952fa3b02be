#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nsbf/experiment.hpp"
#include "nsbf/plot.hpp"
#include "nsbf/selftest.hpp"
#include "nsbf/serialize.hpp"

namespace {

using namespace nsbf;

struct SolveArgs {
    std::uint64_t seed = 1;
    int n = 3;
    double pt_dbw = 20.0;
    int grid = 500;
    std::string config;
    std::string channel;
    std::string out;
};

struct ExperimentArgs {
    std::string preset = "fig3";
    int realizations = 400;
    int grid = 500;
    std::uint64_t seed = 1;
    std::string out;
    std::string summary;
    std::string config;
    std::vector<int> n_list;
    std::vector<double> sweep;
    int threads = 1;
    bool timing = false;
    bool quiet = false;
};

struct OracleArgs {
    int n = 2;
    int realizations = 20;
    int grid = 100;
    double pt_dbw = 20.0;
    std::uint64_t seed = 1;
    int budget = 3000;
    int restarts = 40;
};

struct PlotArgs {
    std::string csv;
    std::string out;
};

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << text;
}

int run_solve(const SolveArgs& a)
{
    SystemConfig cfg;
    cfg.n_antennas = a.n;
    const PowerSplit ps = power_split_from_total(a.pt_dbw);
    cfg.p1 = ps.p1;
    cfg.p2 = ps.p2;
    cfg.p_relay = ps.p_relay;
    if (!a.config.empty()) {
        cfg = config_from_json(read_json_file(a.config), cfg);
    }
    cfg.validate();

    ChannelRealization ch;
    if (!a.channel.empty()) {
        ch = channel_from_json(read_json_file(a.channel));
        cfg.n_antennas = ch.n_antennas();
    } else {
        ch = sample_channel(cfg, a.seed);
    }

    OptimizerOptions opts;
    opts.grid_points = a.grid;
    const OptimizationResult res = optimize(ch, cfg, opts);
    json report = solve_report(ch, cfg, res);
    if (a.channel.empty()) {
        report["seed"] = a.seed;
    }
    write_text(a.out, report.dump(2) + "\n");
    return 0;
}

int run_experiment_cmd(const ExperimentArgs& a)
{
    ExperimentSpec spec = preset_spec(preset_from_string(a.preset));
    spec.realizations = a.realizations;
    spec.optimizer.grid_points = a.grid;
    spec.master_seed = a.seed;
    spec.threads = a.threads;
    spec.record_time = a.timing;
    if (!a.n_list.empty()) {
        spec.n_antennas = a.n_list;
    }
    if (!a.sweep.empty()) {
        spec.sweep_dbw = a.sweep;
    }
    if (!a.config.empty()) {
        spec.base = config_from_json(read_json_file(a.config), spec.base);
    }

    Progress progress;
    if (!a.quiet) {
        progress = [](int done, int total) {
            std::fprintf(stderr, "\r%d/%d", done, total);
            if (done == total) {
                std::fprintf(stderr, "\n");
            }
        };
    }
    const std::vector<ExperimentRow> rows = run_experiment(spec, progress);

    std::ostringstream csv;
    write_csv(csv, rows);
    write_text(a.out, csv.str());

    std::ostringstream summary;
    write_summary(summary, summarize(rows));
    if (!a.summary.empty()) {
        write_text(a.summary, summary.str());
    } else if (!a.out.empty() && a.out != "-") {
        std::cout << summary.str();
    }

    int failures = 0;
    for (const ExperimentRow& r : rows) {
        failures += r.status != "ok";
    }
    if (failures > 0) {
        std::fprintf(stderr, "%d realization(s) failed; see the status column\n", failures);
    }
    return 0;
}

int run_oracle_cmd(const OracleArgs& a)
{
    SystemConfig cfg;
    cfg.n_antennas = a.n;
    const PowerSplit ps = power_split_from_total(a.pt_dbw);
    cfg.p1 = ps.p1;
    cfg.p2 = ps.p2;
    cfg.p_relay = ps.p_relay;
    cfg.validate();
    OptimizerOptions opts;
    opts.grid_points = a.grid;

    const auto rows = run_oracle_compare(cfg, a.realizations, a.seed, opts, a.budget, a.restarts);
    std::printf("realization,achieved_q,sdr_bound,oracle_q,ratio\n");
    for (const OracleComparison& r : rows) {
        const double ratio = r.oracle_q > 0.0 ? r.achieved_q / r.oracle_q : 1.0;
        std::printf("%d,%.10g,%.10g,%.10g,%.6f\n", r.realization, r.achieved_q, r.sdr_bound,
                    r.oracle_q, ratio);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Null-space relay beamforming for two-way secrecy"};
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "Optimize one channel realization, print JSON");
    solve->add_option("--seed", sa.seed, "Channel seed");
    solve->add_option("--n", sa.n, "Relay antennas")->check(CLI::Range(2, 16));
    solve->add_option("--pt-dbw", sa.pt_dbw, "Total power budget in dBW");
    solve->add_option("--grid", sa.grid, "Grid points per slack variable")->check(CLI::PositiveNumber);
    solve->add_option("--config", sa.config, "JSON overrides of the system config");
    solve->add_option("--channel", sa.channel, "JSON channel file (replaces --seed)");
    solve->add_option("--out", sa.out, "Output path (default stdout)");

    ExperimentArgs ea;
    CLI::App* exp = app.add_subcommand("experiment", "Run a figure preset, write CSV");
    exp->add_option("--preset", ea.preset, "fig3, fig4, fig5, fig6 or single")
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "single"}));
    exp->add_option("--realizations", ea.realizations)->check(CLI::PositiveNumber);
    exp->add_option("--grid", ea.grid)->check(CLI::PositiveNumber);
    exp->add_option("--seed", ea.seed, "Master seed");
    exp->add_option("--out", ea.out, "CSV path (default stdout)");
    exp->add_option("--summary", ea.summary, "Write per-point means here");
    exp->add_option("--config", ea.config, "JSON overrides of the base config");
    exp->add_option("--n", ea.n_list, "Override the antenna counts");
    exp->add_option("--sweep", ea.sweep, "Override the sweep values (dBW)");
    exp->add_option("--threads", ea.threads)->check(CLI::PositiveNumber);
    exp->add_flag("--timing", ea.timing, "Record wall time per realization");
    exp->add_flag("--quiet", ea.quiet, "No progress output");

    OracleArgs oa;
    CLI::App* oracle = app.add_subcommand("oracle-compare", "Optimizer vs brute-force search");
    oracle->add_option("--n", oa.n)->check(CLI::Range(2, 4));
    oracle->add_option("--realizations", oa.realizations)->check(CLI::PositiveNumber);
    oracle->add_option("--grid", oa.grid)->check(CLI::PositiveNumber);
    oracle->add_option("--pt-dbw", oa.pt_dbw);
    oracle->add_option("--seed", oa.seed);
    oracle->add_option("--budget", oa.budget, "Evaluations per restart")->check(CLI::PositiveNumber);
    oracle->add_option("--restarts", oa.restarts)->check(CLI::PositiveNumber);

    CLI::App* self = app.add_subcommand("selftest", "Run the property checks");

    PlotArgs pa;
    CLI::App* plot = app.add_subcommand("plot", "Render an experiment CSV as SVG");
    plot->add_option("--csv", pa.csv)->required();
    plot->add_option("--out", pa.out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            return run_solve(sa);
        }
        if (*exp) {
            return run_experiment_cmd(ea);
        }
        if (*oracle) {
            return run_oracle_cmd(oa);
        }
        if (*self) {
            return report_selftest(std::cout, run_selftest()) ? 0 : 1;
        }
        if (*plot) {
            emit_plot(pa.csv, pa.out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
