#include "nsbf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nsbf/oracle.hpp"

namespace nsbf {

namespace {

const std::vector<double> kTotalPowerSweep{5.0, 10.0, 15.0, 20.0, 25.0, 30.0};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string clean(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

struct Job {
    const VarianceSetting* setting;
    int n;
    double sweep;
    int realization;
};

ExperimentRow run_job(const ExperimentSpec& spec, const Job& job)
{
    ExperimentRow row;
    row.preset = to_string(spec.preset);
    row.series = job.setting->name;
    row.n = job.n;
    row.sweep_value = job.sweep;
    row.realization = job.realization;

    const auto start = std::chrono::steady_clock::now();
    try {
        const SystemConfig cfg = config_for(spec, *job.setting, job.n, job.sweep);
        const ChannelRealization ch =
            sample_channel(cfg, realization_seed(spec.master_seed, job.n, job.realization));
        const OptimizationResult res = optimize(ch, cfg, spec.optimizer);
        row.achieved_q = res.best.achieved_q;
        row.sdr_bound = res.sdr_upper_bound;
        row.source = to_string(res.best.source);
        row.case_tag = to_string(res.best.case_tag);
        row.rank_ratio = res.best.rank_ratio;
        const SolveCounters& k = res.counters;
        row.solves_sub1 = k.sdp_solves_sub1;
        row.solves_sub2 = k.sdp_solves_sub2;
        row.solves_sub3 = k.sdp_solves_sub3;
        row.solves_bounds = k.bound_solves;
        row.solves_infeasible = k.infeasible_solves;
        row.solves_failed = k.failed_solves;
        row.solves_total = k.total();
    } catch (const std::exception& e) {
        row.status = clean(e.what());
    }
    if (spec.record_time) {
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

const char* to_string(Preset p)
{
    switch (p) {
    case Preset::fig3: return "fig3";
    case Preset::fig4: return "fig4";
    case Preset::fig5: return "fig5";
    case Preset::fig6: return "fig6";
    case Preset::single: return "single";
    }
    return "?";
}

Preset preset_from_string(const std::string& name)
{
    for (Preset p : {Preset::fig3, Preset::fig4, Preset::fig5, Preset::fig6, Preset::single}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw Error("unknown preset '" + name + "'");
}

void ExperimentSpec::validate() const
{
    if (realizations < 1) {
        throw Error("experiment: realizations must be >= 1");
    }
    if (n_antennas.empty() || sweep_dbw.empty() || settings.empty()) {
        throw Error("experiment: antenna list, sweep and settings must be non-empty");
    }
    if (optimizer.grid_points < 1) {
        throw Error("experiment: grid_points must be >= 1");
    }
    if (threads < 1) {
        throw Error("experiment: threads must be >= 1");
    }
    for (int n : n_antennas) {
        if (n < 2) {
            throw Error("experiment: N must be >= 2");
        }
    }
}

ExperimentSpec preset_spec(Preset p)
{
    ExperimentSpec spec;
    spec.preset = p;
    switch (p) {
    case Preset::fig3:
    case Preset::fig4:
        spec.n_antennas = {3, 4, 5};
        spec.sweep_dbw = kTotalPowerSweep;
        break;
    case Preset::fig5:
        spec.n_antennas = {3};
        spec.sweep_dbw = kTotalPowerSweep;
        spec.settings = {
            {"unit", 1.0, 1.0, 1.0, 1.0},
            {"f_both_4", 4.0, 4.0, 1.0, 1.0},
            {"g_both_4", 1.0, 1.0, 4.0, 4.0},
            {"f1_4", 4.0, 1.0, 1.0, 1.0},
            {"g1_4", 1.0, 1.0, 4.0, 1.0},
        };
        break;
    case Preset::fig6:
        spec.n_antennas = {3, 4, 5};
        spec.sweep_kind = SweepKind::source1_power;
        spec.sweep_dbw = {0.0, 5.0, 10.0, 15.0, 20.0};
        break;
    case Preset::single:
        break;
    }
    return spec;
}

SystemConfig config_for(const ExperimentSpec& spec, const VarianceSetting& setting, int n,
                        double sweep_value)
{
    SystemConfig cfg = spec.base;
    cfg.n_antennas = n;
    cfg.var_f1 = setting.var_f1;
    cfg.var_f2 = setting.var_f2;
    cfg.var_g1 = setting.var_g1;
    cfg.var_g2 = setting.var_g2;
    if (spec.sweep_kind == SweepKind::total_power) {
        const PowerSplit ps = power_split_from_total(sweep_value);
        cfg.p1 = ps.p1;
        cfg.p2 = ps.p2;
        cfg.p_relay = ps.p_relay;
    } else {
        cfg.p1 = dbw_to_watts(sweep_value);
        cfg.p2 = dbw_to_watts(spec.fixed_p2_dbw);
        cfg.p_relay = dbw_to_watts(spec.fixed_p_relay_dbw);
    }
    cfg.validate();
    return cfg;
}

std::uint64_t realization_seed(std::uint64_t master, int n, int index)
{
    return derive_seed(master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index));
}

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols = {
        "preset", "series", "n", "sweep_value", "realization", "achieved_q", "sdr_bound",
        "source", "case", "rank_ratio", "solves_sub1", "solves_sub2", "solves_sub3",
        "solves_bounds", "solves_infeasible", "solves_failed", "solves_total", "wall_time_s",
        "status"};
    return cols;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, const Progress& progress)
{
    spec.validate();
    std::vector<Job> jobs;
    for (const VarianceSetting& s : spec.settings) {
        for (int n : spec.n_antennas) {
            for (double x : spec.sweep_dbw) {
                for (int r = 0; r < spec.realizations; ++r) {
                    jobs.push_back({&s, n, x, r});
                }
            }
        }
    }

    std::vector<ExperimentRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> done{0};
    std::mutex progress_mutex;
    const int total = static_cast<int>(jobs.size());

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            rows[i] = run_job(spec, jobs[i]);
            const int d = ++done;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(d, total);
            }
        }
    };

    const int n_threads = std::min<int>(spec.threads, std::max(1, total));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return rows;
}

void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows)
{
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << cols[i];
    }
    os << '\n';
    for (const ExperimentRow& r : rows) {
        os << r.preset << ',' << r.series << ',' << r.n << ',' << fmt(r.sweep_value) << ','
           << r.realization << ',' << fmt(r.achieved_q) << ',' << fmt(r.sdr_bound) << ','
           << r.source << ',' << r.case_tag << ',' << fmt(r.rank_ratio) << ',' << r.solves_sub1
           << ',' << r.solves_sub2 << ',' << r.solves_sub3 << ',' << r.solves_bounds << ','
           << r.solves_infeasible << ',' << r.solves_failed << ',' << r.solves_total << ','
           << fmt(r.wall_time_s) << ',' << clean(r.status) << '\n';
    }
}

std::vector<ExperimentRow> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("CSV is empty");
    }
    const std::vector<std::string> header = split(line);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        index[header[i]] = i;
    }
    for (const std::string& c : csv_columns()) {
        if (!index.count(c)) {
            throw Error("CSV lacks column '" + c + "'");
        }
    }

    std::vector<ExperimentRow> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw Error("CSV line " + std::to_string(line_no) + " has the wrong cell count");
        }
        auto at = [&](const char* name) -> const std::string& { return cells[index.at(name)]; };
        try {
            ExperimentRow r;
            r.preset = at("preset");
            r.series = at("series");
            r.n = std::stoi(at("n"));
            r.sweep_value = std::stod(at("sweep_value"));
            r.realization = std::stoi(at("realization"));
            r.achieved_q = std::stod(at("achieved_q"));
            r.sdr_bound = std::stod(at("sdr_bound"));
            r.source = at("source");
            r.case_tag = at("case");
            r.rank_ratio = std::stod(at("rank_ratio"));
            r.solves_sub1 = std::stoi(at("solves_sub1"));
            r.solves_sub2 = std::stoi(at("solves_sub2"));
            r.solves_sub3 = std::stoi(at("solves_sub3"));
            r.solves_bounds = std::stoi(at("solves_bounds"));
            r.solves_infeasible = std::stoi(at("solves_infeasible"));
            r.solves_failed = std::stoi(at("solves_failed"));
            r.solves_total = std::stoi(at("solves_total"));
            r.wall_time_s = std::stod(at("wall_time_s"));
            r.status = at("status");
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw Error("CSV line " + std::to_string(line_no) + " has a malformed number");
        }
    }
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows)
{
    std::vector<SummaryRow> out;
    auto find = [&out](const ExperimentRow& r) -> SummaryRow& {
        for (SummaryRow& s : out) {
            if (s.series == r.series && s.n == r.n && s.sweep_value == r.sweep_value) {
                return s;
            }
        }
        SummaryRow s;
        s.preset = r.preset;
        s.series = r.series;
        s.n = r.n;
        s.sweep_value = r.sweep_value;
        out.push_back(s);
        return out.back();
    };
    for (const ExperimentRow& r : rows) {
        SummaryRow& s = find(r);
        if (r.status != "ok") {
            ++s.failures;
            continue;
        }
        ++s.count;
        s.mean_achieved_q += r.achieved_q;
        s.mean_sdr_bound += r.sdr_bound;
        s.rank_one_fraction += r.rank_ratio <= 1e-6 ? 1.0 : 0.0;
    }
    for (SummaryRow& s : out) {
        if (s.count > 0) {
            s.mean_achieved_q /= s.count;
            s.mean_sdr_bound /= s.count;
            s.rank_one_fraction /= s.count;
        }
    }
    return out;
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "preset,series,n,sweep_value,count,failures,mean_achieved_q,mean_sdr_bound,"
          "rank_one_fraction\n";
    for (const SummaryRow& s : rows) {
        os << s.preset << ',' << s.series << ',' << s.n << ',' << fmt(s.sweep_value) << ','
           << s.count << ',' << s.failures << ',' << fmt(s.mean_achieved_q) << ','
           << fmt(s.mean_sdr_bound) << ',' << fmt(s.rank_one_fraction) << '\n';
    }
}

std::vector<OracleComparison> run_oracle_compare(const SystemConfig& cfg, int realizations,
                                                 std::uint64_t master_seed,
                                                 const OptimizerOptions& opts, int budget,
                                                 int restarts)
{
    if (realizations < 1) {
        throw Error("oracle-compare: realizations must be >= 1");
    }
    std::vector<OracleComparison> out;
    for (int r = 0; r < realizations; ++r) {
        const std::uint64_t seed = realization_seed(master_seed, cfg.n_antennas, r);
        const ChannelRealization ch = sample_channel(cfg, seed);
        const OptimizationResult res = optimize(ch, cfg, opts);
        const OracleResult orc =
            brute_force_maxmin(ch, cfg, budget, restarts, derive_seed(master_seed, 0, r));
        out.push_back({r, res.best.achieved_q, res.sdr_upper_bound, orc.q_best});
    }
    return out;
}

}  // namespace nsbf
