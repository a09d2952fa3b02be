#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsbf/channel.hpp"
#include "nsbf/optimizer.hpp"

namespace nsbf {

enum class Preset { fig3, fig4, fig5, fig6, single };

const char* to_string(Preset p);
/// Throws nsbf::Error for an unknown name.
Preset preset_from_string(const std::string& name);

/// Channel variances of one curve; the others stay at the config value.
struct VarianceSetting {
    std::string name = "unit";
    double var_f1 = 1.0;
    double var_f2 = 1.0;
    double var_g1 = 1.0;
    double var_g2 = 1.0;
};

/// total_power: P_T in dBW split 1/4, 1/4, 1/2.
/// source1_power: P1 in dBW with P2 and P_R held at the fixed values.
enum class SweepKind { total_power, source1_power };

struct ExperimentSpec {
    Preset preset = Preset::single;
    std::vector<int> n_antennas{3};
    SweepKind sweep_kind = SweepKind::total_power;
    std::vector<double> sweep_dbw{20.0};
    double fixed_p2_dbw = 15.0;
    double fixed_p_relay_dbw = 20.0;
    std::vector<VarianceSetting> settings{VarianceSetting{}};
    SystemConfig base;  // noise levels and anything not swept
    int realizations = 1;
    std::uint64_t master_seed = 1;
    OptimizerOptions optimizer;
    int threads = 1;
    bool record_time = false;  // wall_time_s stays 0 otherwise

    /// Throws nsbf::Error.
    void validate() const;
};

/// Settings of the named figure; grid, realizations and seed are left at
/// their defaults for the caller to override.
ExperimentSpec preset_spec(Preset p);

SystemConfig config_for(const ExperimentSpec& spec, const VarianceSetting& setting, int n,
                        double sweep_value);

/// Seed of realization `index` at `n` antennas. Sweep values and variance
/// settings share it, so every curve sees the same underlying draws.
std::uint64_t realization_seed(std::uint64_t master, int n, int index);

struct ExperimentRow {
    std::string preset;
    std::string series;
    int n = 0;
    double sweep_value = 0.0;
    int realization = 0;
    double achieved_q = 0.0;
    double sdr_bound = 0.0;
    std::string source;
    std::string case_tag;
    double rank_ratio = 0.0;
    int solves_sub1 = 0;
    int solves_sub2 = 0;
    int solves_sub3 = 0;
    int solves_bounds = 0;
    int solves_infeasible = 0;
    int solves_failed = 0;
    int solves_total = 0;
    double wall_time_s = 0.0;
    std::string status = "ok";  // otherwise the error message
};

/// Column names in ExperimentRow order.
const std::vector<std::string>& csv_columns();

/// Called after each finished row with (done, total). May be invoked from
/// worker threads, one call at a time.
using Progress = std::function<void(int, int)>;

/**
 * Runs optimize for every (setting, N, sweep value, realization) and
 * returns the rows in that order regardless of the thread count.
 * A failing realization is recorded in its row's status column.
 */
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          const Progress& progress = {});

void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);
/// Parses what write_csv produced. Throws on missing columns.
std::vector<ExperimentRow> read_csv(std::istream& is);

struct SummaryRow {
    std::string preset;
    std::string series;
    int n = 0;
    double sweep_value = 0.0;
    int count = 0;     // successful realizations
    int failures = 0;
    double mean_achieved_q = 0.0;
    double mean_sdr_bound = 0.0;
    double rank_one_fraction = 0.0;  // rank_ratio <= 1e-6
};

/// Means per (series, N, sweep value) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

struct OracleComparison {
    int realization = 0;
    double achieved_q = 0.0;
    double sdr_bound = 0.0;
    double oracle_q = 0.0;
};

/// Optimizer against the brute-force search on seeded realizations.
std::vector<OracleComparison> run_oracle_compare(const SystemConfig& cfg, int realizations,
                                                 std::uint64_t master_seed,
                                                 const OptimizerOptions& opts, int budget,
                                                 int restarts);

}  // namespace nsbf
