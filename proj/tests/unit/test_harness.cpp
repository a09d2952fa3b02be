#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsbf/experiment.hpp"
#include "nsbf/plot.hpp"
#include "nsbf/selftest.hpp"
#include "nsbf/serialize.hpp"
#include "reference.hpp"

using namespace nsbf;

namespace {

ExperimentSpec small_spec()
{
    ExperimentSpec spec;
    spec.n_antennas = {2};
    spec.sweep_dbw = {10.0, 20.0};
    spec.realizations = 2;
    spec.master_seed = 5;
    spec.optimizer.grid_points = 3;
    return spec;
}

std::string csv_text(const std::vector<ExperimentRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("nsbf_test_" + name);
}

}  // namespace

TEST_CASE("experiment rows follow the solve-count law")
{
    const std::vector<ExperimentRow> rows = run_experiment(small_spec());
    REQUIRE(rows.size() == 4);
    for (const ExperimentRow& r : rows) {
        CHECK(r.status == "ok");
        CHECK(r.solves_total == 3 + 2 * 3 + 3 * 3);
        CHECK(r.solves_sub3 == 9);
        CHECK(r.achieved_q >= 0.0);
        CHECK(r.wall_time_s == 0.0);
    }
    CHECK(rows[0].sweep_value == 10.0);
    CHECK(rows[2].sweep_value == 20.0);
    CHECK(rows[1].realization == 1);
}

TEST_CASE("thread count does not change the output")
{
    ExperimentSpec spec = small_spec();
    const std::string serial = csv_text(run_experiment(spec));
    spec.threads = 2;
    CHECK(csv_text(run_experiment(spec)) == serial);
}

TEST_CASE("CSV round trip")
{
    const std::vector<ExperimentRow> rows = run_experiment(small_spec());
    std::istringstream in(csv_text(rows));
    const std::vector<ExperimentRow> back = read_csv(in);
    REQUIRE(back.size() == rows.size());
    CHECK(csv_text(back) == csv_text(rows));
    CHECK(back[3].achieved_q == doctest::Approx(rows[3].achieved_q).epsilon(1e-11));

    std::istringstream bad("preset,n\nfig3,3\n");
    CHECK_THROWS_AS(read_csv(bad), Error);
}

TEST_CASE("summary averages per point")
{
    const std::vector<ExperimentRow> rows = run_experiment(small_spec());
    const std::vector<SummaryRow> s = summarize(rows);
    REQUIRE(s.size() == 2);
    CHECK(s[0].count == 2);
    CHECK(s[0].mean_achieved_q == doctest::Approx((rows[0].achieved_q + rows[1].achieved_q) / 2));
}

TEST_CASE("presets")
{
    const ExperimentSpec f3 = preset_spec(Preset::fig3);
    CHECK(f3.n_antennas == std::vector<int>{3, 4, 5});
    const SystemConfig c3 = config_for(f3, f3.settings[0], 3, 20.0);
    CHECK(c3.p1 == doctest::Approx(25.0));
    CHECK(c3.p_relay == doctest::Approx(50.0));

    const ExperimentSpec f5 = preset_spec(Preset::fig5);
    CHECK(f5.settings.size() == 5);
    const SystemConfig c5 = config_for(f5, f5.settings[3], 3, 20.0);
    CHECK(c5.var_f1 == 4.0);
    CHECK(c5.var_f2 == 1.0);

    const ExperimentSpec f6 = preset_spec(Preset::fig6);
    CHECK(f6.sweep_kind == SweepKind::source1_power);
    const SystemConfig c6 = config_for(f6, f6.settings[0], 4, 10.0);
    CHECK(c6.p1 == doctest::Approx(10.0));
    CHECK(c6.p2 == doctest::Approx(31.6227766).epsilon(1e-8));
    CHECK(c6.p_relay == doctest::Approx(100.0));

    CHECK(preset_from_string("fig4") == Preset::fig4);
    CHECK_THROWS_AS(preset_from_string("fig9"), Error);
    CHECK(realization_seed(1, 3, 0) != realization_seed(1, 4, 0));
}

TEST_CASE("config JSON is strict")
{
    const SystemConfig base = ref::config(4, 10.0);
    const SystemConfig back = config_from_json(to_json(base));
    CHECK(back.n_antennas == 4);
    CHECK(back.p_relay == base.p_relay);
    CHECK(config_from_json(json{{"p1", 3.0}}, base).p1 == 3.0);
    CHECK_THROWS_AS(config_from_json(json{{"p_one", 3.0}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"p1", "three"}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"p1", -1.0}}), Error);
}

TEST_CASE("channel JSON round trip is exact")
{
    const ChannelRealization ch = sample_channel(ref::config(3), 42);
    const ChannelRealization back = channel_from_json(json::parse(to_json(ch).dump()));
    CHECK(back.f1 == ch.f1);
    CHECK(back.fe == ch.fe);
    CHECK(back.g2 == ch.g2);
    CHECK_THROWS_AS(channel_from_json(json{{"f1", json::array()}}), Error);
}

TEST_CASE("solve report can be re-evaluated from its own fields")
{
    const SystemConfig cfg = ref::config(2, 20.0);
    const ChannelRealization ch = sample_channel(cfg, 7);
    OptimizerOptions o;
    o.grid_points = 4;
    const OptimizationResult res = optimize(ch, cfg, o);
    const json report = json::parse(solve_report(ch, cfg, res).dump());

    const SystemConfig cfg2 = config_from_json(report.at("config"));
    const ChannelRealization ch2 = channel_from_json(report.at("channel"));
    const NullSpaceBasis basis = null_basis(build_constraint_matrix(ch2));
    const ProblemMatrices pm = build_problem_matrices(cfg2, ch2, basis);
    const CVector c = cvector_from_json(report.at("best").at("c"));
    const double q = minimax_value(c, pm, cfg2).q_value;
    CHECK(std::abs(q - report.at("best").at("achieved_q").get<double>()) < 1e-12);

    const CMatrix w = cmatrix_from_json(report.at("w_matrix"));
    const auto [r1, r2] = nulling_residuals(w, ch2);
    CHECK(std::max(r1, r2) <= 1e-9 * std::max(1.0, w.norm()));
    CHECK(report.at("counters").at("total").get<int>() == 3 + 8 + 16);
}

TEST_CASE("plot output")
{
    SUBCASE("empty CSV fails and writes nothing")
    {
        const auto csv = temp_path("empty.csv");
        const auto svg = temp_path("empty.svg");
        std::filesystem::remove(svg);
        {
            std::ofstream os(csv);
            write_csv(os, {});
        }
        CHECK_THROWS_AS(emit_plot(csv.string(), svg.string()), Error);
        CHECK_FALSE(std::filesystem::exists(svg));
        std::filesystem::remove(csv);
    }
    SUBCASE("bound curves are added for the bound preset")
    {
        ExperimentRow a;
        a.preset = "fig4";
        a.n = 3;
        a.sweep_value = 5.0;
        a.achieved_q = 0.5;
        a.sdr_bound = 0.6;
        ExperimentRow b = a;
        b.n = 4;
        const PlotData data = plot_data({a, b});
        CHECK(data.series.size() == 4);
        int dashed = 0;
        for (const PlotSeries& s : data.series) {
            dashed += s.dashed ? 1 : 0;
        }
        CHECK(dashed == 2);
        const std::string svg = render_svg(data);
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("total power (dBW)") != std::string::npos);
        CHECK(svg.find("N=4") != std::string::npos);
    }
    SUBCASE("source power sweep gets its own axis label")
    {
        ExperimentRow a;
        a.preset = "fig6";
        a.n = 3;
        CHECK(plot_data({a}).x_label == "source 1 power (dBW)");
    }
}

TEST_CASE("self-test passes")
{
    const std::vector<SelfTestResult> results = run_selftest();
    CHECK_FALSE(results.empty());
    for (const SelfTestResult& r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.passed);
    }
    std::ostringstream os;
    CHECK(report_selftest(os, results));
}
