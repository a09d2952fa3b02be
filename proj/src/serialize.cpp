#include "nsbf/serialize.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "nsbf/nullspace.hpp"
#include "nsbf/quadforms.hpp"
#include "nsbf/rates.hpp"

namespace nsbf {

namespace {

struct ConfigField {
    bool is_int;
    std::function<double(const SystemConfig&)> get;
    std::function<void(SystemConfig&, double)> set;
};

#define NSBF_REAL_FIELD(name)                                                \
    {                                                                        \
        #name, ConfigField{false, [](const SystemConfig& c) { return c.name; }, \
                           [](SystemConfig& c, double v) { c.name = v; }}     \
    }

const std::map<std::string, ConfigField>& config_fields()
{
    static const std::map<std::string, ConfigField> fields = {
        {"n_antennas", ConfigField{true,
                                   [](const SystemConfig& c) { return double(c.n_antennas); },
                                   [](SystemConfig& c, double v) { c.n_antennas = int(v); }}},
        NSBF_REAL_FIELD(p1),
        NSBF_REAL_FIELD(p2),
        NSBF_REAL_FIELD(p_relay),
        NSBF_REAL_FIELD(sigma2_node1),
        NSBF_REAL_FIELD(sigma2_node2),
        NSBF_REAL_FIELD(sigma2_relay),
        NSBF_REAL_FIELD(sigma2_eve1),
        NSBF_REAL_FIELD(sigma2_eve2),
        NSBF_REAL_FIELD(var_f1),
        NSBF_REAL_FIELD(var_f2),
        NSBF_REAL_FIELD(var_fe),
        NSBF_REAL_FIELD(var_g1),
        NSBF_REAL_FIELD(var_g2),
    };
    return fields;
}

#undef NSBF_REAL_FIELD

json w_report(const CMatrix& w, const ChannelRealization& ch)
{
    const auto [r1, r2] = nulling_residuals(w, ch);
    return {{"fe_w_f1", r1}, {"fe_w_f2", r2}};
}

}  // namespace

json to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json to_json(const CVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(to_json(v[i]));
    }
    return out;
}

json to_json(const CMatrix& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out.push_back(to_json(CVector(m.row(r).transpose())));
    }
    return out;
}

cplx complex_from_json(const json& j)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error("expected a complex number as [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

CVector cvector_from_json(const json& j)
{
    if (!j.is_array()) {
        throw Error("expected an array of complex numbers");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
    }
    return v;
}

CMatrix cmatrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) {
        throw Error("expected a non-empty array of rows");
    }
    const CVector first = cvector_from_json(j[0]);
    CMatrix m(static_cast<Eigen::Index>(j.size()), first.size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        const CVector row = cvector_from_json(j[r]);
        if (row.size() != first.size()) {
            throw Error("ragged matrix rows");
        }
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

json to_json(const SystemConfig& cfg)
{
    json out = json::object();
    for (const auto& [name, field] : config_fields()) {
        if (field.is_int) {
            out[name] = cfg.n_antennas;
        } else {
            out[name] = field.get(cfg);
        }
    }
    return out;
}

SystemConfig config_from_json(const json& j, const SystemConfig& base)
{
    if (!j.is_object()) {
        throw Error("config: expected a JSON object");
    }
    SystemConfig cfg = base;
    const auto& fields = config_fields();
    for (const auto& [key, value] : j.items()) {
        const auto it = fields.find(key);
        if (it == fields.end()) {
            throw Error("config: unknown key '" + key + "'");
        }
        if (it->second.is_int ? !value.is_number_integer() : !value.is_number()) {
            throw Error("config: wrong type for '" + key + "'");
        }
        it->second.set(cfg, value.get<double>());
    }
    cfg.validate();
    return cfg;
}

json to_json(const ChannelRealization& ch)
{
    return {{"f1", to_json(ch.f1)}, {"f2", to_json(ch.f2)}, {"fe", to_json(ch.fe)},
            {"g1", to_json(ch.g1)}, {"g2", to_json(ch.g2)}};
}

ChannelRealization channel_from_json(const json& j)
{
    if (!j.is_object()) {
        throw Error("channel: expected a JSON object");
    }
    for (const char* key : {"f1", "f2", "fe", "g1", "g2"}) {
        if (!j.contains(key)) {
            throw Error(std::string("channel: missing '") + key + "'");
        }
    }
    ChannelRealization ch;
    ch.f1 = cvector_from_json(j.at("f1"));
    ch.f2 = cvector_from_json(j.at("f2"));
    ch.fe = cvector_from_json(j.at("fe"));
    ch.g1 = complex_from_json(j.at("g1"));
    ch.g2 = complex_from_json(j.at("g2"));
    ch.validate();
    return ch;
}

json to_json(const Candidate& cand)
{
    return {{"source", to_string(cand.source)},
            {"case", to_string(cand.case_tag)},
            {"achieved_q", cand.achieved_q},
            {"sdr_bound", cand.sdr_bound},
            {"t_values", cand.t_values},
            {"rank_ratio", cand.rank_ratio},
            {"feasible_case_verified", cand.feasible_case_verified},
            {"c", to_json(cand.c)}};
}

json solve_report(const ChannelRealization& ch, const SystemConfig& cfg,
                  const OptimizationResult& res)
{
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, res.basis);
    const MinimaxValue mv = minimax_value(res.best.c, pm, cfg);
    const AsrBounds& b = mv.bounds;

    json candidates = json::array();
    for (const Candidate& c : res.all_candidates) {
        candidates.push_back(to_json(c));
    }
    const SolveCounters& k = res.counters;

    return {
        {"config", to_json(cfg)},
        {"channel", to_json(ch)},
        {"basis", {{"m", res.basis.m}, {"z_rank", res.basis.z_rank},
                   {"sigma_max", res.basis.sigma_max}}},
        {"best", to_json(res.best)},
        {"no_candidate", res.no_candidate},
        {"sdr_upper_bound", res.sdr_upper_bound},
        {"w_matrix", to_json(res.w_matrix)},
        {"nulling_residuals", w_report(res.w_matrix, ch)},
        {"relay_power", relay_power(res.best.c, pm)},
        {"rates", {{"r1_up", b.r1_up}, {"r2_up", b.r2_up}, {"r_sum_up", b.r_sum_up},
                   {"r1_corner", b.r1_corner}, {"r2_corner", b.r2_corner}, {"r3", b.r3},
                   {"r1_up_raw", b.r1_up_raw}, {"r2_up_raw", b.r2_up_raw},
                   {"r_sum_up_raw", b.r_sum_up_raw}}},
        {"slack_bounds", {{"t1", res.slack_bounds.t1}, {"t2", res.slack_bounds.t2},
                          {"t3", res.slack_bounds.t3}}},
        {"grid_sizes", {{"t1", res.grid_sizes.t1}, {"t2", res.grid_sizes.t2},
                        {"t3", res.grid_sizes.t3}, {"t4", res.grid_sizes.t4}}},
        {"counters", {{"sub1", k.sdp_solves_sub1}, {"sub2", k.sdp_solves_sub2},
                      {"sub3", k.sdp_solves_sub3}, {"bounds", k.bound_solves},
                      {"infeasible", k.infeasible_solves}, {"failed", k.failed_solves},
                      {"total", k.total()}}},
        {"candidates", candidates},
    };
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace nsbf
