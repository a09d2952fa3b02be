#include "nsbf/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "nsbf/nullspace.hpp"
#include "nsbf/optimizer.hpp"
#include "nsbf/quadforms.hpp"
#include "nsbf/rates.hpp"
#include "nsbf/sdp.hpp"

namespace nsbf {

namespace {

constexpr int kDraws = 25;

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t seed() { return rng_(); }

    CVector cvec(Eigen::Index n)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal_(rng_);
            v[i] = cplx(re, normal_(rng_));
        }
        return v;
    }

    CMatrix cmat(Eigen::Index n)
    {
        CMatrix m(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            m.col(j) = cvec(n);
        }
        return m;
    }

    int antennas() { return 2 + static_cast<int>(rng_() % 4); }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Setup {
    SystemConfig cfg;
    ChannelRealization ch;
    NullSpaceBasis basis;
    ProblemMatrices pm;
};

Setup setup(Draws& d, int n)
{
    Setup s;
    s.cfg.n_antennas = n;
    s.ch = sample_channel(s.cfg, d.seed());
    s.basis = null_basis(build_constraint_matrix(s.ch));
    s.pm = build_problem_matrices(s.cfg, s.ch, s.basis);
    return s;
}

std::string worst(double v, double tol)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst %.3g (tol %.0e)", v, tol);
    return buf;
}

SelfTestResult bounded(const char* name, double value, double tol)
{
    return {name, value <= tol, worst(value, tol)};
}

SelfTestResult vectorization(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const Setup s = setup(d, d.antennas());
        w = std::max(w, kron_identity_check(s.ch, s.basis, d.cvec(s.basis.m)).max());
    }
    return bounded("vectorization identities", w, 1e-10);
}

SelfTestResult nulling(Draws& d)
{
    double w = 0.0;
    bool dims_ok = true;
    for (int k = 0; k < kDraws; ++k) {
        const int n = d.antennas();
        const Setup s = setup(d, n);
        dims_ok = dims_ok && s.basis.m + s.basis.z_rank == n * n;
        const CMatrix wm = beamformer_from_coeffs(s.basis, d.cvec(s.basis.m));
        const double scale = s.ch.fe.norm() * wm.norm() * std::max(s.ch.f1.norm(), s.ch.f2.norm());
        const auto [r1, r2] = nulling_residuals(wm, s.ch);
        w = std::max({w, r1 / scale, r2 / scale});
    }
    SelfTestResult r = bounded("null-space nulling", w, 1e-9);
    r.passed = r.passed && dims_ok;
    if (!dims_ok) {
        r.detail += "; dimension law violated";
    }
    return r;
}

SelfTestResult eve_information(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const int n = d.antennas();
        SystemConfig cfg;
        cfg.n_antennas = n;
        const ChannelRealization ch = sample_channel(cfg, d.seed());
        const CMatrix wm = 0.3 * d.cmat(n);
        w = std::max({w, std::abs(mi_x2_eve_closed(wm, ch, cfg) - mi_x2_eve_det(wm, ch, cfg)),
                      std::abs(mi_x1_eve_closed(wm, ch, cfg) - mi_x1_eve_det(wm, ch, cfg))});
    }
    return bounded("eavesdropper information forms", w, 1e-8);
}

SelfTestResult rate_forms(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const Setup s = setup(d, d.antennas());
        const CVector c = 0.5 * d.cvec(s.basis.m);
        w = std::max(w, end_to_end_rate_check(c, s.basis, s.ch, s.cfg).max());
        const AsrBounds b = asr_bounds(c, s.pm, s.cfg);
        w = std::max(w, std::abs(b.r1_up_raw + b.r2_corner - b.r_sum_up_raw));
    }
    return bounded("rate bound forms", w, 1e-8);
}

SelfTestResult relay_power_identity(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const Setup s = setup(d, d.antennas());
        const CVector c = d.cvec(s.basis.m);
        const CMatrix wm = beamformer_from_coeffs(s.basis, c);
        const double direct = (wm * s.pm.q_r * wm.adjoint()).trace().real();
        w = std::max(w, std::abs(relay_power(c, s.pm) - direct) / std::abs(direct));
    }
    return bounded("relay power identity", w, 1e-10);
}

SelfTestResult case_analysis(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < 4 * kDraws; ++k) {
        const Setup s = setup(d, d.antennas());
        const CVector c = 0.5 * d.cvec(s.basis.m);
        const MinimaxValue mv = minimax_value(c, s.pm, s.cfg);
        const AsrBounds& b = mv.bounds;
        w = std::max(w, std::abs(mv.q_value - std::min({b.r1_up, b.r2_up, b.r3})));
    }
    return bounded("case analysis", w, 1e-12);
}

SelfTestResult solver_eigenvalue(Draws& d)
{
    double w = 0.0;
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k;
        const CMatrix a = d.cmat(n);
        const RMatrix sym = (a.real() + a.real().transpose()) / 2.0;
        SdpProblem p;
        p.block_dims = {n};
        p.objective.block_coeffs = {sym};
        p.constraints.push_back({{{RMatrix::Identity(n, n)}, {}}, Relation::equal, 1.0});
        SolverOptions tight;
        tight.feas_tol = 1e-10;
        tight.gap_tol = 1e-10;
        const SdpSolution sol = solve(p, tight);
        const double lmax = Eigen::SelfAdjointEigenSolver<RMatrix>(sym).eigenvalues().maxCoeff();
        w = std::max(w, sol.status == SdpStatus::optimal ? std::abs(sol.objective_value - lmax)
                                                         : INFINITY);
    }
    return bounded("SDP largest eigenvalue", w, 1e-7);
}

SelfTestResult solve_count(Draws& d)
{
    const Setup s = setup(d, 2);
    OptimizerOptions opts;
    opts.grid_points = 4;
    const OptimizationResult r1 = optimize(s.ch, s.cfg, opts);
    const OptimizationResult r2 = optimize(s.ch, s.cfg, opts);
    const int expected = 3 + 2 * 4 + 4 * 4;
    const bool count_ok = r1.counters.total() == expected;
    const bool same = r1.best.achieved_q == r2.best.achieved_q;
    return {"optimizer solve count and determinism", count_ok && same,
            "solves " + std::to_string(r1.counters.total()) + " of " + std::to_string(expected) +
                (same ? "" : "; reruns differ")};
}

}  // namespace

std::vector<SelfTestResult> run_selftest(std::uint64_t seed)
{
    Draws d(seed);
    std::vector<SelfTestResult> out;
    for (auto check : {vectorization, nulling, eve_information, rate_forms, relay_power_identity,
                       case_analysis, solver_eigenvalue, solve_count}) {
        try {
            out.push_back(check(d));
        } catch (const std::exception& e) {
            out.push_back({"(check threw)", false, e.what()});
        }
    }
    return out;
}

bool report_selftest(std::ostream& os, const std::vector<SelfTestResult>& results)
{
    bool all = true;
    for (const SelfTestResult& r : results) {
        os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.passed;
    }
    return all;
}

}  // namespace nsbf
