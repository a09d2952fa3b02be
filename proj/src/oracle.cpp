#include "nsbf/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "nsbf/nullspace.hpp"

namespace nsbf {

namespace {

constexpr int kShrinkLevels = 40;
constexpr int kRadiusSteps = 10;

class Search {
public:
    Search(const ProblemMatrices& pm, const SystemConfig& cfg, const OracleObjective& f, int budget)
        : pm_(pm), p_relay_(cfg.p_relay), f_(f), budget_(budget)
    {
    }

    // Feasible by scaling onto the ellipsoid when outside it.
    CVector project(const CVector& c) const
    {
        const double pw = relay_power(c, pm_);
        CVector out = pw > p_relay_ ? CVector(c * std::sqrt(p_relay_ / pw)) : c;
        return fix_phase(out);
    }

    bool exhausted() const { return used_ >= budget_; }
    long used() const { return used_; }

    double eval(const CVector& c)
    {
        ++used_;
        return f_(c);
    }

    void run(CVector c, double step, CVector& best_c, double& best_q)
    {
        c = project(c);
        double q = eval(c);
        const auto m = c.size();
        const cplx units[2] = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
        for (int level = 0; level < kShrinkLevels && !exhausted(); ++level) {
            bool improved = true;
            while (improved && !exhausted()) {
                improved = false;
                for (Eigen::Index k = 0; k < m && !exhausted(); ++k) {
                    for (const cplx& u : units) {
                        for (double sign : {1.0, -1.0}) {
                            if (exhausted()) {
                                break;
                            }
                            CVector trial = c;
                            trial[k] += sign * step * u;
                            trial = project(trial);
                            const double tq = eval(trial);
                            if (tq > q) {
                                q = tq;
                                c = trial;
                                improved = true;
                            }
                        }
                    }
                }
            }
            step *= 0.5;
        }
        if (q > best_q) {
            best_q = q;
            best_c = c;
        }
    }

private:
    const ProblemMatrices& pm_;
    double p_relay_;
    const OracleObjective& f_;
    long budget_;
    long used_ = 0;
};

}  // namespace

CVector fix_phase(const CVector& c)
{
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double a = std::abs(c[i]);
        if (a > 0.0) {
            return c * (std::conj(c[i]) / a);
        }
    }
    return c;
}

OracleResult brute_force_maximize(const ProblemMatrices& pm, const SystemConfig& cfg,
                                  const OracleObjective& objective, int budget, int restarts,
                                  std::uint64_t seed)
{
    if (budget < 1 || restarts < 1) {
        throw Error("brute_force_maximize: budget and restarts must be >= 1");
    }
    const int m = pm.m();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    OracleResult out;
    out.c_best = CVector::Zero(m);
    out.q_best = -std::numeric_limits<double>::infinity();
    out.restarts = restarts;

    for (int r = 0; r < restarts; ++r) {
        CVector d(m);
        for (int i = 0; i < m; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            d[i] = cplx(re, im);
        }
        const double pw = relay_power(d, pm);
        if (!(pw > 0.0)) {
            continue;
        }
        const CVector boundary = d * std::sqrt(cfg.p_relay / pw);
        const double radius = 0.1 * (1 + r % kRadiusSteps);

        Search search(pm, cfg, objective, budget);
        search.run(radius * boundary, 0.5 * boundary.norm(), out.c_best, out.q_best);
        out.evaluations += search.used();
    }
    return out;
}

OracleResult brute_force_maxmin(const ChannelRealization& ch, const SystemConfig& cfg, int budget,
                                int restarts, std::uint64_t seed)
{
    const NullSpaceBasis basis = null_basis(build_constraint_matrix(ch));
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, basis);
    OracleResult res = brute_force_maximize(
        pm, cfg, [&](const CVector& c) { return minimax_value(c, pm, cfg).q_value; }, budget,
        restarts, seed);
    if (!std::isfinite(res.q_best)) {
        res.q_best = 0.0;
    }
    return res;
}

OracleResult brute_force_maxmin_in_case(const ProblemMatrices& pm, const SystemConfig& cfg,
                                        RegionCase rc, int budget, int restarts,
                                        std::uint64_t seed)
{
    return brute_force_maximize(
        pm, cfg,
        [&](const CVector& c) {
            const MinimaxValue mv = minimax_value(c, pm, cfg);
            return mv.case_tag == rc ? mv.q_value : -std::numeric_limits<double>::infinity();
        },
        budget, restarts, seed);
}

}  // namespace nsbf
