#include "nsbf/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nsbf {

namespace {

constexpr double kSupportTolerance = 1e-10;

RMatrix half_embed(const CMatrix& m)
{
    return 0.5 * complex_embed(hermitian_part(m));
}

// Relaxation data in the (possibly compressed) real-embedded coordinates.
// A relaxed variable X of size 2d maps back to Z = T X_c T^H, where X_c is
// the complex matrix carried by X and T is m x d.
struct Relaxation {
    const ProblemMatrices* pm = nullptr;
    const SystemConfig* cfg = nullptr;
    OptimizerOptions opts;
    CMatrix t;
    int dim = 0;
    RMatrix phi1, phi2, phi31, phi32, sigma_1, sigma_2, omega1, omega2, omega_r;

    CMatrix full_z(const RMatrix& x) const { return hermitian_part(t * complex_extract(x) * t.adjoint()); }
};

// Every relaxation uses Omega_R only through the power constraint, and all
// other matrices live in the span of the Sigma/Phi ranges. After whitening
// by Omega_R^{-1/2}, the orthogonal complement of that span only consumes
// power, so the optimum is attained with Z supported on the span.
CMatrix support_map(const ProblemMatrices& pm)
{
    const int m = pm.m();
    const CMatrix eye = CMatrix::Identity(m, m);

    Eigen::SelfAdjointEigenSolver<CMatrix> eo(hermitian_part(pm.omega_r));
    const RVector ev = eo.eigenvalues();
    if (!(ev[0] > 1e-12 * ev[m - 1])) {
        return eye;
    }
    const CMatrix whiten =
        eo.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eo.eigenvectors().adjoint();

    CMatrix acc = CMatrix::Zero(m, m);
    for (const CMatrix* mat : {&pm.sigma_1, &pm.sigma_2, &pm.phi1, &pm.phi2}) {
        const CMatrix w = hermitian_part(whiten * (*mat) * whiten);
        const double n = w.norm();
        if (n > 0.0) {
            acc += w / n;
        }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> ea(hermitian_part(acc));
    const RVector ew = ea.eigenvalues();
    const double top = ew[m - 1];
    if (!(top > 0.0)) {
        return eye;
    }
    int keep = 0;
    for (int i = 0; i < m; ++i) {
        if (ew[i] > kSupportTolerance * top) {
            ++keep;
        }
    }
    return whiten * ea.eigenvectors().rightCols(keep);
}

Relaxation make_relaxation(const ProblemMatrices& pm, const SystemConfig& cfg,
                           const OptimizerOptions& opts)
{
    Relaxation r;
    r.pm = &pm;
    r.cfg = &cfg;
    r.opts = opts;
    r.t = opts.compress ? support_map(pm) : CMatrix::Identity(pm.m(), pm.m());
    r.dim = 2 * static_cast<int>(r.t.cols());
    auto red = [&r](const CMatrix& m) { return half_embed(r.t.adjoint() * m * r.t); };
    r.phi1 = red(pm.phi1);
    r.phi2 = red(pm.phi2);
    r.phi31 = red(pm.phi31);
    r.phi32 = red(pm.phi32);
    r.sigma_1 = red(pm.sigma_1);
    r.sigma_2 = red(pm.sigma_2);
    r.omega1 = red(pm.omega1);
    r.omega2 = red(pm.omega2);
    r.omega_r = red(pm.omega_r);
    return r;
}

// Problem skeleton: one PSD block, one scalar zeta.
SdpProblem skeleton(const Relaxation& r)
{
    SdpProblem p;
    p.block_dims = {r.dim};
    p.n_scalars = 1;
    p.sense = Sense::maximize;
    return p;
}

LinearFunctional functional(const RMatrix& blk, double zeta_coeff)
{
    return {{blk}, RVector::Constant(1, zeta_coeff)};
}

void add(SdpProblem& p, const RMatrix& blk, double zeta_coeff, Relation rel, double rhs)
{
    p.constraints.push_back({functional(blk, zeta_coeff), rel, rhs});
}

void add_power_and_zeta(SdpProblem& p, const Relaxation& r)
{
    add(p, r.omega_r, -r.cfg->p_relay, Relation::less_equal, 0.0);
    p.constraints.push_back({{{}, RVector::Ones(1)}, Relation::greater_equal, r.opts.zeta_min});
}

struct PointOutcome {
    SdpStatus status = SdpStatus::numerical_failure;
    double objective = 0.0;
    CMatrix z;
    double zeta = 0.0;
};

PointOutcome run(const SdpProblem& p, const Relaxation& r)
{
    const SdpSolution s = solve(p, r.opts.solver);
    PointOutcome out;
    out.status = s.status;
    if (s.status == SdpStatus::optimal) {
        out.objective = s.objective_value;
        out.z = r.full_z(s.block_values[0]);
        out.zeta = s.scalar_values[0];
    }
    return out;
}

double bound_value(const SdpProblem& p, const Relaxation& r, const char* name)
{
    const PointOutcome o = run(p, r);
    if (o.status != SdpStatus::optimal) {
        throw Error(std::string(name) + ": relaxation not solved (" + to_string(o.status) + ")");
    }
    return o.objective;
}

double bound_t1_impl(const Relaxation& r)
{
    const SystemConfig& cfg = *r.cfg;
    SdpProblem p = skeleton(r);
    p.objective = functional(r.sigma_2, cfg.sigma2_node2);
    add(p, r.sigma_1, cfg.sigma2_node1, Relation::equal, 1.0);
    add_power_and_zeta(p, r);
    return bound_value(p, r, "bound_t1");
}

double bound_t2_impl(const Relaxation& r)
{
    const SystemConfig& cfg = *r.cfg;
    SdpProblem p = skeleton(r);
    p.objective = functional(r.sigma_1, cfg.sigma2_node1);
    add(p, r.sigma_2, cfg.sigma2_node2, Relation::equal, 1.0);
    add_power_and_zeta(p, r);
    return bound_value(p, r, "bound_t2");
}

double bound_t3_impl(const Relaxation& r)
{
    const SystemConfig& cfg = *r.cfg;
    SdpProblem p = skeleton(r);
    p.objective = functional(r.phi32, 0.0);
    add(p, r.sigma_2, cfg.sigma2_node2, Relation::equal, 1.0);
    add_power_and_zeta(p, r);
    return std::max(0.0, bound_value(p, r, "bound_t3"));
}

double positive_part(double x)
{
    return x > 0.0 ? x : 0.0;
}

RegionCase expected_case(SubProblem s)
{
    switch (s) {
    case SubProblem::sub1: return RegionCase::A;
    case SubProblem::sub2: return RegionCase::B;
    default: return RegionCase::C;
    }
}

Candidate make_candidate(const Relaxation& r, SubProblem source, const PointOutcome& o,
                         std::vector<double> t_values)
{
    Candidate cand;
    cand.source = source;
    cand.t_values = std::move(t_values);
    try {
        const RankOneExtraction ext = extract_rank_one(o.z, o.zeta);
        cand.c = fit_relay_power(ext.c, *r.pm, r.cfg->p_relay);
        cand.rank_ratio = ext.rank_ratio;
    } catch (const Error&) {
        // Z* = 0: the grid point only admits the zero beamformer
        cand.c = CVector::Zero(r.pm->m());
        cand.rank_ratio = 0.0;
    }
    const MinimaxValue mv = minimax_value(cand.c, *r.pm, *r.cfg);
    cand.achieved_q = mv.q_value;
    cand.case_tag = mv.case_tag;
    cand.feasible_case_verified = mv.case_tag == expected_case(source);
    return cand;
}

// Tracks the winning grid point of one sub-problem. Earlier points win ties.
class PointPicker {
public:
    PointPicker(const Relaxation& r, SubProblem source) : r_(r), source_(source) {}

    void offer(const PointOutcome& o, double raw_rate, std::vector<double> t_values)
    {
        if (r_.opts.selection == PointSelection::achieved) {
            Candidate cand = make_candidate(r_, source_, o, std::move(t_values));
            if (!best_ || cand.achieved_q > best_->achieved_q) {
                best_ = std::move(cand);
            }
        } else if (!kept_ || raw_rate > kept_rate_) {
            kept_ = o;
            kept_rate_ = raw_rate;
            kept_t_ = std::move(t_values);
        }
    }

    std::optional<Candidate> result() const
    {
        if (kept_) {
            return make_candidate(r_, source_, *kept_, kept_t_);
        }
        return best_;
    }

private:
    const Relaxation& r_;
    SubProblem source_;
    std::optional<Candidate> best_;
    std::optional<PointOutcome> kept_;
    double kept_rate_ = 0.0;
    std::vector<double> kept_t_;
};

void tally(SubProblemResult& res, SdpStatus status)
{
    ++res.solves;
    if (status == SdpStatus::infeasible) {
        ++res.infeasible;
    } else if (status != SdpStatus::optimal) {
        ++res.failed;
    }
}

struct EdgeSpec {
    SubProblem source;
    const RMatrix* phi;
    const RMatrix* sigma_norm;
    double s_norm;
    const RMatrix* sigma_slack;
    double s_slack;
    const RMatrix* omega;
    double corner_rhs;
    double tau_own;
};

SubProblemResult solve_edge(const Relaxation& r, const EdgeSpec& e, const SlackGrid& grid)
{
    const int k_max = r.opts.grid_points;
    if (k_max < 1) {
        throw Error("grid_points must be >= 1");
    }
    SubProblemResult res;
    PointPicker picker(r, e.source);
    SdpProblem base = skeleton(r);
    base.objective = functional(*e.phi, 0.0);
    add(base, *e.sigma_norm, e.s_norm, Relation::equal, 1.0);
    add_power_and_zeta(base, r);

    for (int k = 1; k <= k_max; ++k) {
        const double t = grid.at(k, k_max);
        SdpProblem p = base;
        add(p, RMatrix(*e.phi - *e.omega / t), 0.0, Relation::less_equal, e.corner_rhs);
        add(p, *e.sigma_slack, e.s_slack, Relation::equal, t);
        const PointOutcome o = run(p, r);
        tally(res, o.status);
        if (o.status != SdpStatus::optimal) {
            continue;
        }
        const double raw = 0.5 * std::log2(e.tau_own + std::max(0.0, o.objective));
        res.sdr_bound = std::max(res.sdr_bound, positive_part(raw));
        picker.offer(o, raw, {t});
    }
    res.best = picker.result();
    if (res.best) {
        res.best->sdr_bound = res.sdr_bound;
    }
    return res;
}

SubProblemResult sub1_impl(const Relaxation& r, const SlackGrid& grid)
{
    const ProblemMatrices& pm = *r.pm;
    const SystemConfig& cfg = *r.cfg;
    return solve_edge(r, {SubProblem::sub1, &r.phi1, &r.sigma_1, cfg.sigma2_node1, &r.sigma_2,
                          cfg.sigma2_node2, &r.omega1, pm.tau3 - pm.tau1, pm.tau1},
                      grid);
}

SubProblemResult sub2_impl(const Relaxation& r, const SlackGrid& grid)
{
    const ProblemMatrices& pm = *r.pm;
    const SystemConfig& cfg = *r.cfg;
    return solve_edge(r, {SubProblem::sub2, &r.phi2, &r.sigma_2, cfg.sigma2_node2, &r.sigma_1,
                          cfg.sigma2_node1, &r.omega2, pm.tau4 - pm.tau2, pm.tau2},
                      grid);
}

SubProblemResult sub3_impl(const Relaxation& r, const SlackGrid& g3, const SlackGrid& g4)
{
    const ProblemMatrices& pm = *r.pm;
    const SystemConfig& cfg = *r.cfg;
    const int k_max = r.opts.grid_points;
    if (k_max < 1) {
        throw Error("grid_points must be >= 1");
    }
    const double eta = r.opts.strict_margin;

    SubProblemResult res;
    PointPicker picker(r, SubProblem::sub3);
    SdpProblem base = skeleton(r);
    base.objective = functional(r.phi31, 0.0);
    add(base, r.sigma_1, cfg.sigma2_node1, Relation::equal, 1.0);
    add_power_and_zeta(base, r);

    for (int i = 1; i <= k_max; ++i) {
        const double t3 = g3.at(i, k_max);
        for (int j = 1; j <= k_max; ++j) {
            const double t4 = g4.at(j, k_max);
            SdpProblem p = base;
            add(p, RMatrix(r.phi32 - t3 * r.sigma_2), -t3 * cfg.sigma2_node2, Relation::equal, 0.0);
            add(p, RMatrix(r.phi1 - r.omega1 / t4), 0.0, Relation::greater_equal,
                pm.tau3 - pm.tau1 + eta);
            add(p, RMatrix(r.phi2 / t4 - r.omega2), 0.0, Relation::greater_equal,
                pm.tau4 - pm.tau2 + eta);
            add(p, r.sigma_2, cfg.sigma2_node2, Relation::equal, t4);
            const PointOutcome o = run(p, r);
            tally(res, o.status);
            if (o.status != SdpStatus::optimal) {
                continue;
            }
            const double arg = pm.delta * (1.0 + std::max(0.0, o.objective)) * (1.0 + t3);
            const double raw = 0.25 * std::log2(arg);
            res.sdr_bound = std::max(res.sdr_bound, positive_part(raw));
            picker.offer(o, raw, {t3, t4});
        }
    }
    res.best = picker.result();
    if (res.best) {
        res.best->sdr_bound = res.sdr_bound;
    }
    return res;
}

}  // namespace

const char* to_string(SubProblem s)
{
    switch (s) {
    case SubProblem::sub1: return "sub1";
    case SubProblem::sub2: return "sub2";
    case SubProblem::sub3: return "sub3";
    case SubProblem::none: return "none";
    }
    return "?";
}

double bound_t1(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts)
{
    return bound_t1_impl(make_relaxation(pm, cfg, opts));
}

double bound_t2(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts)
{
    return bound_t2_impl(make_relaxation(pm, cfg, opts));
}

double bound_t3(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts)
{
    return bound_t3_impl(make_relaxation(pm, cfg, opts));
}

double SlackGrid::at(int k, int k_max) const
{
    if (geometric && low > 0.0) {
        return low * std::pow(high / low, static_cast<double>(k) / k_max);
    }
    return low + (high - low) * k / k_max;
}

SlackGrids slack_grids(const SlackBounds& b, GridKind kind)
{
    SlackGrids g;
    g.t1.high = b.t1;
    g.t2.high = b.t2;
    g.t3.high = b.t3;
    if (kind != GridKind::uniform_from_zero && b.t1 > 0.0 && b.t2 > 0.0) {
        g.t1.low = std::min(1.0 / b.t2, b.t1);
        g.t2.low = std::min(1.0 / b.t1, b.t2);
        g.t1.geometric = g.t2.geometric = kind == GridKind::geometric_reciprocal;
    }
    g.t4 = g.t1;
    return g;
}

SubProblemResult solve_sub1(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t1_grid, const OptimizerOptions& opts)
{
    return sub1_impl(make_relaxation(pm, cfg, opts), t1_grid);
}

SubProblemResult solve_sub2(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t2_grid, const OptimizerOptions& opts)
{
    return sub2_impl(make_relaxation(pm, cfg, opts), t2_grid);
}

SubProblemResult solve_sub3(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t3_grid, const SlackGrid& t4_grid,
                            const OptimizerOptions& opts)
{
    return sub3_impl(make_relaxation(pm, cfg, opts), t3_grid, t4_grid);
}

RankOneExtraction extract_rank_one(const CMatrix& z_star, double zeta_star)
{
    if (!(zeta_star > 0.0)) {
        throw Error("extract_rank_one: zeta must be positive");
    }
    const CMatrix c_mat = hermitian_part(z_star) / zeta_star;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c_mat);
    const auto m = c_mat.rows();
    const double l1 = es.eigenvalues()[m - 1];
    if (!(l1 > 0.0)) {
        throw Error("extract_rank_one: relaxed solution has no positive eigenvalue");
    }
    RankOneExtraction out;
    out.c = std::sqrt(l1) * es.eigenvectors().col(m - 1);
    out.rank_ratio = m > 1 ? std::max(0.0, es.eigenvalues()[m - 2]) / l1 : 0.0;
    return out;
}

CVector fit_relay_power(const CVector& c, const ProblemMatrices& pm, double p_relay)
{
    const double pw = relay_power(c, pm);
    if (pw > p_relay) {
        return c * std::sqrt(p_relay / pw);
    }
    return c;
}

OptimizationResult optimize(const ChannelRealization& ch, const SystemConfig& cfg,
                            const OptimizerOptions& opts)
{
    cfg.validate();
    ch.validate();
    if (opts.grid_points < 1) {
        throw Error("optimize: grid_points must be >= 1");
    }

    OptimizationResult res;
    res.basis = null_basis(build_constraint_matrix(ch));
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, res.basis);
    const Relaxation r = make_relaxation(pm, cfg, opts);

    res.slack_bounds.t1 = bound_t1_impl(r);
    res.slack_bounds.t2 = bound_t2_impl(r);
    res.slack_bounds.t3 = bound_t3_impl(r);
    res.counters.bound_solves = 3;

    const int k = opts.grid_points;
    res.grid_sizes = {k, k, k, k};

    res.grids = slack_grids(res.slack_bounds, opts.grid_kind);
    const SubProblemResult s1 = sub1_impl(r, res.grids.t1);
    const SubProblemResult s2 = sub2_impl(r, res.grids.t2);
    const SubProblemResult s3 = sub3_impl(r, res.grids.t3, res.grids.t4);
    res.counters.sdp_solves_sub1 = s1.solves;
    res.counters.sdp_solves_sub2 = s2.solves;
    res.counters.sdp_solves_sub3 = s3.solves;
    res.counters.infeasible_solves = s1.infeasible + s2.infeasible + s3.infeasible;
    res.counters.failed_solves = s1.failed + s2.failed + s3.failed;

    for (const SubProblemResult* s : {&s1, &s2, &s3}) {
        if (s->best) {
            res.all_candidates.push_back(*s->best);
            res.sdr_upper_bound = std::max(res.sdr_upper_bound, s->sdr_bound);
        }
    }

    if (res.all_candidates.empty()) {
        res.no_candidate = true;
        res.best.c = CVector::Zero(pm.m());
        const MinimaxValue mv = minimax_value(res.best.c, pm, cfg);
        res.best.achieved_q = mv.q_value;
        res.best.case_tag = mv.case_tag;
    } else {
        res.best = res.all_candidates.front();
        for (const Candidate& c : res.all_candidates) {
            if (c.achieved_q > res.best.achieved_q) {
                res.best = c;
            }
        }
    }
    res.w_matrix = beamformer_from_coeffs(res.basis, res.best.c);
    return res;
}

}  // namespace nsbf
