#pragma once

#include <optional>
#include <vector>

#include "nsbf/channel.hpp"
#include "nsbf/nullspace.hpp"
#include "nsbf/quadforms.hpp"
#include "nsbf/rates.hpp"
#include "nsbf/sdp.hpp"

namespace nsbf {

/// Slack grids for the ratio t1 = t4 = 1/t2 (t3 is always uniform on
/// (0, bound_t3]).
/// uniform_from_zero: k * bound / K on (0, bound].
/// uniform_reciprocal: uniform on [1/bound_t2, bound_t1] for t1 (t2
///   mirrored), since every feasible c has t1 = 1/t2.
/// geometric_reciprocal: same interval with log spacing.
enum class GridKind { uniform_from_zero, uniform_reciprocal, geometric_reciprocal };

/// Which grid point of a sub-problem supplies its candidate.
/// relaxed: the point with the largest relaxed objective.
/// achieved: every feasible point is extracted; largest exact value wins.
enum class PointSelection { relaxed, achieved };

struct OptimizerOptions {
    int grid_points = 500;
    PointSelection selection = PointSelection::achieved;
    GridKind grid_kind = GridKind::geometric_reciprocal;
    double zeta_min = 1e-9;       // lower bound replacing zeta > 0
    double strict_margin = 1e-9;  // strict inequalities become >= rhs + margin
    /// Solve each relaxation on the smallest subspace that carries all of
    /// its data (exact; see README). Off means the full m x m variable.
    bool compress = true;
    SolverOptions solver;
};

enum class SubProblem { sub1, sub2, sub3, none };

const char* to_string(SubProblem s);

struct Candidate {
    SubProblem source = SubProblem::none;
    CVector c;
    double achieved_q = 0.0;  // minimax_value(c), exact
    double sdr_bound = 0.0;   // relaxed objective mapped to a rate
    std::vector<double> t_values;
    double rank_ratio = 0.0;
    bool feasible_case_verified = false;
    RegionCase case_tag = RegionCase::A;
};

struct SolveCounters {
    int sdp_solves_sub1 = 0;
    int sdp_solves_sub2 = 0;
    int sdp_solves_sub3 = 0;
    int bound_solves = 0;
    int infeasible_solves = 0;
    int failed_solves = 0;

    int total() const { return sdp_solves_sub1 + sdp_solves_sub2 + sdp_solves_sub3 + bound_solves; }
};

struct GridSizes {
    int t1 = 0;
    int t2 = 0;
    int t3 = 0;
    int t4 = 0;
};

struct SlackBounds {
    double t1 = 0.0;  // also bounds t4
    double t2 = 0.0;
    double t3 = 0.0;
};

/// Points k = 1..K between low (excluded) and high (included).
struct SlackGrid {
    double low = 0.0;
    double high = 0.0;
    bool geometric = false;

    double at(int k, int k_max) const;
};

/// Grids for t1, t2, t3, t4 derived from the bounds and the range option.
struct SlackGrids {
    SlackGrid t1, t2, t3, t4;
};

SlackGrids slack_grids(const SlackBounds& b, GridKind kind);

/// Best candidate of one sub-problem plus its bookkeeping.
struct SubProblemResult {
    std::optional<Candidate> best;
    double sdr_bound = 0.0;  // max over feasible grid points; 0 if none
    int solves = 0;
    int infeasible = 0;
    int failed = 0;
};

struct OptimizationResult {
    Candidate best;
    std::vector<Candidate> all_candidates;
    SolveCounters counters;
    GridSizes grid_sizes;
    SlackBounds slack_bounds;
    SlackGrids grids;
    double sdr_upper_bound = 0.0;
    bool no_candidate = false;  // all sub-problems infeasible; best is c = 0
    NullSpaceBasis basis;
    CMatrix w_matrix;
};

/// Max of (c'Sigma2 c + s2)/(c'Sigma1 c + s1) under the relay power limit.
double bound_t1(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts = {});
/// Mirror of bound_t1 with the two nodes exchanged.
double bound_t2(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts = {});
/// Max of c'Phi32 c/(c'Sigma2 c + s2) under the relay power limit.
double bound_t3(const ProblemMatrices& pm, const SystemConfig& cfg, const OptimizerOptions& opts = {});

/// Case-A sub-problem, one relaxation per point of the t1 grid.
SubProblemResult solve_sub1(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t1_grid, const OptimizerOptions& opts);
/// Case-B mirror of solve_sub1.
SubProblemResult solve_sub2(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t2_grid, const OptimizerOptions& opts);
/// Case-C sub-problem over the K x K grid of (t3, t4).
SubProblemResult solve_sub3(const ProblemMatrices& pm, const SystemConfig& cfg,
                            const SlackGrid& t3_grid, const SlackGrid& t4_grid,
                            const OptimizerOptions& opts);

struct RankOneExtraction {
    CVector c;
    double rank_ratio = 0.0;
};

/// c = sqrt(l1) v1 for the top eigenpair of C = Z / zeta. Throws when
/// zeta <= 0 or l1 <= 0.
RankOneExtraction extract_rank_one(const CMatrix& z_star, double zeta_star);

/// Scales c onto the power boundary when c'OmegaR c exceeds P_R.
CVector fit_relay_power(const CVector& c, const ProblemMatrices& pm, double p_relay);

OptimizationResult optimize(const ChannelRealization& ch, const SystemConfig& cfg,
                            const OptimizerOptions& opts = {});

}  // namespace nsbf
