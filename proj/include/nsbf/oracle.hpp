#pragma once

#include <cstdint>
#include <functional>

#include "nsbf/channel.hpp"
#include "nsbf/quadforms.hpp"
#include "nsbf/rates.hpp"

namespace nsbf {

struct OracleResult {
    CVector c_best;
    double q_best = 0.0;
    long evaluations = 0;
    int restarts = 0;
};

/// Objective to maximize over the power ellipsoid; return -infinity to
/// reject a point.
using OracleObjective = std::function<double(const CVector&)>;

/**
 * Multistart derivative-free search over c'OmegaR c <= P_R.
 * Restart r starts from a random direction scaled to radius
 * 0.1 * (1 + r mod 10) of the power boundary and runs a coordinate pattern
 * search (+/- steps on real and imaginary parts, step halved over 40
 * levels). budget caps evaluations per restart, so a larger budget extends
 * every restart's trajectory.
 */
OracleResult brute_force_maximize(const ProblemMatrices& pm, const SystemConfig& cfg,
                                  const OracleObjective& objective, int budget, int restarts,
                                  std::uint64_t seed);

/// Maximizes minimax_value(c).
OracleResult brute_force_maxmin(const ChannelRealization& ch, const SystemConfig& cfg, int budget,
                                int restarts, std::uint64_t seed);

/// Same search restricted to the points whose case tag is rc.
OracleResult brute_force_maxmin_in_case(const ProblemMatrices& pm, const SystemConfig& cfg,
                                        RegionCase rc, int budget, int restarts,
                                        std::uint64_t seed);

/// Rotates c so that its first nonzero entry is real and nonnegative.
CVector fix_phase(const CVector& c);

}  // namespace nsbf
