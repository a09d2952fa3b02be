#pragma once

#include <iosfwd>
#include <vector>

#include "nsbf/channel.hpp"

namespace nsbf {

enum class Relation { less_equal, equal, greater_equal };
enum class Sense { maximize, minimize };

/// sum_b <block_coeffs[b], X_b> + scalar_coeffs^T x.
/// An empty block_coeffs (or an empty matrix entry) means zero; the same
/// holds for an empty scalar_coeffs.
struct LinearFunctional {
    std::vector<RMatrix> block_coeffs;
    RVector scalar_coeffs;
};

struct SdpConstraint {
    LinearFunctional lhs;
    Relation relation = Relation::equal;
    double rhs = 0.0;
};

/// Real symmetric SDP over a product of PSD blocks and a nonnegative orthant.
struct SdpProblem {
    std::vector<int> block_dims;
    int n_scalars = 0;
    Sense sense = Sense::maximize;
    LinearFunctional objective;
    std::vector<SdpConstraint> constraints;

    /// Throws nsbf::Error on inconsistent dimensions or asymmetric data.
    void validate() const;

    double evaluate(const LinearFunctional& f, const std::vector<RMatrix>& blocks,
                    const RVector& scalars) const;
};

struct SolverOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iters = 200;
};

enum class SdpStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SdpStatus s);

struct SdpSolution {
    SdpStatus status = SdpStatus::numerical_failure;
    std::vector<RMatrix> block_values;
    RVector scalar_values;
    double objective_value = 0.0;  // in the problem's own sense
    double dual_objective = 0.0;
    /// Largest constraint violation, each row measured after scaling the
    /// row to unit Frobenius norm and divided by (1 + |rhs|).
    double max_primal_residual = 0.0;
    /// |primal - dual| / (1 + |primal| + |dual|)
    double duality_gap = 0.0;
    int iterations = 0;
};

/**
 * Primal-dual interior point method on the homogeneous self-dual embedding
 * (HKM search direction, Mehrotra predictor-corrector). Infeasibility and
 * unboundedness are reported from the embedding's certificates.
 * Deterministic and reentrant.
 */
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

/// [[Re H, -Im H], [Im H, Re H]]. Throws for non-Hermitian input.
RMatrix complex_embed(const CMatrix& h);

/// Inverse of complex_embed for a symmetric 2m x 2m matrix that need not
/// have the exact embedded structure: the two diagonal and the two
/// off-diagonal blocks are averaged.
CMatrix complex_extract(const RMatrix& x);

/// Writes the problem in SDPA sparse format after conversion to equality
/// standard form (slack variables appended as a diagonal block).
void write_sdpa(std::ostream& os, const SdpProblem& p);

}  // namespace nsbf
