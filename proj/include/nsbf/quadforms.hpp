#pragma once

#include "nsbf/channel.hpp"
#include "nsbf/nullspace.hpp"

namespace nsbf {

/**
 * Hermitian quadratic-form matrices (all m x m, reduced by the null-space
 * basis G) and scalar constants that express the secrecy-rate bounds and
 * relay power as functions of the combination vector c.
 *
 *   R1up  = [1/2 log2(tau1 + c'Phi1 c / (c'Sigma1 c + s1))]+
 *   R2up  = [1/2 log2(tau2 + c'Phi2 c / (c'Sigma2 c + s2))]+
 *   Rsum  = [1/2 log2 delta (1 + c'Phi31 c/(c'Sigma1 c + s1))(1 + c'Phi32 c/(c'Sigma2 c + s2))]+
 *   r2    =  1/2 log2(tau3 + c'Omega1 c / (c'Sigma2 c + s2))
 *   r1    =  1/2 log2(tau4 + c'Omega2 c / (c'Sigma1 c + s1))
 *   p_R   =  c'OmegaR c
 */
struct ProblemMatrices {
    CMatrix phi1, phi2, phi31, phi32;
    CMatrix sigma_1, sigma_2;
    CMatrix omega1, omega2, omega_r;
    double tau1 = 1.0;
    double tau2 = 1.0;
    double tau3 = 1.0;
    double tau4 = 1.0;
    double delta = 1.0;
    CMatrix q_r;  // N x N relay input covariance

    int m() const { return static_cast<int>(phi1.rows()); }
};

/// Dense Kronecker product.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// (M + M^H) / 2
CMatrix hermitian_part(const CMatrix& m);

/// max |M - M^H| relative to max |M| (0 for M = 0).
double hermitian_defect(const CMatrix& m);

/// Throws nsbf::Error when sigma2_eve1 <= 0 or dimensions disagree.
ProblemMatrices build_problem_matrices(const SystemConfig& cfg, const ChannelRealization& ch,
                                       const NullSpaceBasis& basis);

/// Re(c^H M c). Throws for a non-Hermitian M or a non-real result.
double quad_form(const CVector& c, const CMatrix& mat);

/// c^H OmegaR c in watts.
double relay_power(const CVector& c, const ProblemMatrices& pm);

/// Relative residuals of the four vectorization identities, evaluated at
/// w = G c: |f1^T W f2|^2, |f2^T W f1|^2, ||f1^T W||^2, ||f2^T W||^2.
struct KronIdentityReport {
    double f1_w_f2 = 0.0;
    double f2_w_f1 = 0.0;
    double f1_w = 0.0;
    double f2_w = 0.0;

    double max() const;
};

KronIdentityReport kron_identity_check(const ChannelRealization& ch, const NullSpaceBasis& basis,
                                       const CVector& c);

/// Same identities for an arbitrary relay matrix (no null-space restriction).
KronIdentityReport kron_identity_check(const ChannelRealization& ch, const CMatrix& w_mat);

}  // namespace nsbf
