#pragma once

#include "nsbf/channel.hpp"
#include "nsbf/nullspace.hpp"
#include "nsbf/quadforms.hpp"

namespace nsbf {

// All rates are in bits per channel use. The 1/2 two-hop factor is applied
// to the secrecy-rate bounds only; the mutual informations are per hop.

double mi_x2_y1(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);
double mi_x1_y2(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);

/// Second-order statistics of the eavesdropper's two-hop observation
/// y_E = U x + n_E.
struct EveCovariances {
    CMatrix u_matrix;       // [[g1, g2], [fe^T W f1, fe^T W f2]]
    RMatrix m_diag;         // diag(P1, P2)
    RMatrix l_diag;         // diag(sE1^2, sE2^2 + sR^2 ||fe^T W||^2)
    CMatrix k_ye;
    CMatrix k_ye_given_x2;
    CMatrix k_ye_given_x1;
};

EveCovariances eve_covariances(const CMatrix& w_mat, const ChannelRealization& ch,
                               const SystemConfig& cfg);

/// I(x1, x2; y_E) = log2 det(I + U M U^H L^-1)
double mi_joint_eve(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);

/// Closed-form I(x2; y_E) and I(x1; y_E), expanded term by term.
double mi_x2_eve_closed(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);
double mi_x1_eve_closed(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);

/// log2(det K_yE / det K_yE|x2) and its x1 counterpart, from the 2x2
/// covariance matrices.
double mi_x2_eve_det(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);
double mi_x1_eve_det(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg);

/// Borders and corner points of the secrecy-rate region for a given c.
struct AsrBounds {
    double r1_up = 0.0;
    double r2_up = 0.0;
    double r_sum_up = 0.0;
    double r1_corner = 0.0;  // r1, unclamped
    double r2_corner = 0.0;  // r2, unclamped
    double r3 = 0.0;

    // log2 arguments before clamping, kept for identity checks
    double r1_up_raw = 0.0;
    double r2_up_raw = 0.0;
    double r_sum_up_raw = 0.0;
};

AsrBounds asr_bounds(const CVector& c, const ProblemMatrices& pm, const SystemConfig& cfg);

enum class RegionCase { A, B, C };

const char* to_string(RegionCase rc);

struct MinimaxValue {
    double q_value = 0.0;
    RegionCase case_tag = RegionCase::A;
    AsrBounds bounds;
};

/**
 * Max-min secrecy rate over the region for a fixed c.
 * A: R1up <= r2 (ties go here), Q = R1up.
 * B: R2up <= r1, Q = R2up.
 * C: otherwise, Q = r3.
 */
MinimaxValue minimax_value(const CVector& c, const ProblemMatrices& pm, const SystemConfig& cfg);

/// Differences between the quadratic-form bounds and the same bounds
/// assembled from mutual informations of W = beamformer_from_coeffs(G, c).
/// Only meaningful when W nulls the eavesdropper.
struct RateCheckResiduals {
    double r1_up = 0.0;
    double r2_up = 0.0;
    double r_sum_up = 0.0;

    double max() const;
};

RateCheckResiduals end_to_end_rate_check(const CVector& c, const NullSpaceBasis& basis,
                                         const ChannelRealization& ch, const SystemConfig& cfg);

}  // namespace nsbf
