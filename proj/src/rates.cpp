#include "nsbf/rates.hpp"

#include <algorithm>
#include <cmath>

namespace nsbf {

namespace {

struct RelayTerms {
    cplx a;        // fe^T W f1
    cplx b;        // fe^T W f2
    double leak;   // sR^2 ||fe^T W||^2
};

RelayTerms relay_terms(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const Eigen::RowVectorXcd fe_w = ch.fe.transpose() * w_mat;
    return {(fe_w * ch.f1).value(), (fe_w * ch.f2).value(),
            cfg.sigma2_relay * fe_w.squaredNorm()};
}

double checked_log2(double x, const char* where)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(std::string(where) + ": log2 argument is not positive");
    }
    return std::log2(x);
}

double positive_part(double x)
{
    return x > 0.0 ? x : 0.0;
}

double det2(const CMatrix& k)
{
    return (k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0)).real();
}

}  // namespace

double mi_x2_y1(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const double signal = cfg.p2 * std::norm((ch.f1.transpose() * w_mat * ch.f2).value());
    const double noise =
        cfg.sigma2_relay * (ch.f1.transpose() * w_mat).squaredNorm() + cfg.sigma2_node1;
    return std::log2(1.0 + signal / noise);
}

double mi_x1_y2(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const double signal = cfg.p1 * std::norm((ch.f2.transpose() * w_mat * ch.f1).value());
    const double noise =
        cfg.sigma2_relay * (ch.f2.transpose() * w_mat).squaredNorm() + cfg.sigma2_node2;
    return std::log2(1.0 + signal / noise);
}

EveCovariances eve_covariances(const CMatrix& w_mat, const ChannelRealization& ch,
                               const SystemConfig& cfg)
{
    const RelayTerms t = relay_terms(w_mat, ch, cfg);
    const double p1 = cfg.p1;
    const double p2 = cfg.p2;
    const double e1 = cfg.sigma2_eve1;
    const double e2 = cfg.sigma2_eve2;

    EveCovariances cov;
    cov.u_matrix.resize(2, 2);
    cov.u_matrix << ch.g1, ch.g2, t.a, t.b;
    cov.m_diag = Eigen::Vector2d(p1, p2).asDiagonal();
    cov.l_diag = Eigen::Vector2d(e1, e2 + t.leak).asDiagonal();

    const double hop2_noise = t.leak + e2;

    cov.k_ye.resize(2, 2);
    cov.k_ye(0, 0) = std::norm(ch.g1) * p1 + std::norm(ch.g2) * p2 + e1;
    cov.k_ye(0, 1) = ch.g1 * std::conj(t.a) * p1 + ch.g2 * std::conj(t.b) * p2;
    cov.k_ye(1, 0) = std::conj(cov.k_ye(0, 1));
    cov.k_ye(1, 1) = std::norm(t.a) * p1 + std::norm(t.b) * p2 + hop2_noise;

    cov.k_ye_given_x2.resize(2, 2);
    cov.k_ye_given_x2(0, 0) = std::norm(ch.g1) * p1 + e1;
    cov.k_ye_given_x2(0, 1) = ch.g1 * std::conj(t.a) * p1;
    cov.k_ye_given_x2(1, 0) = std::conj(cov.k_ye_given_x2(0, 1));
    cov.k_ye_given_x2(1, 1) = std::norm(t.a) * p1 + hop2_noise;

    cov.k_ye_given_x1.resize(2, 2);
    cov.k_ye_given_x1(0, 0) = std::norm(ch.g2) * p2 + e1;
    cov.k_ye_given_x1(0, 1) = ch.g2 * std::conj(t.b) * p2;
    cov.k_ye_given_x1(1, 0) = std::conj(cov.k_ye_given_x1(0, 1));
    cov.k_ye_given_x1(1, 1) = std::norm(t.b) * p2 + hop2_noise;
    return cov;
}

double mi_joint_eve(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const EveCovariances cov = eve_covariances(w_mat, ch, cfg);
    const CMatrix l_inv = cov.l_diag.inverse().cast<cplx>();
    const CMatrix arg = CMatrix::Identity(2, 2) +
                        cov.u_matrix * cov.m_diag.cast<cplx>() * cov.u_matrix.adjoint() * l_inv;
    return checked_log2(arg.determinant().real(), "mi_joint_eve");
}

double mi_x2_eve_closed(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const RelayTerms t = relay_terms(w_mat, ch, cfg);
    const double p1 = cfg.p1;
    const double p2 = cfg.p2;
    const double e1 = cfg.sigma2_eve1;
    const double e2 = cfg.sigma2_eve2;
    const double g1 = std::norm(ch.g1);
    const double g2 = std::norm(ch.g2);
    const double a2 = std::norm(t.a);
    const double b2 = std::norm(t.b);

    const double num = g2 * p2 * t.leak + g2 * p2 * a2 * p1 + g2 * p2 * e2 + g1 * p1 * b2 * p2;
    const double den = g1 * p1 * t.leak + g1 * p1 * e2 + e1 * a2 * p1 + e1 * t.leak + e1 * e2;
    const double cross = (ch.g1 * std::conj(t.a) * std::conj(ch.g2) * t.b).real() * p1 * p2;
    const double num2 = e1 * b2 * p2 - 2.0 * cross;
    return checked_log2(1.0 + num / den + num2 / den, "mi_x2_eve_closed");
}

double mi_x1_eve_closed(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const RelayTerms t = relay_terms(w_mat, ch, cfg);
    const double p1 = cfg.p1;
    const double p2 = cfg.p2;
    const double e1 = cfg.sigma2_eve1;
    const double e2 = cfg.sigma2_eve2;
    const double g1 = std::norm(ch.g1);
    const double g2 = std::norm(ch.g2);
    const double a2 = std::norm(t.a);
    const double b2 = std::norm(t.b);

    const double num = g1 * p1 * t.leak + g1 * p1 * b2 * p2 + g1 * p1 * e2 + g2 * p2 * a2 * p1;
    const double den = g2 * p2 * t.leak + g2 * p2 * e2 + e1 * b2 * p2 + e1 * t.leak + e1 * e2;
    const double cross = (ch.g1 * std::conj(t.a) * std::conj(ch.g2) * t.b).real() * p1 * p2;
    const double num2 = e1 * a2 * p1 - 2.0 * cross;
    return checked_log2(1.0 + num / den + num2 / den, "mi_x1_eve_closed");
}

double mi_x2_eve_det(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const EveCovariances cov = eve_covariances(w_mat, ch, cfg);
    const double num = det2(cov.k_ye);
    const double den = det2(cov.k_ye_given_x2);
    if (!(num > 0.0) || !(den > 0.0)) {
        throw Error("mi_x2_eve_det: covariance determinant is not positive");
    }
    return std::log2(num / den);
}

double mi_x1_eve_det(const CMatrix& w_mat, const ChannelRealization& ch, const SystemConfig& cfg)
{
    const EveCovariances cov = eve_covariances(w_mat, ch, cfg);
    const double num = det2(cov.k_ye);
    const double den = det2(cov.k_ye_given_x1);
    if (!(num > 0.0) || !(den > 0.0)) {
        throw Error("mi_x1_eve_det: covariance determinant is not positive");
    }
    return std::log2(num / den);
}

AsrBounds asr_bounds(const CVector& c, const ProblemMatrices& pm, const SystemConfig& cfg)
{
    const double den1 = quad_form(c, pm.sigma_1) + cfg.sigma2_node1;
    const double den2 = quad_form(c, pm.sigma_2) + cfg.sigma2_node2;
    // the numerators are PSD forms; roundoff must not push them below zero
    const double phi1 = std::max(0.0, quad_form(c, pm.phi1));
    const double phi2 = std::max(0.0, quad_form(c, pm.phi2));
    const double phi31 = std::max(0.0, quad_form(c, pm.phi31));
    const double phi32 = std::max(0.0, quad_form(c, pm.phi32));
    const double om1 = std::max(0.0, quad_form(c, pm.omega1));
    const double om2 = std::max(0.0, quad_form(c, pm.omega2));

    AsrBounds b;
    b.r1_up_raw = 0.5 * std::log2(pm.tau1 + phi1 / den1);
    b.r2_up_raw = 0.5 * std::log2(pm.tau2 + phi2 / den2);
    b.r_sum_up_raw = 0.5 * std::log2(pm.delta * (1.0 + phi31 / den1) * (1.0 + phi32 / den2));
    b.r2_corner = 0.5 * std::log2(pm.tau3 + om1 / den2);
    b.r1_corner = 0.5 * std::log2(pm.tau4 + om2 / den1);

    b.r1_up = positive_part(b.r1_up_raw);
    b.r2_up = positive_part(b.r2_up_raw);
    b.r_sum_up = positive_part(b.r_sum_up_raw);
    b.r3 = b.r_sum_up / 2.0;
    return b;
}

const char* to_string(RegionCase rc)
{
    switch (rc) {
    case RegionCase::A: return "A";
    case RegionCase::B: return "B";
    case RegionCase::C: return "C";
    }
    return "?";
}

MinimaxValue minimax_value(const CVector& c, const ProblemMatrices& pm, const SystemConfig& cfg)
{
    MinimaxValue out;
    out.bounds = asr_bounds(c, pm, cfg);
    const AsrBounds& b = out.bounds;
    if (b.r1_up <= b.r2_corner) {
        out.case_tag = RegionCase::A;
        out.q_value = b.r1_up;
    } else if (b.r2_up <= b.r1_corner) {
        out.case_tag = RegionCase::B;
        out.q_value = b.r2_up;
    } else {
        out.case_tag = RegionCase::C;
        out.q_value = b.r3;
    }
    return out;
}

double RateCheckResiduals::max() const
{
    return std::max({r1_up, r2_up, r_sum_up});
}

RateCheckResiduals end_to_end_rate_check(const CVector& c, const NullSpaceBasis& basis,
                                         const ChannelRealization& ch, const SystemConfig& cfg)
{
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, basis);
    const AsrBounds tau_form = asr_bounds(c, pm, cfg);
    const CMatrix w = beamformer_from_coeffs(basis, c);

    const double i21 = mi_x2_y1(w, ch, cfg);
    const double i12 = mi_x1_y2(w, ch, cfg);
    const double r1 = 0.5 * positive_part(i21 - mi_x2_eve_closed(w, ch, cfg));
    const double r2 = 0.5 * positive_part(i12 - mi_x1_eve_closed(w, ch, cfg));
    const double rs = 0.5 * positive_part(i12 + i21 - mi_joint_eve(w, ch, cfg));

    return {std::abs(tau_form.r1_up - r1), std::abs(tau_form.r2_up - r2),
            std::abs(tau_form.r_sum_up - rs)};
}

}  // namespace nsbf
