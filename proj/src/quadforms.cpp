#include "nsbf/quadforms.hpp"

#include <algorithm>
#include <cmath>

namespace nsbf {

namespace {

double relative_residual(double lhs, double rhs)
{
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    if (lhs == rhs) {
        return 0.0;
    }
    return std::abs(lhs - rhs) / scale;
}

CMatrix reduce(const CMatrix& g, const CMatrix& full)
{
    return hermitian_part(g.adjoint() * full * g);
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix hermitian_part(const CMatrix& m)
{
    return (m + m.adjoint()) * 0.5;
}

double hermitian_defect(const CMatrix& m)
{
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

ProblemMatrices build_problem_matrices(const SystemConfig& cfg, const ChannelRealization& ch,
                                       const NullSpaceBasis& basis)
{
    if (!(cfg.sigma2_eve1 > 0.0)) {
        throw Error("build_problem_matrices: sigma2_eve1 must be > 0");
    }
    const int n = ch.n_antennas();
    if (basis.g_matrix.rows() != n * n || basis.m < 1) {
        throw Error("build_problem_matrices: basis does not match the channel dimension");
    }

    const double eve1 = cfg.sigma2_eve1;
    const double a1 = cfg.p1 * std::norm(ch.g1);
    const double a2 = cfg.p2 * std::norm(ch.g2);

    ProblemMatrices pm;
    pm.tau1 = 1.0 / (1.0 + a2 / (a1 + eve1));
    pm.tau2 = 1.0 / (1.0 + a1 / (a2 + eve1));
    pm.delta = 1.0 / (1.0 + (a1 + a2) / eve1);
    pm.tau3 = pm.delta / pm.tau1;
    pm.tau4 = pm.delta / pm.tau2;

    const CMatrix f1f1 = ch.f1 * ch.f1.adjoint();
    const CMatrix f2f2 = ch.f2 * ch.f2.adjoint();
    const CMatrix eye = CMatrix::Identity(n, n);
    const CMatrix& g = basis.g_matrix;

    pm.phi1 = reduce(g, (pm.tau1 * cfg.p2) * kron(f1f1, f2f2));
    pm.phi2 = reduce(g, (pm.tau2 * cfg.p1) * kron(f2f2, f1f1));
    pm.sigma_1 = reduce(g, cfg.sigma2_relay * kron(f1f1, eye));
    pm.sigma_2 = reduce(g, cfg.sigma2_relay * kron(f2f2, eye));

    pm.q_r = cfg.p1 * f1f1 + cfg.p2 * f2f2 + cfg.sigma2_relay * eye;
    pm.omega_r = reduce(g, kron(eye, pm.q_r));

    pm.phi31 = pm.phi1 / pm.tau1;
    pm.phi32 = pm.phi2 / pm.tau2;
    pm.omega1 = pm.tau3 * pm.phi32;
    pm.omega2 = pm.tau4 * pm.phi31;
    return pm;
}

double quad_form(const CVector& c, const CMatrix& mat)
{
    if (mat.rows() != mat.cols() || mat.rows() != c.size()) {
        throw Error("quad_form: dimension mismatch");
    }
    if (hermitian_defect(mat) > 1e-10) {
        throw Error("quad_form: matrix is not Hermitian");
    }
    const cplx value = c.dot(mat * c);  // c^H M c
    const double scale = std::max(c.squaredNorm() * mat.cwiseAbs().maxCoeff(), 1e-300);
    if (std::abs(value.imag()) > 1e-10 * scale) {
        throw Error("quad_form: quadratic form has a non-negligible imaginary part");
    }
    return value.real();
}

double relay_power(const CVector& c, const ProblemMatrices& pm)
{
    return quad_form(c, pm.omega_r);
}

double KronIdentityReport::max() const
{
    return std::max({f1_w_f2, f2_w_f1, f1_w, f2_w});
}

KronIdentityReport kron_identity_check(const ChannelRealization& ch, const NullSpaceBasis& basis,
                                       const CVector& c)
{
    return kron_identity_check(ch, beamformer_from_coeffs(basis, c));
}

KronIdentityReport kron_identity_check(const ChannelRealization& ch, const CMatrix& w_mat)
{
    const int n = ch.n_antennas();
    const CVector w = vec_of_adjoint(w_mat);
    const CMatrix f1f1 = ch.f1 * ch.f1.adjoint();
    const CMatrix f2f2 = ch.f2 * ch.f2.adjoint();
    const CMatrix eye = CMatrix::Identity(n, n);

    auto form = [&w](const CMatrix& k) { return w.dot(k * w).real(); };

    // direct evaluation on the matrix
    const double d12 = std::norm((ch.f1.transpose() * w_mat * ch.f2).value());
    const double d21 = std::norm((ch.f2.transpose() * w_mat * ch.f1).value());
    const double d1 = (ch.f1.transpose() * w_mat).squaredNorm();
    const double d2 = (ch.f2.transpose() * w_mat).squaredNorm();

    KronIdentityReport r;
    r.f1_w_f2 = relative_residual(d12, form(kron(f1f1, f2f2)));
    r.f2_w_f1 = relative_residual(d21, form(kron(f2f2, f1f1)));
    r.f1_w = relative_residual(d1, form(kron(f1f1, eye)));
    r.f2_w = relative_residual(d2, form(kron(f2f2, eye)));
    return r;
}

}  // namespace nsbf
