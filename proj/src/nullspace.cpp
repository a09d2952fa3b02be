#include "nsbf/nullspace.hpp"

#include <cmath>

namespace nsbf {

int NullSpaceBasis::n_antennas() const
{
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(g_matrix.rows()))));
}

CMatrix build_constraint_matrix(const ChannelRealization& ch)
{
    const int n = ch.n_antennas();
    if (n < 2 || ch.f2.size() != n || ch.fe.size() != n) {
        throw Error("build_constraint_matrix: inconsistent channel dimensions");
    }
    CMatrix z(n * n, 2);
    // vec(a b^T) = b (x) a
    for (int col = 0; col < n; ++col) {
        for (int row = 0; row < n; ++row) {
            z(col * n + row, 0) = ch.f1[row] * ch.fe[col];
            z(col * n + row, 1) = ch.f2[row] * ch.fe[col];
        }
    }
    return z;
}

NullSpaceBasis null_basis(const CMatrix& z, double tol_rel)
{
    const auto rows = z.rows();
    const auto n = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(rows))));
    if (z.cols() != 2 || n * n != rows || n < 2) {
        throw Error("null_basis: expected an N^2 x 2 matrix");
    }
    if (!(tol_rel > 0.0)) {
        throw Error("null_basis: tolerance must be positive");
    }

    Eigen::JacobiSVD<CMatrix> svd(z, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
    if (!(sigma_max > 0.0)) {
        throw DegenerateConstraint("null_basis: Z = 0 (fe vanishes), null space is the whole space");
    }

    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > tol_rel * sigma_max) {
            ++rank;
        }
    }

    NullSpaceBasis basis;
    basis.z_rank = rank;
    basis.m = static_cast<int>(rows) - rank;
    basis.svd_tolerance = tol_rel;
    basis.sigma_max = sigma_max;
    basis.g_matrix = svd.matrixU().rightCols(basis.m);
    return basis;
}

CMatrix beamformer_from_coeffs(const NullSpaceBasis& basis, const CVector& c)
{
    if (c.size() != basis.m) {
        throw Error("beamformer_from_coeffs: coefficient vector has wrong length");
    }
    const int n = basis.n_antennas();
    const CVector w = basis.g_matrix * c;
    const CMatrix w_adj = Eigen::Map<const CMatrix>(w.data(), n, n);
    return w_adj.adjoint();
}

CVector vec_of_adjoint(const CMatrix& w_mat)
{
    const CMatrix w_adj = w_mat.adjoint();
    return Eigen::Map<const CVector>(w_adj.data(), w_adj.size());
}

std::pair<double, double> nulling_residuals(const CMatrix& w_mat, const ChannelRealization& ch)
{
    const Eigen::RowVectorXcd fe_w = ch.fe.transpose() * w_mat;
    return {std::abs((fe_w * ch.f1).value()), std::abs((fe_w * ch.f2).value())};
}

}  // namespace nsbf
