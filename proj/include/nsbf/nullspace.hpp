#pragma once

#include <utility>

#include "nsbf/channel.hpp"

namespace nsbf {

inline constexpr double kDefaultNullTolerance = 1e-10;

/// Orthonormal basis of the beamformers w = vec(W^H) that are invisible
/// to the eavesdropper in the second hop.
struct NullSpaceBasis {
    CMatrix g_matrix;  // N^2 x m, orthonormal columns
    int m = 0;
    int z_rank = 0;
    double svd_tolerance = kDefaultNullTolerance;
    double sigma_max = 0.0;  // largest singular value of Z

    int n_antennas() const;
};

/// Thrown by null_basis when Z vanishes (fe = 0): every beamformer nulls
/// the eavesdropper and the subspace is no longer a proper null space.
class DegenerateConstraint : public Error {
public:
    using Error::Error;
};

/// Z = [vec(f1 fe^T), vec(f2 fe^T)], column-stacking vec.
CMatrix build_constraint_matrix(const ChannelRealization& ch);

/// Left singular vectors of Z whose singular values fall below
/// tol_rel * sigma_max span the orthogonal complement of range(Z).
NullSpaceBasis null_basis(const CMatrix& z, double tol_rel = kDefaultNullTolerance);

/// W such that vec(W^H) = G c.
CMatrix beamformer_from_coeffs(const NullSpaceBasis& basis, const CVector& c);

/// vec(W^H), the inverse of the reshape done by beamformer_from_coeffs.
CVector vec_of_adjoint(const CMatrix& w_mat);

/// (|fe^T W f1|, |fe^T W f2|)
std::pair<double, double> nulling_residuals(const CMatrix& w_mat, const ChannelRealization& ch);

}  // namespace nsbf
