#include <doctest.h>

#include "nsbf/nullspace.hpp"
#include "reference.hpp"

using namespace nsbf;

namespace {

double nulling_relative(const CMatrix& w, const ChannelRealization& ch)
{
    const auto [r1, r2] = nulling_residuals(w, ch);
    const double scale = ch.fe.norm() * w.norm() * std::max(ch.f1.norm(), ch.f2.norm());
    return std::max(r1, r2) / scale;
}

}  // namespace

TEST_CASE("constraint matrix columns are vec(f fe^T)")
{
    ref::Draws d(1);
    SystemConfig cfg;
    cfg.n_antennas = 3;
    const ChannelRealization ch = sample_channel(cfg, d.seed());
    const CMatrix z = build_constraint_matrix(ch);
    REQUIRE(z.rows() == 9);
    REQUIRE(z.cols() == 2);
    const CMatrix a = ch.f1 * ch.fe.transpose();
    const CMatrix b = ch.f2 * ch.fe.transpose();
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(z(j * 3 + i, 0) - a(i, j)) < 1e-15);
            CHECK(std::abs(z(j * 3 + i, 1) - b(i, j)) < 1e-15);
        }
    }
}

TEST_CASE("basis is orthonormal and nulls the eavesdropper for every coefficient vector")
{
    ref::Draws d(2);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = d.integer(2, 5);
        SystemConfig cfg;
        cfg.n_antennas = n;
        const ChannelRealization ch = sample_channel(cfg, d.seed());
        const NullSpaceBasis b = null_basis(build_constraint_matrix(ch));
        CHECK(b.m == n * n - 2);
        CHECK(b.n_antennas() == n);
        const CMatrix gram = b.g_matrix.adjoint() * b.g_matrix;
        CHECK((gram - CMatrix::Identity(b.m, b.m)).cwiseAbs().maxCoeff() < 1e-12);

        const CVector c = d.cvec(b.m);
        const CMatrix w = ref::relay_matrix(b.g_matrix, c);
        CHECK((w - beamformer_from_coeffs(b, c)).norm() < 1e-13 * w.norm());
        CHECK(nulling_relative(w, ch) < 1e-12);
        CHECK(std::abs(ref::bilinear(ch.fe, w, ch.f1)) < 1e-12 * w.norm() * ch.f1.norm() * ch.fe.norm());
    }
}

TEST_CASE("dimension law holds against an independent rank")
{
    ref::Draws d(3);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = d.integer(2, 5);
        SystemConfig cfg;
        cfg.n_antennas = n;
        const ChannelRealization ch = sample_channel(cfg, d.seed());
        const CMatrix z = build_constraint_matrix(ch);
        const NullSpaceBasis b = null_basis(z);
        CHECK(b.m + ref::rank_of(z) == n * n);
        CHECK(b.z_rank == ref::rank_of(z));
    }
}

TEST_CASE("parallel source channels leave a larger null space")
{
    ref::Draws d(4);
    for (int n = 2; n <= 5; ++n) {
        SystemConfig cfg;
        cfg.n_antennas = n;
        ChannelRealization ch = sample_channel(cfg, d.seed());
        ch.f2 = cplx(0.3, -1.7) * ch.f1;
        const CMatrix z = build_constraint_matrix(ch);
        const NullSpaceBasis b = null_basis(z);
        CHECK(b.z_rank == 1);
        CHECK(b.m == n * n - 1);
        CHECK(ref::rank_of(z) == 1);
        const CMatrix w = beamformer_from_coeffs(b, d.cvec(b.m));
        CHECK(nulling_relative(w, ch) < 1e-12);
    }
}

TEST_CASE("vanishing eavesdropper channel is rejected")
{
    SystemConfig cfg;
    ChannelRealization ch = sample_channel(cfg, 9);
    ch.fe.setZero();
    CHECK_THROWS_AS(null_basis(build_constraint_matrix(ch)), DegenerateConstraint);
}

TEST_CASE("bad shapes and tolerance are rejected")
{
    CHECK_THROWS_AS(null_basis(CMatrix::Ones(5, 2)), Error);
    CHECK_THROWS_AS(null_basis(CMatrix::Ones(9, 3)), Error);
    CHECK_THROWS_AS(null_basis(CMatrix::Ones(9, 2), 0.0), Error);
    SystemConfig cfg;
    const ChannelRealization ch = sample_channel(cfg, 1);
    const NullSpaceBasis b = null_basis(build_constraint_matrix(ch));
    CHECK_THROWS_AS(beamformer_from_coeffs(b, CVector::Ones(b.m + 1)), Error);
}

TEST_CASE("vec of the adjoint inverts the beamformer map")
{
    ref::Draws d(5);
    SystemConfig cfg;
    cfg.n_antennas = 4;
    const ChannelRealization ch = sample_channel(cfg, d.seed());
    const NullSpaceBasis b = null_basis(build_constraint_matrix(ch));
    const CVector c = d.cvec(b.m);
    const CVector w = vec_of_adjoint(beamformer_from_coeffs(b, c));
    CHECK((w - b.g_matrix * c).norm() < 1e-13 * w.norm());
    CHECK((b.g_matrix.adjoint() * w - c).norm() < 1e-12 * c.norm());
}

TEST_CASE("any orthonormal basis of the null space gives the same beamformers")
{
    ref::Draws d(6);
    SystemConfig cfg;
    cfg.n_antennas = 3;
    const ChannelRealization ch = sample_channel(cfg, d.seed());
    const NullSpaceBasis b = null_basis(build_constraint_matrix(ch));
    const CMatrix u = Eigen::HouseholderQR<CMatrix>(d.cmat(b.m, b.m)).householderQ();
    NullSpaceBasis rotated = b;
    rotated.g_matrix = b.g_matrix * u;
    for (int rep = 0; rep < 10; ++rep) {
        const CVector c = d.cvec(b.m);
        const CVector c2 = rotated.g_matrix.adjoint() * b.g_matrix * c;
        const CMatrix w = beamformer_from_coeffs(b, c);
        CHECK((beamformer_from_coeffs(rotated, c2) - w).norm() < 1e-12 * w.norm());
    }
}
