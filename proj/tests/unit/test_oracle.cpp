#include <doctest.h>

#include "nsbf/oracle.hpp"
#include "reference.hpp"

using namespace nsbf;

TEST_CASE("fix_phase makes the first nonzero entry real and positive")
{
    ref::Draws d(1);
    CVector c = d.cvec(5);
    c[0] = 0.0;
    const CVector f = fix_phase(c);
    CHECK(f[0] == cplx(0.0, 0.0));
    CHECK(std::abs(f[1].imag()) < 1e-15);
    CHECK(f[1].real() > 0.0);
    CHECK((f * f.adjoint() - c * c.adjoint()).norm() < 1e-12 * c.squaredNorm());
    CHECK(fix_phase(CVector::Zero(3)).norm() == 0.0);
}

TEST_CASE("brute force stays feasible and reports its own value")
{
    for (int idx = 0; idx < 3; ++idx) {
        const SystemConfig cfg = ref::config(2, 20.0);
        const ChannelRealization ch = sample_channel(cfg, derive_seed(3, 2, idx));
        const OracleResult r = brute_force_maxmin(ch, cfg, 300, 5, 11);
        const ProblemMatrices pm =
            build_problem_matrices(cfg, ch, null_basis(build_constraint_matrix(ch)));
        CHECK(relay_power(r.c_best, pm) <= cfg.p_relay * (1.0 + 1e-12));
        CHECK(minimax_value(r.c_best, pm, cfg).q_value == r.q_best);
        CHECK(r.q_best >= 0.0);
        CHECK(r.evaluations <= 300L * 5);
        CHECK(r.restarts == 5);
    }
}

TEST_CASE("brute force is deterministic for a seed")
{
    const SystemConfig cfg = ref::config(3, 15.0);
    const ChannelRealization ch = sample_channel(cfg, 5);
    const OracleResult a = brute_force_maxmin(ch, cfg, 200, 4, 99);
    const OracleResult b = brute_force_maxmin(ch, cfg, 200, 4, 99);
    CHECK(a.q_best == b.q_best);
    CHECK(a.c_best == b.c_best);
}

TEST_CASE("a larger budget never does worse")
{
    const SystemConfig cfg = ref::config(2, 20.0);
    for (int idx = 0; idx < 3; ++idx) {
        const ChannelRealization ch = sample_channel(cfg, derive_seed(4, 2, idx));
        const double small = brute_force_maxmin(ch, cfg, 100, 4, 7).q_best;
        const double large = brute_force_maxmin(ch, cfg, 1000, 4, 7).q_best;
        CHECK(large >= small);
    }
}

TEST_CASE("generic maximizer finds the top of a concave quadratic")
{
    // maximize -|c - c0|^2 with c0 strictly inside the power ellipsoid
    const SystemConfig cfg = ref::config(2, 20.0);
    const ChannelRealization ch = sample_channel(cfg, 6);
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, null_basis(build_constraint_matrix(ch)));
    ref::Draws d(6);
    CVector c0 = d.cvec(pm.m());
    c0 *= std::sqrt(0.25 * cfg.p_relay / relay_power(c0, pm));
    c0 = fix_phase(c0);
    const OracleResult r = brute_force_maximize(
        pm, cfg, [&](const CVector& c) { return -(c - c0).squaredNorm(); }, 4000, 3, 1);
    CHECK(r.q_best > -1e-6 * c0.squaredNorm());
}

TEST_CASE("case-restricted search only returns points of that case")
{
    const SystemConfig cfg = ref::config(2, 20.0);
    const ChannelRealization ch = sample_channel(cfg, derive_seed(8, 2, 0));
    const ProblemMatrices pm = build_problem_matrices(cfg, ch, null_basis(build_constraint_matrix(ch)));
    for (RegionCase rc : {RegionCase::A, RegionCase::B, RegionCase::C}) {
        const OracleResult r = brute_force_maxmin_in_case(pm, cfg, rc, 200, 6, 3);
        if (std::isfinite(r.q_best)) {
            CHECK(minimax_value(r.c_best, pm, cfg).case_tag == rc);
        }
    }
}

TEST_CASE("oracle rejects an empty budget")
{
    const SystemConfig cfg = ref::config(2);
    const ChannelRealization ch = sample_channel(cfg, 1);
    CHECK_THROWS_AS(brute_force_maxmin(ch, cfg, 0, 1, 1), Error);
    CHECK_THROWS_AS(brute_force_maxmin(ch, cfg, 1, 0, 1), Error);
}
