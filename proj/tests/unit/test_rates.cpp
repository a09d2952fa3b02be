#include <doctest.h>

#include "nsbf/rates.hpp"
#include "reference.hpp"

using namespace nsbf;

namespace {

struct Case {
    SystemConfig cfg;
    ChannelRealization ch;
    NullSpaceBasis basis;
    ProblemMatrices pm;
};

Case make_case(ref::Draws& d, int n, double pt_dbw)
{
    Case k;
    k.cfg = ref::config(n, pt_dbw);
    k.ch = sample_channel(k.cfg, d.seed());
    k.basis = null_basis(build_constraint_matrix(k.ch));
    k.pm = build_problem_matrices(k.cfg, k.ch, k.basis);
    return k;
}

// c scaled onto a random fraction of the relay power budget
CVector feasible_c(ref::Draws& d, const Case& k)
{
    const CVector c = d.cvec(k.basis.m);
    return c * std::sqrt(d.uniform(0.01, 1.0) * k.cfg.p_relay / relay_power(c, k.pm));
}

}  // namespace

TEST_CASE("eavesdropper information: closed form, determinant ratio and reference agree")
{
    ref::Draws d(1);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = d.integer(2, 5);
        const SystemConfig cfg = ref::config(n, d.uniform(0.0, 30.0));
        const ChannelRealization ch = sample_channel(cfg, d.seed());
        const CMatrix w = d.uniform(0.05, 1.0) * d.cmat(n, n);  // not restricted to the null space
        const ref::EveModel eve(w, ch, cfg);

        CHECK(std::abs(mi_x2_eve_closed(w, ch, cfg) - mi_x2_eve_det(w, ch, cfg)) < 1e-8);
        CHECK(std::abs(mi_x1_eve_closed(w, ch, cfg) - mi_x1_eve_det(w, ch, cfg)) < 1e-8);
        CHECK(std::abs(mi_x2_eve_det(w, ch, cfg) - eve.info_x2()) < 1e-8);
        CHECK(std::abs(mi_x1_eve_det(w, ch, cfg) - eve.info_x1()) < 1e-8);
        CHECK(std::abs(mi_joint_eve(w, ch, cfg) - eve.info_joint()) < 1e-8);
    }
}

TEST_CASE("legitimate links match the reference")
{
    ref::Draws d(2);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = d.integer(2, 5);
        const SystemConfig cfg = ref::config(n, 15.0);
        const ChannelRealization ch = sample_channel(cfg, d.seed());
        const CMatrix w = d.cmat(n, n);
        CHECK(std::abs(mi_x2_y1(w, ch, cfg) - ref::info_x2_node1(w, ch, cfg)) < 1e-12);
        CHECK(std::abs(mi_x1_y2(w, ch, cfg) - ref::info_x1_node2(w, ch, cfg)) < 1e-12);
    }
}

TEST_CASE("covariances are Hermitian and the conditional ones are smaller")
{
    ref::Draws d(3);
    const SystemConfig cfg = ref::config(3);
    const ChannelRealization ch = sample_channel(cfg, d.seed());
    const EveCovariances cov = eve_covariances(d.cmat(3, 3), ch, cfg);
    CHECK((cov.k_ye - cov.k_ye.adjoint()).norm() < 1e-12);
    const CMatrix diff = cov.k_ye - cov.k_ye_given_x2;
    CHECK(Eigen::SelfAdjointEigenSolver<CMatrix>(diff).eigenvalues()[0] > -1e-10);
    const CMatrix direct = cov.u_matrix * cov.m_diag.cast<cplx>() * cov.u_matrix.adjoint() +
                           cov.l_diag.cast<cplx>();
    CHECK((direct - cov.k_ye).norm() < 1e-10 * cov.k_ye.norm());
}

TEST_CASE("ratio form of the bounds equals the information differences")
{
    ref::Draws d(4);
    for (int rep = 0; rep < 60; ++rep) {
        const Case k = make_case(d, d.integer(2, 5), d.uniform(0.0, 30.0));
        const CVector c = feasible_c(d, k);
        const CMatrix w = ref::relay_matrix(k.basis.g_matrix, c);
        const ref::Rates r = ref::secrecy_rates(w, k.ch, k.cfg);
        const AsrBounds b = asr_bounds(c, k.pm, k.cfg);
        CHECK(std::abs(b.r1_up - r.r1_up) < 1e-8);
        CHECK(std::abs(b.r2_up - r.r2_up) < 1e-8);
        CHECK(std::abs(b.r_sum_up - r.r_sum_up) < 1e-8);
        CHECK(end_to_end_rate_check(c, k.basis, k.ch, k.cfg).max() < 1e-8);
    }
}

TEST_CASE("corner values complete the sum bound")
{
    ref::Draws d(5);
    for (int rep = 0; rep < 60; ++rep) {
        const Case k = make_case(d, d.integer(2, 4), d.uniform(0.0, 30.0));
        const AsrBounds b = asr_bounds(feasible_c(d, k), k.pm, k.cfg);
        CHECK(std::abs(b.r1_up_raw + b.r2_corner - b.r_sum_up_raw) < 1e-8);
        CHECK(std::abs(b.r2_up_raw + b.r1_corner - b.r_sum_up_raw) < 1e-8);
        CHECK(b.r3 == doctest::Approx(b.r_sum_up / 2.0));
        CHECK(b.r1_up >= 0.0);
        CHECK(b.r_sum_up >= 0.0);
    }
}

TEST_CASE("minimax value selects min of the three bounds and one consistent case")
{
    ref::Draws d(6);
    int seen[3] = {0, 0, 0};
    for (int rep = 0; rep < 400; ++rep) {
        const Case k = make_case(d, d.integer(2, 4), d.uniform(0.0, 30.0));
        const CVector c = feasible_c(d, k);
        const MinimaxValue mv = minimax_value(c, k.pm, k.cfg);
        const AsrBounds& b = mv.bounds;
        CHECK(std::abs(mv.q_value - std::min({b.r1_up, b.r2_up, b.r3})) <= 1e-12);
        const bool a_holds = b.r1_up <= b.r2_corner;
        const bool b_holds = !a_holds && b.r2_up <= b.r1_corner;
        const bool c_holds = !a_holds && !b_holds;
        switch (mv.case_tag) {
        case RegionCase::A: CHECK(a_holds); break;
        case RegionCase::B: CHECK(b_holds); break;
        case RegionCase::C: CHECK(c_holds); break;
        }
        ++seen[static_cast<int>(mv.case_tag)];
    }
    CHECK(seen[0] + seen[1] + seen[2] == 400);
    CHECK(seen[2] > 0);
}

TEST_CASE("zero beamformer leaves only the direct-link terms")
{
    ref::Draws d(7);
    const Case k = make_case(d, 3, 20.0);
    const MinimaxValue mv = minimax_value(CVector::Zero(k.basis.m), k.pm, k.cfg);
    CHECK(mv.q_value == 0.0);
    CHECK(mv.bounds.r1_up_raw == doctest::Approx(0.5 * std::log2(k.pm.tau1)));
}

TEST_CASE("bounds are invariant to a common phase")
{
    ref::Draws d(8);
    const Case k = make_case(d, 3, 20.0);
    const CVector c = feasible_c(d, k);
    const MinimaxValue a = minimax_value(c, k.pm, k.cfg);
    const MinimaxValue b = minimax_value(c * std::polar(1.0, -2.1), k.pm, k.cfg);
    CHECK(a.q_value == doctest::Approx(b.q_value).epsilon(1e-12));
    CHECK(a.case_tag == b.case_tag);
}

TEST_CASE("a noisier first eavesdropper hop never lowers the per-user bounds")
{
    ref::Draws d(9);
    for (int rep = 0; rep < 100; ++rep) {
        Case k = make_case(d, d.integer(2, 4), d.uniform(0.0, 30.0));
        const CVector c = feasible_c(d, k);
        const AsrBounds before = asr_bounds(c, k.pm, k.cfg);
        k.cfg.sigma2_eve1 *= d.uniform(1.1, 10.0);
        const ProblemMatrices noisier = build_problem_matrices(k.cfg, k.ch, k.basis);
        const AsrBounds after = asr_bounds(c, noisier, k.cfg);
        CHECK(after.r1_up >= before.r1_up - 1e-12);
        CHECK(after.r2_up >= before.r2_up - 1e-12);
    }
}

TEST_CASE("clamped fields are the positive part of the raw ones")
{
    ref::Draws d(10);
    for (int rep = 0; rep < 100; ++rep) {
        const Case k = make_case(d, d.integer(2, 4), d.uniform(0.0, 30.0));
        const AsrBounds b = asr_bounds(feasible_c(d, k), k.pm, k.cfg);
        CHECK(b.r1_up == std::max(0.0, b.r1_up_raw));
        CHECK(b.r2_up == std::max(0.0, b.r2_up_raw));
        CHECK(b.r_sum_up == std::max(0.0, b.r_sum_up_raw));
        CHECK(b.r3 >= 0.0);
    }
}
