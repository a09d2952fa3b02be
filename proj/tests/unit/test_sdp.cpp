#include <doctest.h>

#include <sstream>

#include "nsbf/sdp.hpp"
#include "reference.hpp"

using namespace nsbf;

namespace {

SolverOptions tight()
{
    SolverOptions o;
    o.feas_tol = 1e-10;
    o.gap_tol = 1e-10;
    return o;
}

SdpProblem lambda_max(const RMatrix& c)
{
    const auto n = static_cast<int>(c.rows());
    SdpProblem p;
    p.block_dims = {n};
    p.objective.block_coeffs = {c};
    p.constraints.push_back({{{RMatrix::Identity(n, n)}, {}}, Relation::equal, 1.0});
    return p;
}

}  // namespace

TEST_CASE("largest eigenvalue of diag(1, 2)")
{
    const SdpSolution s = solve(lambda_max(Eigen::Vector2d(1.0, 2.0).asDiagonal()));
    REQUIRE(s.status == SdpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-7));
    const RMatrix& x = s.block_values[0];
    CHECK(std::abs(x(0, 0)) < 1e-6);
    CHECK(x(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.max_primal_residual <= 1e-8);
    CHECK(s.duality_gap <= 1e-8);
}

TEST_CASE("random largest-eigenvalue instances match the eigen-solver")
{
    ref::Draws d(1);
    for (int n = 2; n <= 20; n += 3) {
        const RMatrix c = d.symmetric(n);
        const SdpSolution s = solve(lambda_max(c), tight());
        REQUIRE(s.status == SdpStatus::optimal);
        const double lmax = Eigen::SelfAdjointEigenSolver<RMatrix>(c).eigenvalues().maxCoeff();
        CHECK(std::abs(s.objective_value - lmax) < 1e-7);
        // weak duality in the maximization sense
        CHECK(s.objective_value <= s.dual_objective + 1e-8 * (1.0 + std::abs(lmax)));
        const double xmin =
            Eigen::SelfAdjointEigenSolver<RMatrix>(s.block_values[0]).eigenvalues().minCoeff();
        CHECK(xmin >= -1e-10);
    }
}

TEST_CASE("negative trace is infeasible")
{
    SdpProblem p = lambda_max(RMatrix::Identity(3, 3));
    p.constraints[0].rhs = -1.0;
    CHECK(solve(p).status == SdpStatus::infeasible);
}

TEST_CASE("conflicting scalar bounds are infeasible")
{
    SdpProblem p;
    p.block_dims = {2};
    p.n_scalars = 1;
    p.objective = {{}, RVector::Ones(1)};
    p.constraints.push_back({{{}, RVector::Ones(1)}, Relation::greater_equal, 2.0});
    p.constraints.push_back({{{}, RVector::Ones(1)}, Relation::less_equal, 1.0});
    CHECK(solve(p).status == SdpStatus::infeasible);
}

TEST_CASE("unbounded trace maximization is detected")
{
    SdpProblem p;
    p.block_dims = {3};
    p.objective.block_coeffs = {RMatrix::Identity(3, 3)};
    p.constraints.push_back({{{RMatrix::Identity(3, 3)}, {}}, Relation::greater_equal, 1.0});
    CHECK(solve(p).status == SdpStatus::unbounded);
}

TEST_CASE("mixed block and scalar problem")
{
    // min x0 + <I, X> s.t. x0 >= 3, X(0,0) >= 0.5, X 2x2 PSD
    SdpProblem p;
    p.block_dims = {2};
    p.n_scalars = 1;
    p.sense = Sense::minimize;
    p.objective = {{RMatrix::Identity(2, 2)}, RVector::Ones(1)};
    p.constraints.push_back({{{}, RVector::Ones(1)}, Relation::greater_equal, 3.0});
    RMatrix e00 = RMatrix::Zero(2, 2);
    e00(0, 0) = 1.0;
    p.constraints.push_back({{{e00}, {}}, Relation::greater_equal, 0.5});
    const SdpSolution s = solve(p);
    REQUIRE(s.status == SdpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(3.5).epsilon(1e-7));
    CHECK(s.scalar_values[0] == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("re-solving the same problem is reproducible")
{
    ref::Draws d(2);
    const SdpProblem p = lambda_max(d.symmetric(8));
    const SdpSolution a = solve(p);
    const SdpSolution b = solve(p);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("problem validation")
{
    SdpProblem p = lambda_max(RMatrix::Identity(2, 2));
    p.objective.block_coeffs[0](0, 1) = 1.0;  // asymmetric
    CHECK_THROWS_AS(p.validate(), Error);
    p = lambda_max(RMatrix::Identity(2, 2));
    p.constraints[0].lhs.block_coeffs[0] = RMatrix::Identity(3, 3);
    CHECK_THROWS_AS(solve(p), Error);
    p = lambda_max(RMatrix::Identity(2, 2));
    p.constraints[0].lhs.scalar_coeffs = RVector::Ones(1);
    CHECK_THROWS_AS(solve(p), Error);
}

TEST_CASE("complex embedding")
{
    ref::Draws d(3);
    SUBCASE("identity maps to identity")
    {
        CHECK(complex_embed(CMatrix::Identity(3, 3)) == RMatrix::Identity(6, 6));
    }
    SUBCASE("real symmetric input gives a block-diagonal duplicate")
    {
        const RMatrix s = d.symmetric(3);
        const RMatrix e = complex_embed(s.cast<cplx>());
        CHECK(e.topLeftCorner(3, 3) == s);
        CHECK(e.bottomRightCorner(3, 3) == s);
        CHECK(e.topRightCorner(3, 3).norm() == 0.0);
    }
    SUBCASE("trace identity")
    {
        for (int rep = 0; rep < 50; ++rep) {
            const int m = d.integer(1, 8);
            const CMatrix a = d.hermitian(m);
            const CMatrix x = d.psd(m);
            const double complex_trace = (a * x).trace().real();
            const double real_trace = 0.5 * (complex_embed(a) * complex_embed(x)).trace();
            CHECK(std::abs(complex_trace - real_trace) <=
                  1e-12 * std::max(1.0, std::abs(complex_trace)));
        }
    }
    SUBCASE("extraction inverts the embedding")
    {
        const CMatrix h = d.hermitian(4);
        CHECK((complex_extract(complex_embed(h)) - h).norm() < 1e-14);
    }
    SUBCASE("non-Hermitian input is rejected")
    {
        CHECK_THROWS_AS(complex_embed(d.cmat(3, 3)), Error);
    }
}

TEST_CASE("Hermitian problem through the embedding matches the 2x2 hand solution")
{
    // max Re Tr(A X) over Hermitian X >= 0, Tr X = 1 equals lambda_max(A).
    CMatrix a(2, 2);
    a << 1.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 1.0;  // eigenvalues 0 and 2
    SdpProblem p;
    p.block_dims = {4};
    p.objective.block_coeffs = {0.5 * complex_embed(a)};
    p.constraints.push_back({{{0.5 * complex_embed(CMatrix::Identity(2, 2))}, {}}, Relation::equal, 1.0});
    const SdpSolution s = solve(p, tight());
    REQUIRE(s.status == SdpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-8));
    const CMatrix x = complex_extract(s.block_values[0]);
    CHECK(x.trace().real() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("SDPA dump lists every constraint")
{
    SdpProblem p = lambda_max(Eigen::Vector2d(1.0, 2.0).asDiagonal());
    p.n_scalars = 1;
    p.constraints.push_back({{{}, RVector::Ones(1)}, Relation::less_equal, 4.0});
    std::ostringstream os;
    write_sdpa(os, p);
    const std::string text = os.str();
    std::istringstream in(text);
    std::string comment, rows, blocks, sizes;
    std::getline(in, comment);
    std::getline(in, rows);
    std::getline(in, blocks);
    std::getline(in, sizes);
    CHECK(comment.rfind("*", 0) == 0);
    CHECK(rows == "2");
    CHECK(blocks == "2");
    CHECK(sizes == "2 -2");
}
