#include "nsbf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace nsbf {

namespace {

constexpr double kStepFraction = 0.98;

struct Var {
    std::vector<RMatrix> blk;
    RVector lp;
};

double inner(const Var& a, const Var& b)
{
    double sum = a.lp.dot(b.lp);
    for (std::size_t k = 0; k < a.blk.size(); ++k) {
        sum += a.blk[k].cwiseProduct(b.blk[k]).sum();
    }
    return sum;
}

double norm(const Var& a)
{
    return std::sqrt(inner(a, a));
}

// y += alpha * x
void axpy(Var& y, double alpha, const Var& x)
{
    for (std::size_t k = 0; k < y.blk.size(); ++k) {
        y.blk[k] += alpha * x.blk[k];
    }
    y.lp += alpha * x.lp;
}

Var zeros(const std::vector<int>& dims, int n_lp)
{
    Var v;
    for (int d : dims) {
        v.blk.push_back(RMatrix::Zero(d, d));
    }
    v.lp = RVector::Zero(n_lp);
    return v;
}

Var identity(const std::vector<int>& dims, int n_lp)
{
    Var v;
    for (int d : dims) {
        v.blk.push_back(RMatrix::Identity(d, d));
    }
    v.lp = RVector::Ones(n_lp);
    return v;
}

RMatrix sym(const RMatrix& m)
{
    return 0.5 * (m + m.transpose());
}

// Equality standard form: min <c, x>  s.t.  A x = b,  x in K.
struct StandardForm {
    std::vector<int> dims;
    int n_lp = 0;
    int rows = 0;
    std::vector<std::vector<RMatrix>> a_blk;  // [row][block], 0x0 means zero
    RMatrix a_lp;
    RVector b;
    Var c;
    double obj_scale = 1.0;
    double obj_sign = 1.0;  // internal c = obj_sign * user objective / obj_scale
    bool trivially_infeasible = false;

    RVector apply(const Var& x) const
    {
        RVector out = a_lp * x.lp;
        for (int i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < dims.size(); ++k) {
                if (a_blk[i][k].size() > 0) {
                    out[i] += a_blk[i][k].cwiseProduct(x.blk[k]).sum();
                }
            }
        }
        return out;
    }

    Var adjoint(const RVector& y) const
    {
        Var v = zeros(dims, n_lp);
        v.lp = a_lp.transpose() * y;
        for (int i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < dims.size(); ++k) {
                if (a_blk[i][k].size() > 0) {
                    v.blk[k] += y[i] * a_blk[i][k];
                }
            }
        }
        return v;
    }
};

int count_slacks(const SdpProblem& p)
{
    return static_cast<int>(std::count_if(p.constraints.begin(), p.constraints.end(),
        [](const SdpConstraint& c) { return c.relation != Relation::equal; }));
}

StandardForm to_standard_form(const SdpProblem& p)
{
    StandardForm sf;
    sf.dims = p.block_dims;
    sf.n_lp = p.n_scalars + count_slacks(p);
    const std::size_t nb = p.block_dims.size();

    int slack = p.n_scalars;
    std::vector<std::vector<RMatrix>> rows_blk;
    std::vector<RVector> rows_lp;
    std::vector<double> rhs;
    for (const SdpConstraint& con : p.constraints) {
        std::vector<RMatrix> blk(nb);
        double sq = 0.0;
        for (std::size_t k = 0; k < con.lhs.block_coeffs.size(); ++k) {
            if (con.lhs.block_coeffs[k].size() > 0) {
                blk[k] = sym(con.lhs.block_coeffs[k]);
                sq += blk[k].squaredNorm();
            }
        }
        RVector lp = RVector::Zero(sf.n_lp);
        if (con.lhs.scalar_coeffs.size() > 0) {
            lp.head(p.n_scalars) = con.lhs.scalar_coeffs;
        }
        if (con.relation == Relation::less_equal) {
            lp[slack++] = 1.0;
        } else if (con.relation == Relation::greater_equal) {
            lp[slack++] = -1.0;
        }
        sq += lp.squaredNorm();

        const double scale = std::sqrt(sq);
        if (scale == 0.0) {
            if (con.rhs != 0.0) {
                sf.trivially_infeasible = true;
            }
            continue;
        }
        for (auto& m : blk) {
            if (m.size() > 0) {
                m /= scale;
            }
        }
        rows_blk.push_back(std::move(blk));
        rows_lp.push_back(lp / scale);
        rhs.push_back(con.rhs / scale);
    }

    sf.rows = static_cast<int>(rhs.size());
    sf.a_blk = std::move(rows_blk);
    sf.a_lp = RMatrix::Zero(sf.rows, sf.n_lp);
    sf.b = RVector::Zero(sf.rows);
    for (int i = 0; i < sf.rows; ++i) {
        sf.a_lp.row(i) = rows_lp[i].transpose();
        sf.b[i] = rhs[i];
    }

    sf.obj_sign = p.sense == Sense::maximize ? -1.0 : 1.0;
    sf.c = zeros(sf.dims, sf.n_lp);
    for (std::size_t k = 0; k < p.objective.block_coeffs.size(); ++k) {
        if (p.objective.block_coeffs[k].size() > 0) {
            sf.c.blk[k] = sf.obj_sign * sym(p.objective.block_coeffs[k]);
        }
    }
    if (p.objective.scalar_coeffs.size() > 0) {
        sf.c.lp.head(p.n_scalars) = sf.obj_sign * p.objective.scalar_coeffs;
    }
    const double cn = norm(sf.c);
    if (cn > 0.0) {
        sf.obj_scale = cn;
        for (auto& m : sf.c.blk) {
            m /= cn;
        }
        sf.c.lp /= cn;
    }
    return sf;
}

// Largest alpha with M + alpha * D still PSD, given M = L L^T.
double max_step_block(const Eigen::LLT<RMatrix>& chol, const RMatrix& d)
{
    const auto l = chol.matrixL();
    const RMatrix w1 = l.solve(d);
    const RMatrix w = l.solve(w1.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(w), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const RVector& v, const RVector& d)
{
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (d[i] < 0.0) {
            alpha = std::min(alpha, -v[i] / d[i]);
        }
    }
    return alpha;
}

double max_step_scalar(double v, double d)
{
    return d < 0.0 ? -v / d : std::numeric_limits<double>::infinity();
}

// LDLT of the Schur complement, retried with a growing diagonal shift when
// it becomes numerically singular near a degenerate optimum.
class SchurSolver {
public:
    bool factor(const RMatrix& m)
    {
        ldlt_.compute(m);
        if (ldlt_.info() == Eigen::Success && ldlt_.isPositive()) {
            return true;
        }
        const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        for (double shift = 1e-14; shift <= 1e-8; shift *= 100.0) {
            RMatrix reg = m;
            reg.diagonal().array() += shift * scale;
            ldlt_.compute(reg);
            if (ldlt_.info() == Eigen::Success && ldlt_.isPositive()) {
                return true;
            }
        }
        return false;
    }

    RVector solve(const RVector& rhs) const { return ldlt_.solve(rhs); }

private:
    Eigen::LDLT<RMatrix> ldlt_;
};

struct Direction {
    Var dx;
    RVector dy;
    Var ds;
    double dtau = 0.0;
    double dkappa = 0.0;
};

}  // namespace

const char* to_string(SdpStatus s)
{
    switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    case SdpStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

void SdpProblem::validate() const
{
    if (n_scalars < 0) {
        throw Error("SdpProblem: negative scalar count");
    }
    for (int d : block_dims) {
        if (d < 1) {
            throw Error("SdpProblem: block dimensions must be positive");
        }
    }
    auto check = [this](const LinearFunctional& f, const char* what) {
        if (!f.block_coeffs.empty() && f.block_coeffs.size() != block_dims.size()) {
            throw Error(std::string("SdpProblem: ") + what + " has the wrong number of blocks");
        }
        for (std::size_t k = 0; k < f.block_coeffs.size(); ++k) {
            const RMatrix& m = f.block_coeffs[k];
            if (m.size() == 0) {
                continue;
            }
            if (m.rows() != block_dims[k] || m.cols() != block_dims[k]) {
                throw Error(std::string("SdpProblem: ") + what + " block has the wrong size");
            }
            const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
            if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
                throw Error(std::string("SdpProblem: ") + what + " block is not symmetric");
            }
        }
        if (f.scalar_coeffs.size() != 0 && f.scalar_coeffs.size() != n_scalars) {
            throw Error(std::string("SdpProblem: ") + what + " has the wrong scalar count");
        }
        if (!f.scalar_coeffs.allFinite()) {
            throw Error(std::string("SdpProblem: ") + what + " has non-finite data");
        }
    };
    check(objective, "objective");
    for (const SdpConstraint& c : constraints) {
        check(c.lhs, "constraint");
        if (!std::isfinite(c.rhs)) {
            throw Error("SdpProblem: non-finite right-hand side");
        }
    }
}

double SdpProblem::evaluate(const LinearFunctional& f, const std::vector<RMatrix>& blocks,
                            const RVector& scalars) const
{
    double sum = 0.0;
    for (std::size_t k = 0; k < f.block_coeffs.size(); ++k) {
        if (f.block_coeffs[k].size() > 0) {
            sum += f.block_coeffs[k].cwiseProduct(blocks[k]).sum();
        }
    }
    if (f.scalar_coeffs.size() > 0) {
        sum += f.scalar_coeffs.dot(scalars.head(n_scalars));
    }
    return sum;
}

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts)
{
    p.validate();
    const StandardForm sf = to_standard_form(p);
    const std::size_t nb = sf.dims.size();

    SdpSolution sol;
    if (sf.trivially_infeasible) {
        sol.status = SdpStatus::infeasible;
        return sol;
    }

    int nu = sf.n_lp;
    for (int d : sf.dims) {
        nu += d;
    }

    Var x = identity(sf.dims, sf.n_lp);
    Var s = identity(sf.dims, sf.n_lp);
    RVector y = RVector::Zero(sf.rows);
    double tau = 1.0;
    double kappa = 1.0;

    const double b_norm = sf.b.norm();
    const double c_norm = norm(sf.c);

    auto finish = [&](SdpStatus status, int iters) {
        sol.status = status;
        sol.iterations = iters;
        if (status == SdpStatus::optimal) {
            sol.block_values.clear();
            for (std::size_t k = 0; k < nb; ++k) {
                sol.block_values.push_back(sym(x.blk[k] / tau));
            }
            const RVector xl = x.lp / tau;
            sol.scalar_values = xl.head(p.n_scalars);
            Var xs = x;
            for (auto& m : xs.blk) {
                m /= tau;
            }
            xs.lp /= tau;
            const RVector r = sf.apply(xs) - sf.b;
            double worst = 0.0;
            for (int i = 0; i < sf.rows; ++i) {
                worst = std::max(worst, std::abs(r[i]) / (1.0 + std::abs(sf.b[i])));
            }
            sol.max_primal_residual = worst;
            sol.objective_value = p.evaluate(p.objective, sol.block_values, xl);
            sol.dual_objective = sf.obj_sign * sf.obj_scale * sf.b.dot(y) / tau;
            sol.duality_gap = std::abs(sol.objective_value - sol.dual_objective) /
                              (1.0 + std::abs(sol.objective_value) + std::abs(sol.dual_objective));
        }
        return sol;
    };

    for (int iter = 0; iter <= opts.max_iters; ++iter) {
        const RVector rp = sf.apply(x) - tau * sf.b;
        Var rd = sf.adjoint(y);
        axpy(rd, 1.0, s);
        axpy(rd, -tau, sf.c);
        const double cx = inner(sf.c, x);
        const double by = sf.b.dot(y);
        const double rg = cx - by + kappa;
        const double mu = (inner(x, s) + tau * kappa) / (nu + 1);

        // termination tests
        const double pres = rp.norm() / tau / (1.0 + b_norm);
        const double dres = norm(rd) / tau / (1.0 + c_norm);
        const double pobj = cx / tau;
        const double dobj = by / tau;
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (pres <= opts.feas_tol && dres <= opts.feas_tol && gap <= opts.gap_tol) {
            return finish(SdpStatus::optimal, iter);
        }
        if (by > 0.0) {
            Var cert = sf.adjoint(y);
            axpy(cert, 1.0, s);
            if (norm(cert) <= opts.feas_tol * by) {
                return finish(SdpStatus::infeasible, iter);
            }
        }
        if (cx < 0.0 && sf.apply(x).norm() <= opts.feas_tol * -cx) {
            return finish(SdpStatus::unbounded, iter);
        }
        if (iter == opts.max_iters || !std::isfinite(mu)) {
            break;
        }

        // factorizations
        std::vector<Eigen::LLT<RMatrix>> chol_x(nb), chol_s(nb);
        std::vector<RMatrix> s_inv(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb; ++k) {
            chol_x[k].compute(x.blk[k]);
            chol_s[k].compute(s.blk[k]);
            if (chol_x[k].info() != Eigen::Success || chol_s[k].info() != Eigen::Success) {
                ok = false;
                break;
            }
            s_inv[k] = chol_s[k].solve(RMatrix::Identity(sf.dims[k], sf.dims[k]));
        }
        if (!ok) {
            break;
        }
        const RVector x_over_s = x.lp.cwiseQuotient(s.lp);

        auto scale_op = [&](const Var& d) {
            Var out;
            out.blk.resize(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                out.blk[k] = sym(x.blk[k] * d.blk[k] * s_inv[k]);
            }
            out.lp = x_over_s.cwiseProduct(d.lp);
            return out;
        };

        // E(A_j) and the Schur complement M_ij = <A_i, E(A_j)>
        std::vector<Var> ea(sf.rows);
        for (int j = 0; j < sf.rows; ++j) {
            Var& e = ea[j];
            e.blk.resize(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                if (sf.a_blk[j][k].size() > 0) {
                    e.blk[k] = sym(x.blk[k] * sf.a_blk[j][k] * s_inv[k]);
                } else {
                    e.blk[k] = RMatrix::Zero(sf.dims[k], sf.dims[k]);
                }
            }
            e.lp = x_over_s.cwiseProduct(sf.a_lp.row(j).transpose());
        }
        RMatrix schur(sf.rows, sf.rows);
        for (int j = 0; j < sf.rows; ++j) {
            schur.col(j) = sf.apply(ea[j]);
        }
        schur = sym(schur);
        SchurSolver schur_f;
        if (!schur_f.factor(schur)) {
            break;
        }

        const Var ec = scale_op(sf.c);
        const RVector aec = sf.apply(ec);
        const double cec = inner(sf.c, ec);
        const Var erd = scale_op(rd);
        const RVector aerd = sf.apply(erd);
        const double cerd = inner(sf.c, erd);
        const RVector h = aec - sf.b;
        const RVector dy2 = schur_f.solve(aec + sf.b);
        const double denom = h.dot(dy2) - cec - kappa / tau;
        if (!(std::abs(denom) > 0.0) || !dy2.allFinite()) {
            break;
        }

        auto direction = [&](double eta, const Var& rc, double rtk) {
            Direction d;
            const RVector rhs1 = -eta * rp - sf.apply(rc) - eta * aerd;
            const RVector dy1 = schur_f.solve(rhs1);
            const double rhs3 = -eta * rg - inner(sf.c, rc) - eta * cerd - rtk / tau;
            d.dtau = (rhs3 - h.dot(dy1)) / denom;
            d.dy = dy1 + d.dtau * dy2;
            d.ds = sf.adjoint(d.dy);
            for (std::size_t k = 0; k < nb; ++k) {
                d.ds.blk[k] = -eta * rd.blk[k] - d.ds.blk[k] + d.dtau * sf.c.blk[k];
            }
            d.ds.lp = -eta * rd.lp - d.ds.lp + d.dtau * sf.c.lp;
            // dx = rc - E(ds), with E(ds) assembled from the cached images
            d.dx = rc;
            axpy(d.dx, eta, erd);
            for (int j = 0; j < sf.rows; ++j) {
                axpy(d.dx, d.dy[j], ea[j]);
            }
            axpy(d.dx, -d.dtau, ec);
            d.dkappa = (rtk - kappa * d.dtau) / tau;
            return d;
        };

        auto max_step = [&](const Direction& d) {
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < nb; ++k) {
                alpha = std::min(alpha, max_step_block(chol_x[k], d.dx.blk[k]));
                alpha = std::min(alpha, max_step_block(chol_s[k], d.ds.blk[k]));
            }
            alpha = std::min(alpha, max_step_lp(x.lp, d.dx.lp));
            alpha = std::min(alpha, max_step_lp(s.lp, d.ds.lp));
            alpha = std::min(alpha, max_step_scalar(tau, d.dtau));
            alpha = std::min(alpha, max_step_scalar(kappa, d.dkappa));
            return alpha;
        };

        // predictor
        Var rc = x;
        for (auto& m : rc.blk) {
            m = -m;
        }
        rc.lp = -rc.lp;
        const Direction aff = direction(1.0, rc, -tau * kappa);
        const double alpha_aff = std::min(1.0, max_step(aff));
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        // corrector
        for (std::size_t k = 0; k < nb; ++k) {
            rc.blk[k] = sigma * mu * s_inv[k] - x.blk[k] -
                        sym(aff.dx.blk[k] * aff.ds.blk[k] * s_inv[k]);
        }
        rc.lp = (sigma * mu - aff.dx.lp.cwiseProduct(aff.ds.lp).array()).matrix()
                    .cwiseQuotient(s.lp) - x.lp;
        const double rtk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        const Direction dir = direction(1.0 - sigma, rc, rtk);
        const double alpha = std::min(1.0, kStepFraction * max_step(dir));
        if (!(alpha > 1e-12)) {
            break;
        }

        axpy(x, alpha, dir.dx);
        axpy(s, alpha, dir.ds);
        for (auto& m : x.blk) {
            m = sym(m);
        }
        for (auto& m : s.blk) {
            m = sym(m);
        }
        y += alpha * dir.dy;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        sol.iterations = iter + 1;
    }
    return finish(SdpStatus::numerical_failure, sol.iterations);
}

RMatrix complex_embed(const CMatrix& h)
{
    if (h.rows() != h.cols()) {
        throw Error("complex_embed: matrix is not square");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error("complex_embed: matrix is not Hermitian");
    }
    const auto m = h.rows();
    RMatrix out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = h.real();
    out.topRightCorner(m, m) = -h.imag();
    out.bottomLeftCorner(m, m) = h.imag();
    out.bottomRightCorner(m, m) = h.real();
    return sym(out);
}

CMatrix complex_extract(const RMatrix& x)
{
    if (x.rows() != x.cols() || x.rows() % 2 != 0) {
        throw Error("complex_extract: expected a square matrix of even size");
    }
    const auto m = x.rows() / 2;
    const RMatrix re = 0.5 * (x.topLeftCorner(m, m) + x.bottomRightCorner(m, m));
    const RMatrix im = 0.5 * (x.bottomLeftCorner(m, m) - x.topRightCorner(m, m));
    CMatrix out(m, m);
    out.real() = re;
    out.imag() = im;
    return (out + out.adjoint()) * 0.5;
}

void write_sdpa(std::ostream& os, const SdpProblem& p)
{
    // SDPA dual form: max <F0, Y> s.t. <Fi, Y> = ci, Y psd.  Our standard
    // form (min <C, X>, A X = b) maps to F0 = -C, Fi = Ai, ci = bi.
    p.validate();
    const StandardForm sf = to_standard_form(p);
    const auto old_precision = os.precision(17);
    os << "* nsbf problem dump: " << p.constraints.size() << " constraints, "
       << (p.sense == Sense::maximize ? "maximize" : "minimize")
       << ", objective scaled by " << sf.obj_scale << "\n";
    os << sf.rows << "\n";
    const std::size_t nblocks = sf.dims.size() + (sf.n_lp > 0 ? 1 : 0);
    os << nblocks << "\n";
    for (int d : sf.dims) {
        os << d << " ";
    }
    if (sf.n_lp > 0) {
        os << -sf.n_lp;
    }
    os << "\n";
    for (int i = 0; i < sf.rows; ++i) {
        os << sf.b[i] << (i + 1 < sf.rows ? " " : "\n");
    }
    auto emit = [&os](int mat, int blk, const RMatrix& m, double factor) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = r; c < m.cols(); ++c) {
                if (m(r, c) != 0.0) {
                    os << mat << " " << blk << " " << r + 1 << " " << c + 1 << " "
                       << factor * m(r, c) << "\n";
                }
            }
        }
    };
    auto emit_lp = [&os](int mat, int blk, const RVector& v, double factor) {
        for (Eigen::Index r = 0; r < v.size(); ++r) {
            if (v[r] != 0.0) {
                os << mat << " " << blk << " " << r + 1 << " " << r + 1 << " " << factor * v[r]
                   << "\n";
            }
        }
    };
    const int lp_block = static_cast<int>(sf.dims.size()) + 1;
    for (std::size_t k = 0; k < sf.dims.size(); ++k) {
        emit(0, static_cast<int>(k) + 1, sf.c.blk[k], -1.0);
    }
    if (sf.n_lp > 0) {
        emit_lp(0, lp_block, sf.c.lp, -1.0);
    }
    for (int i = 0; i < sf.rows; ++i) {
        for (std::size_t k = 0; k < sf.dims.size(); ++k) {
            if (sf.a_blk[i][k].size() > 0) {
                emit(i + 1, static_cast<int>(k) + 1, sf.a_blk[i][k], 1.0);
            }
        }
        if (sf.n_lp > 0) {
            emit_lp(i + 1, lp_block, sf.a_lp.row(i).transpose(), 1.0);
        }
    }
    os.precision(old_precision);
}

}  // namespace nsbf
