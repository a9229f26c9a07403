#include "sosltl/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sosltl::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct SEntry {
    int con;
    int row;
    int col;
    double value;
};

// Core form: min sum <C_k,X_k> + cf^T xf  s.t.  sum A_k(X_k) + Af xf = b,  X_k in cone.
struct Core {
    std::vector<int> n;
    std::vector<bool> diag;
    int m = 0;
    std::vector<std::vector<SEntry>> a; // per block
    std::vector<MatrixXd> C;
    MatrixXd Af;
    VectorXd cf;
    VectorXd b;

    [[nodiscard]] int nblocks() const { return static_cast<int>(n.size()); }
    [[nodiscard]] int nfree() const { return static_cast<int>(cf.size()); }

    int add_block(int size, bool is_diag)
    {
        n.push_back(size);
        diag.push_back(is_diag);
        a.emplace_back();
        C.push_back(is_diag ? MatrixXd::Zero(size, 1) : MatrixXd::Zero(size, size));
        return nblocks() - 1;
    }
};

void apply_block(const Core& P, int k, const MatrixXd& Xk, VectorXd& out)
{
    for (const auto& e : P.a[k]) {
        if (P.diag[k])
            out[e.con] += e.value * Xk(e.row, 0);
        else if (e.row == e.col)
            out[e.con] += e.value * Xk(e.row, e.row);
        else
            out[e.con] += 2.0 * e.value * Xk(e.row, e.col);
    }
}

VectorXd apply(const Core& P, const std::vector<MatrixXd>& X, const VectorXd& xf)
{
    VectorXd out = VectorXd::Zero(P.m);
    for (int k = 0; k < P.nblocks(); ++k)
        apply_block(P, k, X[k], out);
    if (P.nfree() > 0)
        out += P.Af * xf;
    return out;
}

MatrixXd adjoint_block(const Core& P, int k, const VectorXd& y)
{
    MatrixXd S = P.diag[k] ? MatrixXd::Zero(P.n[k], 1) : MatrixXd::Zero(P.n[k], P.n[k]);
    for (const auto& e : P.a[k]) {
        const double v = y[e.con] * e.value;
        if (P.diag[k]) {
            S(e.row, 0) += v;
        } else {
            S(e.row, e.col) += v;
            if (e.row != e.col)
                S(e.col, e.row) += v;
        }
    }
    return S;
}

double inner(const MatrixXd& A, const MatrixXd& B)
{
    return A.cwiseProduct(B).sum();
}

struct Scaling {
    MatrixXd L;    // chol(X)
    MatrixXd R;    // chol(S)
    MatrixXd G;
    MatrixXd Ginv;
    MatrixXd W;
    VectorXd d;    // NT eigenvalues; diagonal blocks: x/s
};

struct CoreResult {
    bool converged = false;
    bool failed = false;
    std::vector<MatrixXd> X, S;
    VectorXd y, xf;
    double pobj = 0, dobj = 0, rel_pinf = 0, rel_dinf = 0, gap = 0;
    int iters = 0;
    std::string message;
};

double max_step_psd(const MatrixXd& L, const MatrixXd& dX)
{
    const auto Lt = L.triangularView<Eigen::Lower>();
    MatrixXd A1 = Lt.solve(dX);
    MatrixXd Y = Lt.solve(A1.transpose());
    Y = 0.5 * (Y + Y.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Y, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const MatrixXd& x, const MatrixXd& dx)
{
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (dx(i, 0) < 0)
            a = std::min(a, -x(i, 0) / dx(i, 0));
    return a;
}

class Ipm {
public:
    Ipm(const Core& P, const Options& o) : P_(P), o_(o) {}

    CoreResult run();

private:
    bool compute_scaling();
    bool build_and_factor();
    bool solve_direction(const std::vector<MatrixXd>& Rc, std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dS,
                         VectorXd& dy, VectorXd& dxf);
    void step_lengths(const std::vector<MatrixXd>& dX, const std::vector<MatrixXd>& dS, double& ap, double& ad) const;
    double backtrack(const std::vector<MatrixXd>& Z, const std::vector<MatrixXd>& dZ, double a) const;

    const Core& P_;
    const Options& o_;
    std::vector<MatrixXd> X_, S_;
    VectorXd y_, xf_;
    std::vector<MatrixXd> rd_;
    VectorXd rp_, rf_;
    std::vector<Scaling> sc_;
    MatrixXd M_;
    MatrixXd K_;
    Eigen::LLT<MatrixXd> llt_;
    Eigen::PartialPivLU<MatrixXd> lu_;
    bool use_lu_ = false;
};

bool Ipm::compute_scaling()
{
    sc_.resize(P_.nblocks());
    for (int k = 0; k < P_.nblocks(); ++k) {
        Scaling& s = sc_[k];
        if (P_.diag[k]) {
            s.d = (X_[k].col(0).array() / S_[k].col(0).array()).matrix();
            continue;
        }
        Eigen::LLT<MatrixXd> lx(X_[k]);
        Eigen::LLT<MatrixXd> ls(S_[k]);
        if (lx.info() != Eigen::Success || ls.info() != Eigen::Success)
            return false;
        s.L = lx.matrixL();
        s.R = ls.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(s.R.transpose() * s.L, Eigen::ComputeFullU | Eigen::ComputeFullV);
        s.d = svd.singularValues();
        if (s.d.minCoeff() <= 0 || !s.d.allFinite())
            return false;
        const MatrixXd& V = svd.matrixV();
        s.G = s.L * V * s.d.cwiseSqrt().cwiseInverse().asDiagonal();
        MatrixXd Linv = s.L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(P_.n[k], P_.n[k]));
        s.Ginv = s.d.cwiseSqrt().asDiagonal() * V.transpose() * Linv;
        s.W = s.G * s.G.transpose();
    }
    return true;
}

bool Ipm::build_and_factor()
{
    const int m = P_.m;
    M_ = MatrixXd::Zero(m, m);
    for (int k = 0; k < P_.nblocks(); ++k) {
        const int n = P_.n[k];
        if (P_.diag[k]) {
            MatrixXd Alp = MatrixXd::Zero(m, n);
            for (const auto& e : P_.a[k])
                Alp(e.con, e.row) += e.value;
            M_.noalias() += Alp * sc_[k].d.asDiagonal() * Alp.transpose();
            continue;
        }
        // Rows of G^T A_i G in svec form, restricted to constraints touching block k.
        std::vector<int> touched;
        std::vector<int> slot(m, -1);
        for (const auto& e : P_.a[k])
            if (slot[e.con] < 0) {
                slot[e.con] = static_cast<int>(touched.size());
                touched.push_back(e.con);
            }
        if (touched.empty())
            continue;
        const MatrixXd& G = sc_[k].G;
        std::vector<MatrixXd> T(touched.size(), MatrixXd::Zero(n, n));
        for (const auto& e : P_.a[k]) {
            MatrixXd& Ti = T[slot[e.con]];
            if (e.row == e.col) {
                Ti.noalias() += e.value * G.row(e.row).transpose() * G.row(e.row);
            } else {
                MatrixXd outer = G.row(e.row).transpose() * G.row(e.col);
                Ti += e.value * (outer + outer.transpose());
            }
        }
        const int sv = n * (n + 1) / 2;
        MatrixXd Abar(touched.size(), sv);
        const double r2 = std::sqrt(2.0);
        for (std::size_t t = 0; t < touched.size(); ++t) {
            int c = 0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i <= j; ++i)
                    Abar(static_cast<Eigen::Index>(t), c++) = (i == j) ? T[t](i, j) : r2 * T[t](i, j);
        }
        MatrixXd Mk = Abar * Abar.transpose();
        for (std::size_t r = 0; r < touched.size(); ++r)
            for (std::size_t c = 0; c < touched.size(); ++c)
                M_(touched[r], touched[c]) += Mk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    M_ = 0.5 * (M_ + M_.transpose());

    const int p = P_.nfree();
    if (p == 0) {
        llt_.compute(M_);
        if (llt_.info() == Eigen::Success) {
            use_lu_ = false;
            return true;
        }
        lu_.compute(M_);
        use_lu_ = true;
        return true;
    }
    K_ = MatrixXd::Zero(m + p, m + p);
    K_.topLeftCorner(m, m) = M_;
    K_.topRightCorner(m, p) = P_.Af;
    K_.bottomLeftCorner(p, m) = P_.Af.transpose();
    lu_.compute(K_);
    use_lu_ = true;
    return true;
}

bool Ipm::solve_direction(const std::vector<MatrixXd>& Rc, std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dS,
                          VectorXd& dy, VectorXd& dxf)
{
    const int m = P_.m;
    const int p = P_.nfree();
    VectorXd r = rp_;
    std::vector<MatrixXd> T(P_.nblocks());
    for (int k = 0; k < P_.nblocks(); ++k) {
        if (P_.diag[k])
            T[k] = Rc[k] - (sc_[k].d.array() * rd_[k].col(0).array()).matrix();
        else
            T[k] = Rc[k] - sc_[k].W * rd_[k] * sc_[k].W;
        VectorXd tmp = VectorXd::Zero(m);
        apply_block(P_, k, T[k], tmp);
        r -= tmp;
    }
    // Two rounds of iterative refinement keep the primal residual from drifting
    // once M becomes ill-conditioned.
    if (p == 0) {
        auto lin = [&](const VectorXd& v) { return use_lu_ ? VectorXd(lu_.solve(v)) : VectorXd(llt_.solve(v)); };
        dy = lin(r);
        for (int it = 0; it < 2; ++it)
            dy += lin(r - M_ * dy);
        dxf.resize(0);
    } else {
        VectorXd rhs(m + p);
        rhs << r, rf_;
        VectorXd sol = lu_.solve(rhs);
        for (int it = 0; it < 2; ++it)
            sol += lu_.solve(rhs - K_ * sol);
        dy = sol.head(m);
        dxf = sol.tail(p);
    }
    if (!dy.allFinite() || !dxf.allFinite())
        return false;
    dX.resize(P_.nblocks());
    dS.resize(P_.nblocks());
    for (int k = 0; k < P_.nblocks(); ++k) {
        dS[k] = rd_[k] - adjoint_block(P_, k, dy);
        if (P_.diag[k]) {
            dX[k] = Rc[k] - (sc_[k].d.array() * dS[k].col(0).array()).matrix();
        } else {
            dX[k] = Rc[k] - sc_[k].W * dS[k] * sc_[k].W;
            dX[k] = 0.5 * (dX[k] + dX[k].transpose());
        }
    }
    return true;
}

void Ipm::step_lengths(const std::vector<MatrixXd>& dX, const std::vector<MatrixXd>& dS, double& ap, double& ad) const
{
    ap = std::numeric_limits<double>::infinity();
    ad = std::numeric_limits<double>::infinity();
    for (int k = 0; k < P_.nblocks(); ++k) {
        if (P_.diag[k]) {
            ap = std::min(ap, max_step_lp(X_[k], dX[k]));
            ad = std::min(ad, max_step_lp(S_[k], dS[k]));
        } else {
            ap = std::min(ap, max_step_psd(sc_[k].L, dX[k]));
            ad = std::min(ad, max_step_psd(sc_[k].R, dS[k]));
        }
    }
}

double Ipm::backtrack(const std::vector<MatrixXd>& Z, const std::vector<MatrixXd>& dZ, double a) const
{
    for (int tries = 0; tries < 30; ++tries) {
        bool ok = true;
        for (int k = 0; k < P_.nblocks() && ok; ++k) {
            const MatrixXd T = Z[k] + a * dZ[k];
            if (P_.diag[k]) {
                ok = (T.array() > 0).all();
            } else {
                Eigen::LLT<MatrixXd> llt(0.5 * (T + T.transpose()));
                ok = llt.info() == Eigen::Success;
            }
        }
        if (ok)
            return a;
        a *= 0.8;
    }
    return 0.0;
}

CoreResult Ipm::run()
{
    const int m = P_.m;
    const int nb = P_.nblocks();
    CoreResult res;

    int cone_dim = 0;
    for (int k = 0; k < nb; ++k)
        cone_dim += P_.n[k];

    double normC = 0.0;
    for (const auto& Ck : P_.C)
        normC += Ck.squaredNorm();
    normC = std::sqrt(normC + P_.cf.squaredNorm());
    const double normb = P_.b.norm();

    // Starting point in the spirit of SDPT3's default.
    X_.resize(nb);
    S_.resize(nb);
    for (int k = 0; k < nb; ++k) {
        const int n = P_.n[k];
        std::vector<double> rownorm(m, 0.0);
        for (const auto& e : P_.a[k])
            rownorm[e.con] += (e.row == e.col || P_.diag[k] ? 1.0 : 2.0) * e.value * e.value;
        double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
        double eta = xi;
        for (int i = 0; i < m; ++i) {
            const double an = std::sqrt(rownorm[i]);
            if (an > 0) {
                xi = std::max(xi, n * (1.0 + std::abs(P_.b[i])) / (1.0 + an));
                eta = std::max(eta, an);
            }
        }
        eta = std::max(eta, P_.C[k].norm());
        if (P_.diag[k]) {
            X_[k] = MatrixXd::Constant(n, 1, xi);
            S_[k] = MatrixXd::Constant(n, 1, eta);
        } else {
            X_[k] = xi * MatrixXd::Identity(n, n);
            S_[k] = eta * MatrixXd::Identity(n, n);
        }
    }
    y_ = VectorXd::Zero(m);
    xf_ = VectorXd::Zero(P_.nfree());
    rd_.resize(nb);

    double prev_comp = std::numeric_limits<double>::infinity();
    int slow = 0;
    struct {
        double merit = std::numeric_limits<double>::infinity();
        std::vector<MatrixXd> X, S;
        VectorXd y, xf;
        double pobj = 0, dobj = 0, rel_pinf = 0, rel_dinf = 0, gap = 0;
    } best;
    double last_merit = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter <= o_.max_iter; ++iter) {
        res.iters = iter;
        rp_ = P_.b - apply(P_, X_, xf_);
        double rd_norm2 = 0.0;
        double pobj = P_.nfree() > 0 ? P_.cf.dot(xf_) : 0.0;
        double comp = 0.0;
        for (int k = 0; k < nb; ++k) {
            rd_[k] = P_.C[k] - S_[k] - adjoint_block(P_, k, y_);
            rd_norm2 += rd_[k].squaredNorm();
            pobj += inner(P_.C[k], X_[k]);
            comp += inner(X_[k], S_[k]);
        }
        rf_ = P_.nfree() > 0 ? VectorXd(P_.cf - P_.Af.transpose() * y_) : VectorXd();
        rd_norm2 += rf_.squaredNorm();
        const double dobj = P_.b.dot(y_);
        res.pobj = pobj;
        res.dobj = dobj;
        res.rel_pinf = rp_.norm() / (1.0 + normb);
        res.rel_dinf = std::sqrt(rd_norm2) / (1.0 + normC);
        res.gap = comp;
        if (o_.verbose)
            std::fprintf(stderr, "ipm %3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e\n", iter, pobj, dobj,
                         res.rel_pinf, res.rel_dinf, comp);
        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(comp)) {
            res.failed = true;
            res.message = "non-finite iterate";
            break;
        }
        const double merit = std::max({res.rel_pinf, res.rel_dinf, comp / (1.0 + std::abs(pobj) + std::abs(dobj))});
        if (merit < best.merit) {
            best.merit = merit;
            best.X = X_;
            best.S = S_;
            best.y = y_;
            best.xf = xf_;
            best.pobj = pobj;
            best.dobj = dobj;
            best.rel_pinf = res.rel_pinf;
            best.rel_dinf = res.rel_dinf;
            best.gap = comp;
        }
        last_merit = merit;
        if (res.rel_pinf <= o_.tol && res.rel_dinf <= o_.tol
            && comp <= std::max(o_.gap_abs, o_.tol * (1.0 + std::abs(pobj) + std::abs(dobj)))) {
            res.converged = true;
            break;
        }
        if (iter == o_.max_iter) {
            res.message = "iteration limit";
            break;
        }

        const double mu = comp / cone_dim;
        if (!compute_scaling() || !build_and_factor()) {
            res.failed = true;
            res.message = "factorization breakdown";
            break;
        }

        // Predictor.
        std::vector<MatrixXd> Rc(nb), dX, dS;
        VectorXd dy, dxf;
        for (int k = 0; k < nb; ++k)
            Rc[k] = -X_[k];
        if (!solve_direction(Rc, dX, dS, dy, dxf)) {
            res.failed = true;
            res.message = "non-finite search direction";
            break;
        }
        double ap_aff, ad_aff;
        step_lengths(dX, dS, ap_aff, ad_aff);
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);
        double comp_aff = 0.0;
        for (int k = 0; k < nb; ++k)
            comp_aff += inner(X_[k] + ap_aff * dX[k], S_[k] + ad_aff * dS[k]);
        const double sigma = std::clamp(std::pow(std::max(comp_aff, 0.0) / comp, 3.0), 0.0, 1.0);

        // Corrector.
        for (int k = 0; k < nb; ++k) {
            const Scaling& s = sc_[k];
            if (P_.diag[k]) {
                Rc[k] = ((sigma * mu - X_[k].col(0).array() * S_[k].col(0).array()
                          - dX[k].col(0).array() * dS[k].col(0).array())
                         / S_[k].col(0).array())
                            .matrix();
                continue;
            }
            const int n = P_.n[k];
            MatrixXd dXh = s.Ginv * dX[k] * s.Ginv.transpose();
            MatrixXd dSh = s.G.transpose() * dS[k] * s.G;
            MatrixXd Rh = -0.5 * (dXh * dSh + dSh * dXh);
            for (int i = 0; i < n; ++i)
                Rh(i, i) += sigma * mu - s.d[i] * s.d[i];
            MatrixXd U(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    U(i, j) = 2.0 * Rh(i, j) / (s.d[i] + s.d[j]);
            Rc[k] = s.G * U * s.G.transpose();
            Rc[k] = 0.5 * (Rc[k] + Rc[k].transpose());
        }
        if (!solve_direction(Rc, dX, dS, dy, dxf)) {
            res.failed = true;
            res.message = "non-finite search direction";
            break;
        }
        double ap, ad;
        step_lengths(dX, dS, ap, ad);
        const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);

        // Back off while a Cholesky factor of the new iterate fails.
        ap = backtrack(X_, dX, ap);
        ad = backtrack(S_, dS, ad);
        for (int k = 0; k < nb; ++k) {
            X_[k] += ap * dX[k];
            S_[k] += ad * dS[k];
            if (!P_.diag[k]) {
                X_[k] = 0.5 * (X_[k] + X_[k].transpose());
                S_[k] = 0.5 * (S_[k] + S_[k].transpose());
            }
        }
        y_ += ad * dy;
        if (P_.nfree() > 0)
            xf_ += ap * dxf;
        if (ap < 1e-12 && ad < 1e-12) {
            res.message = "stalled";
            break;
        }
        const bool nearly_feasible = res.rel_pinf <= 1e-6 && res.rel_dinf <= 1e-6;
        slow = nearly_feasible && comp > 0.5 * prev_comp ? slow + 1 : 0;
        prev_comp = comp;
        if (slow >= 6) {
            res.message = "stalled";
            break;
        }
    }
    if (!res.converged && best.merit < last_merit) {
        // Late iterations lost accuracy; report the best iterate seen.
        X_ = best.X;
        S_ = best.S;
        y_ = best.y;
        xf_ = best.xf;
        res.pobj = best.pobj;
        res.dobj = best.dobj;
        res.rel_pinf = best.rel_pinf;
        res.rel_dinf = best.rel_dinf;
        res.gap = best.gap;
    }
    res.X = X_;
    res.S = S_;
    res.y = y_;
    res.xf = xf_;
    return res;
}

// Rows that are linear combinations of others. Returns the indices kept; when an
// inconsistent row is found, `inconsistent` receives y with A^*(y) = 0 and b^T y < 0.
std::vector<int> independent_rows(const Problem& p, std::optional<VectorXd>& inconsistent)
{
    const int m = p.num_constraints();
    std::vector<int> offset(p.num_blocks() + 1, 0);
    for (int k = 0; k < p.num_blocks(); ++k) {
        const int n = std::abs(p.block_sizes[k]);
        offset[k + 1] = offset[k] + (p.block_sizes[k] < 0 ? n : n * (n + 1) / 2);
    }
    auto column = [&](const Entry& e) {
        const int n = std::abs(p.block_sizes[e.block]);
        if (p.block_sizes[e.block] < 0)
            return offset[e.block] + e.row;
        (void)n;
        return offset[e.block] + e.col * (e.col + 1) / 2 + e.row;
    };

    // Fast path: every row owns a column no other row touches.
    std::vector<int> owner(offset.back(), -1);
    for (const auto& e : p.constraints) {
        if (e.value == 0.0)
            continue;
        int& o = owner[column(e)];
        o = (o == -1 || o == e.con) ? e.con : -2;
    }
    std::vector<bool> has_private(m, false);
    for (int o : owner)
        if (o >= 0)
            has_private[o] = true;
    if (std::all_of(has_private.begin(), has_private.end(), [](bool b) { return b; })) {
        std::vector<int> all(m);
        for (int i = 0; i < m; ++i)
            all[i] = i;
        return all;
    }

    MatrixXd At = MatrixXd::Zero(offset.back(), m);
    for (const auto& e : p.constraints) {
        const double scale = (p.block_sizes[e.block] > 0 && e.row != e.col) ? 2.0 : 1.0;
        At(column(e), e.con) += scale * e.value;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(At);
    qr.setThreshold(1e-10);
    qr.compute(At);
    const int r = static_cast<int>(qr.rank());
    const auto& perm = qr.colsPermutation().indices();
    std::vector<int> keep;
    for (int i = 0; i < r; ++i)
        keep.push_back(perm[i]);
    std::sort(keep.begin(), keep.end());

    VectorXd b = Eigen::Map<const VectorXd>(p.rhs.data(), m);
    MatrixXd Ak(At.rows(), keep.size());
    VectorXd bk(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        Ak.col(static_cast<Eigen::Index>(j)) = At.col(keep[j]);
        bk[static_cast<Eigen::Index>(j)] = b[keep[j]];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qk;
    if (!keep.empty())
        qk.compute(Ak);
    std::vector<bool> kept(m, false);
    for (int i : keep)
        kept[i] = true;
    for (int i = 0; i < m; ++i) {
        if (kept[i])
            continue;
        VectorXd lambda = keep.empty() ? VectorXd() : VectorXd(qk.solve(At.col(i)));
        const double implied = keep.empty() ? 0.0 : lambda.dot(bk);
        if (std::abs(implied - b[i]) > 1e-9 * (1.0 + std::abs(b[i]))) {
            VectorXd y = VectorXd::Zero(m);
            y[i] = 1.0;
            for (std::size_t j = 0; j < keep.size(); ++j)
                y[keep[j]] = -lambda[static_cast<Eigen::Index>(j)];
            if (b.dot(y) > 0)
                y = -y;
            inconsistent = y;
            return keep;
        }
    }
    return keep;
}

Core build_core(const Problem& p, const std::vector<int>& rows)
{
    Core c;
    std::vector<int> map(p.num_constraints(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        map[rows[i]] = static_cast<int>(i);
    c.m = static_cast<int>(rows.size());
    for (int s : p.block_sizes)
        c.add_block(std::abs(s), s < 0);
    for (const auto& e : p.constraints)
        if (map[e.con] >= 0 && e.value != 0.0)
            c.a[e.block].push_back({map[e.con], e.row, e.col, e.value});
    c.b.resize(c.m);
    for (int i = 0; i < c.m; ++i)
        c.b[i] = p.rhs[rows[i]];
    c.Af.resize(c.m, 0);
    c.cf.resize(0);
    return c;
}

std::vector<MatrixXd> to_blocks(const Problem& p, const std::vector<MatrixXd>& X)
{
    return std::vector<MatrixXd>(X.begin(), X.begin() + p.num_blocks());
}

VectorXd expand_y(const VectorXd& y, const std::vector<int>& rows, int m)
{
    VectorXd out = VectorXd::Zero(m);
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[rows[i]] = y[static_cast<Eigen::Index>(i)];
    return out;
}

void fill_diagnostics(const Problem& p, Solution& s)
{
    double bmax = 0.0;
    for (double v : p.rhs)
        bmax = std::max(bmax, std::abs(v));
    s.primal_residual = equality_residual(p, s.X) / (1.0 + bmax);
    s.min_eigenvalue = min_eigenvalue(s.X);
}

Solution solve_margin(const Problem& p, const Options& opts, const std::vector<int>& rows, double bound)
{
    Core c = build_core(p, rows);
    const int m0 = c.m;
    int dim = 0;
    for (int n : c.n)
        dim += n;

    // Free margin t: column <A_i, I>.
    const int trace_row = m0;
    const int cap_row = m0 + 1;
    c.m = m0 + 2;
    c.Af = MatrixXd::Zero(c.m, 1);
    for (int k = 0; k < c.nblocks(); ++k)
        for (const auto& e : c.a[k])
            if (e.row == e.col)
                c.Af(e.con, 0) += e.value;
    c.Af(trace_row, 0) = dim / bound;
    c.Af(cap_row, 0) = 1.0;
    c.cf = VectorXd::Constant(1, -1.0);

    // (sum tr(Z) + dim * t + s) / bound = 1, and t + u = cap.
    const int nb0 = c.nblocks();
    for (int k = 0; k < nb0; ++k)
        for (int i = 0; i < c.n[k]; ++i)
            c.a[k].push_back({trace_row, i, i, 1.0 / bound});
    const int sblk = c.add_block(1, true);
    c.a[sblk].push_back({trace_row, 0, 0, 1.0 / bound});
    const int ublk = c.add_block(1, true);
    c.a[ublk].push_back({cap_row, 0, 0, 1.0});
    c.b.conservativeResize(c.m);
    c.b[trace_row] = 1.0;
    c.b[cap_row] = opts.margin_cap;

    Ipm ipm(c, opts);
    CoreResult r = ipm.run();

    Solution s;
    s.iterations = r.iters;
    s.message = r.message;
    const double t = r.xf.size() > 0 ? r.xf[0] : 0.0;
    s.margin = t;
    s.primal_objective = t;
    s.dual_objective = -r.dobj;
    s.dual_residual = r.rel_dinf;
    s.X.resize(p.num_blocks());
    for (int k = 0; k < p.num_blocks(); ++k) {
        s.X[k] = r.X[k];
        if (c.diag[k])
            s.X[k].array() += t;
        else
            s.X[k].diagonal().array() += t;
    }
    VectorXd ycore = r.y.head(m0);
    s.y = expand_y(ycore, rows, p.num_constraints());
    fill_diagnostics(p, s);

    const bool trace_active = r.X[sblk](0, 0) < 1e-6 * bound;
    // A dual-feasible iterate bounds the margin from above even without convergence.
    const bool dual_ok = r.rel_dinf <= opts.tol;
    if ((r.converged && t < -opts.feas_tol) || (dual_ok && s.dual_objective < -opts.feas_tol)) {
        s.status = Status::Infeasible;
        VectorXd ray = -s.y;
        if (is_farkas_certificate(p, ray))
            s.ray = ray / ray.norm();
        if (trace_active)
            s.message = "trace bound active";
    } else if (s.primal_residual <= opts.residual_tol && s.min_eigenvalue >= -opts.feas_tol
               && (r.converged || t >= -opts.feas_tol)) {
        s.status = Status::Feasible;
    } else if (r.failed) {
        s.status = Status::NumericalFailure;
    } else {
        s.status = Status::MaxIter;
    }
    return s;
}

} // namespace

const char* status_name(Status s)
{
    switch (s) {
    case Status::Feasible:
        return "feasible";
    case Status::Infeasible:
        return "infeasible";
    case Status::MaxIter:
        return "max_iter";
    case Status::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

void Problem::validate() const
{
    if (block_sizes.empty())
        throw SdpError("problem has no blocks");
    for (int s : block_sizes)
        if (s == 0)
            throw SdpError("zero block size");
    auto check = [&](const Entry& e, bool is_obj) {
        if (!is_obj && (e.con < 0 || e.con >= num_constraints()))
            throw SdpError("constraint index out of range");
        if (e.block < 0 || e.block >= num_blocks())
            throw SdpError("block index out of range");
        const int n = std::abs(block_sizes[e.block]);
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
            throw SdpError("entry index out of range");
        if (e.row > e.col)
            throw SdpError("entries must be upper triangular (row <= col)");
        if (block_sizes[e.block] < 0 && e.row != e.col)
            throw SdpError("off-diagonal entry in a diagonal block");
        if (!std::isfinite(e.value))
            throw SdpError("non-finite coefficient");
    };
    for (const auto& e : constraints)
        check(e, false);
    for (const auto& e : objective)
        check(e, true);
}

double equality_residual(const Problem& p, const std::vector<MatrixXd>& X)
{
    VectorXd ax = VectorXd::Zero(p.num_constraints());
    for (const auto& e : p.constraints) {
        const MatrixXd& B = X[e.block];
        if (p.block_sizes[e.block] < 0)
            ax[e.con] += e.value * B(e.row, 0);
        else if (e.row == e.col)
            ax[e.con] += e.value * B(e.row, e.row);
        else
            ax[e.con] += 2.0 * e.value * B(e.row, e.col);
    }
    double r = 0.0;
    for (int i = 0; i < p.num_constraints(); ++i)
        r = std::max(r, std::abs(ax[i] - p.rhs[i]));
    return r;
}

double min_eigenvalue(const std::vector<MatrixXd>& X)
{
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& B : X) {
        if (B.cols() == 1 && B.rows() != 1) {
            lmin = std::min(lmin, B.minCoeff());
        } else if (B.size() > 0) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(B, Eigen::EigenvaluesOnly);
            lmin = std::min(lmin, es.eigenvalues().minCoeff());
        }
    }
    return lmin;
}

std::vector<MatrixXd> adjoint(const Problem& p, const VectorXd& y)
{
    std::vector<MatrixXd> out;
    for (int s : p.block_sizes)
        out.push_back(s < 0 ? MatrixXd::Zero(-s, 1) : MatrixXd::Zero(s, s));
    for (const auto& e : p.constraints) {
        const double v = y[e.con] * e.value;
        MatrixXd& B = out[e.block];
        if (p.block_sizes[e.block] < 0) {
            B(e.row, 0) += v;
        } else {
            B(e.row, e.col) += v;
            if (e.row != e.col)
                B(e.col, e.row) += v;
        }
    }
    return out;
}

bool is_farkas_certificate(const Problem& p, const VectorXd& ray, double tol)
{
    if (ray.size() != p.num_constraints() || !ray.allFinite())
        return false;
    const VectorXd b = Eigen::Map<const VectorXd>(p.rhs.data(), p.num_constraints());
    const double bt = b.dot(ray);
    if (!(bt < 0))
        return false;
    const VectorXd r = ray / std::abs(bt);
    double worst = 0.0;
    double scale = 1.0;
    for (const auto& B : adjoint(p, r)) {
        if (B.cols() == 1 && B.rows() != 1) {
            worst = std::min(worst, B.minCoeff());
            scale = std::max(scale, B.cwiseAbs().maxCoeff());
        } else {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(B, Eigen::EigenvaluesOnly);
            worst = std::min(worst, es.eigenvalues().minCoeff());
            scale = std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    }
    return worst >= -tol * scale;
}

Solution solve(const Problem& p, const Options& opts)
{
    p.validate();
    std::optional<VectorXd> inconsistent;
    const std::vector<int> rows = independent_rows(p, inconsistent);
    if (inconsistent) {
        Solution s;
        s.status = Status::Infeasible;
        s.ray = *inconsistent / inconsistent->norm();
        s.margin = -std::numeric_limits<double>::infinity();
        s.message = "inconsistent linear constraints";
        for (int sz : p.block_sizes)
            s.X.push_back(sz < 0 ? MatrixXd::Zero(-sz, 1) : MatrixXd::Zero(sz, sz));
        s.y = VectorXd::Zero(p.num_constraints());
        return s;
    }
    double bound = opts.trace_bound;
    Solution s;
    for (int attempt = 0; attempt <= opts.trace_retries; ++attempt) {
        s = solve_margin(p, opts, rows, bound);
        if (!(s.status == Status::Infeasible && s.message == "trace bound active"))
            break;
        bound *= 100.0;
    }
    return s;
}

Solution minimize(const Problem& p, const Options& opts)
{
    p.validate();
    std::optional<VectorXd> inconsistent;
    const std::vector<int> rows = independent_rows(p, inconsistent);
    Solution s;
    if (inconsistent) {
        s.status = Status::Infeasible;
        s.ray = *inconsistent / inconsistent->norm();
        s.message = "inconsistent linear constraints";
        return s;
    }
    Core c = build_core(p, rows);
    for (const auto& e : p.objective) {
        MatrixXd& C = c.C[e.block];
        if (c.diag[e.block]) {
            C(e.row, 0) += e.value;
        } else {
            C(e.row, e.col) += e.value;
            if (e.row != e.col)
                C(e.col, e.row) += e.value;
        }
    }
    Ipm ipm(c, opts);
    CoreResult r = ipm.run();
    s.iterations = r.iters;
    s.message = r.message;
    s.X = to_blocks(p, r.X);
    s.y = expand_y(r.y, rows, p.num_constraints());
    s.primal_objective = r.pobj;
    s.dual_objective = r.dobj;
    s.dual_residual = r.rel_dinf;
    fill_diagnostics(p, s);
    s.status = r.converged ? Status::Feasible : (r.failed ? Status::NumericalFailure : Status::MaxIter);
    return s;
}

} // namespace sosltl::sdp
