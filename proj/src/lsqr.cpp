#include "a2dr/lsqr.hpp"

#include <cmath>
#include <stdexcept>

namespace a2dr {

namespace {

// Operator view so the transpose solve reuses the same core.
struct Op {
    const SparseMatrix& A;
    bool transpose;
    int rows() const { return transpose ? A.cols() : A.rows(); }
    int cols() const { return transpose ? A.rows() : A.cols(); }
    void apply(const double* x, double* y) const { transpose ? A.tmul(x, y) : A.mul(x, y); }
    void applyT(const double* x, double* y) const { transpose ? A.mul(x, y) : A.tmul(x, y); }
};

// Paige-Saunders LSQR on min ||op x - b||, x0 = 0. Stopping follows the
// standard estimates: ||r|| <= tol*(||b|| + ||A||*||x||) or
// ||A'r|| <= tol*||A||*||r||. scale_hint raises the reference norm for the
// first test; warm-started solves pass the original rhs norm through it so
// an already-converged start exits without iterating on noise.
LsqrResult lsqr_core(const Op& op, const DenseVector& b, double tol, int max_iter,
                     double scale_hint = 0.0) {
    const int m = op.rows(), n = op.cols();
    LsqrResult out;
    out.x.assign(n, 0.0);
    if (max_iter <= 0) max_iter = 2 * std::min(m, n) + 50;

    DenseVector u = b;
    double beta = norm2(u);
    double bnorm = std::max(beta, scale_hint);
    if (beta <= tol * scale_hint) {
        out.resid_norm = beta;
        out.converged = true;
        return out;
    }
    if (beta == 0.0) {
        out.converged = true;
        return out;
    }
    scale(u, 1.0 / beta);

    DenseVector v(n);
    op.applyT(u.data(), v.data());
    double alpha = norm2(v);
    if (alpha == 0.0) {  // b orthogonal to range(A): x = 0 is optimal
        out.resid_norm = beta;
        out.converged = true;
        return out;
    }
    scale(v, 1.0 / alpha);

    DenseVector w = v;
    double phibar = beta, rhobar = alpha;
    double anorm_sq = 0.0;
    DenseVector tmp_m(m), tmp_n(n);

    for (int it = 1; it <= max_iter; ++it) {
        // u = op*v - alpha*u ; beta = ||u||
        op.apply(v.data(), tmp_m.data());
        for (int i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
        beta = norm2(u);
        anorm_sq += alpha * alpha + beta * beta;
        if (beta > 0.0) {
            scale(u, 1.0 / beta);
            op.applyT(u.data(), tmp_n.data());
            for (int i = 0; i < n; ++i) v[i] = tmp_n[i] - beta * v[i];
            alpha = norm2(v);
            if (alpha > 0.0) scale(v, 1.0 / alpha);
        } else {
            alpha = 0.0;
        }

        double rho = std::hypot(rhobar, beta);
        double c = rhobar / rho, s = beta / rho;
        double theta = s * alpha;
        rhobar = -c * alpha;
        double phi = c * phibar;
        phibar = s * phibar;

        double t1 = phi / rho, t2 = -theta / rho;
        for (int i = 0; i < n; ++i) {
            out.x[i] += t1 * w[i];
            w[i] = v[i] + t2 * w[i];
        }

        out.iters = it;
        out.resid_norm = phibar;
        double anorm = std::sqrt(anorm_sq);
        out.normal_norm = phibar * alpha * std::fabs(c);
        double xnorm = norm2(out.x);
        if (out.resid_norm <= tol * (bnorm + anorm * xnorm) ||
            (out.resid_norm > 0.0 && out.normal_norm <= tol * anorm * out.resid_norm) ||
            alpha == 0.0) {
            out.converged = true;
            break;
        }
    }
    return out;
}

LsqrResult solve_with_warm(const Op& op, const DenseVector& rhs, const DenseVector* warm,
                           double tol, int max_iter) {
    if (static_cast<int>(rhs.size()) != op.rows()) throw std::invalid_argument("lsqr: rhs size mismatch");
    if (warm && !warm->empty()) {
        if (static_cast<int>(warm->size()) != op.cols())
            throw std::invalid_argument("lsqr: warm start size mismatch");
        DenseVector r = rhs;
        DenseVector Aw(op.rows());
        op.apply(warm->data(), Aw.data());
        for (int i = 0; i < op.rows(); ++i) r[i] -= Aw[i];
        LsqrResult res = lsqr_core(op, r, tol, max_iter, norm2(rhs));
        for (int i = 0; i < op.cols(); ++i) res.x[i] += (*warm)[i];
        return res;
    }
    return lsqr_core(op, rhs, tol, max_iter);
}

}  // namespace

LsqrResult lsqr_solve(const SparseMatrix& A, const DenseVector& rhs, const DenseVector* warm,
                      double tol, int max_iter) {
    return solve_with_warm(Op{A, false}, rhs, warm, tol, max_iter);
}

LsqrResult lsqr_solve_transpose(const SparseMatrix& A, const DenseVector& rhs,
                                const DenseVector* warm, double tol, int max_iter) {
    return solve_with_warm(Op{A, true}, rhs, warm, tol, max_iter);
}

}  // namespace a2dr
