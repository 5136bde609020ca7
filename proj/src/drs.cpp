#include "a2dr/drs.hpp"

#include "a2dr/lsqr.hpp"

namespace a2dr {

DenseVector project_affine(const SparseMatrix& A, const DenseVector& b, const DenseVector& w,
                           DrsWorkspace* ws) {
    if (A.rows() == 0) return w;
    DenseVector rhs = A.mul(w);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= b[i];
    const DenseVector* warm = (ws && !ws->proj_corr.empty()) ? &ws->proj_corr : nullptr;
    double tol = ws ? ws->lsqr_tol : 1e-10;
    int cap = ws ? ws->lsqr_max_iter : 0;
    LsqrResult d = lsqr_solve(A, rhs, warm, tol, cap);
    if (ws) ws->proj_corr = d.x;
    DenseVector x = w;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= d.x[i];
    return x;
}

DrsStep drs_step(const BlockProblem& p, const DenseVector& v, double t, DrsWorkspace& ws) {
    DrsStep s;
    p.prox_all(v, t, s.x_half);
    DenseVector refl(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) refl[i] = 2.0 * s.x_half[i] - v[i];
    DenseVector proj = project_affine(p.A, p.b, refl, &ws);
    s.v_next.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s.v_next[i] = v[i] + proj[i] - s.x_half[i];
    s.g.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s.g[i] = v[i] - s.v_next[i];
    return s;
}

Residuals residuals(const BlockProblem& p, const DenseVector& v, const DenseVector& x_half,
                    double t, DrsWorkspace& ws) {
    Residuals r;
    r.r_prim = p.A.mul(x_half);
    for (std::size_t i = 0; i < r.r_prim.size(); ++i) r.r_prim[i] -= p.b[i];

    DenseVector target(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) target[i] = (x_half[i] - v[i]) / t;
    if (p.A.rows() > 0) {
        const DenseVector* warm = ws.lam.empty() ? nullptr : &ws.lam;
        LsqrResult lam = lsqr_solve_transpose(p.A, target, warm, ws.lsqr_tol, ws.lsqr_max_iter);
        ws.lam = lam.x;
        r.lam = std::move(lam.x);
        r.r_dual = p.A.tmul(r.lam);
        for (std::size_t i = 0; i < v.size(); ++i) r.r_dual[i] -= target[i];
    } else {
        r.lam = {};
        r.r_dual.resize(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r.r_dual[i] = -target[i];
    }
    r.prim_norm = norm2(r.r_prim);
    r.dual_norm = norm2(r.r_dual);
    r.norm = std::hypot(r.prim_norm, r.dual_norm);
    return r;
}

bool check_stop(double norm, double r0_norm, double eps_abs, double eps_rel) {
    return norm <= eps_abs + eps_rel * r0_norm;
}

}  // namespace a2dr
