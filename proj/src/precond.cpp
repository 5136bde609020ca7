#include "a2dr/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "a2dr/lsqr.hpp"

namespace a2dr {

FeasibilityReport presolve_check(const SparseMatrix& A, const DenseVector& b, double tol) {
    if (static_cast<int>(b.size()) != A.rows())
        throw std::invalid_argument("presolve_check: b size mismatch");
    FeasibilityReport rep;
    if (A.rows() == 0) return rep;
    LsqrResult ls = lsqr_solve(A, b, nullptr, 1e-12, 0);
    DenseVector r = A.mul(ls.x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    rep.residual_norm = norm2(r);
    rep.feasible = rep.residual_norm <= tol * (1.0 + norm2(b));
    rep.x_ls = std::move(ls.x);
    return rep;
}

Equilibration equilibrate(const SparseMatrix& A, int max_sweeps, double tol) {
    const int m = A.rows(), N = A.num_blocks();
    if (A.nnz() == 0) throw std::invalid_argument("equilibrate: A has no nonzero entries");

    // B(i,j) = sum of squared entries of A in row i, block column j,
    // kept sparse as (row, block, value) with both orientations indexed.
    struct Cell { int row, blk; double val; };
    std::vector<Cell> cells;
    {
        std::vector<std::pair<long, double>> acc(A.nnz());
        for (int k = 0; k < A.nnz(); ++k) {
            int blk = A.block_of_col(A.entry_cols()[k]);
            double v = A.entry_vals()[k];
            acc[k] = {static_cast<long>(A.entry_rows()[k]) * N + blk, v * v};
        }
        std::sort(acc.begin(), acc.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [key, v] : acc) {
            if (!cells.empty() && static_cast<long>(cells.back().row) * N + cells.back().blk == key)
                cells.back().val += v;
            else
                cells.push_back({static_cast<int>(key / N), static_cast<int>(key % N), v});
        }
    }
    std::vector<std::vector<int>> by_row(m), by_blk(N);  // indices into cells
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        by_row[cells[c].row].push_back(c);
        by_blk[cells[c].blk].push_back(c);
    }

    const double gamma = (static_cast<double>(m) + N) / (static_cast<double>(m) * N) *
                         std::sqrt(2.220446049250313e-16);
    DenseVector u(m, 0.0), w(N, 0.0);
    Equilibration out;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double change = 0.0;
        for (int i = 0; i < m; ++i) {
            if (by_row[i].empty()) continue;  // pinned
            double s = 0.0;
            for (int c : by_row[i]) s += cells[c].val * std::exp(w[cells[c].blk]);
            double nu = std::log(static_cast<double>(N)) - std::log(s + gamma * N);
            change = std::max(change, std::fabs(nu - u[i]));
            u[i] = nu;
        }
        for (int j = 0; j < N; ++j) {
            if (by_blk[j].empty()) continue;
            double s = 0.0;
            for (int c : by_blk[j]) s += cells[c].val * std::exp(u[cells[c].row]);
            double nw = std::log(static_cast<double>(m)) - std::log(s + gamma * m);
            change = std::max(change, std::fabs(nw - w[j]));
            w[j] = nw;
        }
        out.sweeps = sweep;
        out.final_change = change;
        if (change <= tol) break;
    }

    out.d.resize(m);
    out.e.resize(N);
    for (int i = 0; i < m; ++i) out.d[i] = std::exp(0.5 * u[i]);
    for (int j = 0; j < N; ++j) out.e[j] = std::exp(0.5 * w[j]);

    // Normalize the non-pinned scalings: equal geometric means for d and e,
    // and ||D A E||_F = sqrt(min(m, N)). Pinned entries stay exactly 1.
    double fro = 0.0;
    for (const auto& cell : cells) fro += cell.val * out.d[cell.row] * out.d[cell.row] *
                                          out.e[cell.blk] * out.e[cell.blk];
    fro = std::sqrt(fro);
    double logd = 0.0, loge = 0.0;
    int nd = 0, ne = 0;
    for (int i = 0; i < m; ++i)
        if (!by_row[i].empty()) {
            logd += std::log(out.d[i]);
            ++nd;
        }
    for (int j = 0; j < N; ++j)
        if (!by_blk[j].empty()) {
            loge += std::log(out.e[j]);
            ++ne;
        }
    logd /= nd;
    loge /= ne;
    double s = std::sqrt(static_cast<double>(std::min(m, N))) / fro;  // target c_d * c_e
    double cd = std::sqrt(s) * std::exp(0.5 * (loge - logd));
    double ce = std::sqrt(s) * std::exp(0.5 * (logd - loge));
    for (int i = 0; i < m; ++i)
        if (!by_row[i].empty()) out.d[i] *= cd;
    for (int j = 0; j < N; ++j)
        if (!by_blk[j].empty()) out.e[j] *= ce;
    return out;
}

double choose_t(const DenseVector& e) {
    if (e.empty()) throw std::invalid_argument("choose_t: empty scaling");
    DenseVector logs(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!(e[i] > 0.0)) throw std::invalid_argument("choose_t: scalings must be positive");
        logs[i] = std::log(e[i]);
    }
    std::sort(logs.begin(), logs.end());
    double mean = 0.0;
    for (double l : logs) mean += l;
    mean /= static_cast<double>(logs.size());
    return 0.1 * std::exp(-2.0 * mean);
}

DenseVector ScaledProblem::unscale_x(const DenseVector& xs) const {
    DenseVector x = xs;
    const auto& off = problem.A.block_offsets();
    for (int i = 0; i < problem.num_blocks(); ++i)
        for (int k = off[i]; k < off[i + 1]; ++k) x[k] *= e[i];
    return x;
}

DenseVector ScaledProblem::unscale_lambda(const DenseVector& ls) const {
    DenseVector lam = ls;
    for (std::size_t i = 0; i < lam.size(); ++i) lam[i] *= d[i];
    return lam;
}

DenseVector ScaledProblem::scale_v(const DenseVector& v) const {
    DenseVector vs = v;
    const auto& off = problem.A.block_offsets();
    for (int i = 0; i < problem.num_blocks(); ++i)
        for (int k = off[i]; k < off[i + 1]; ++k) vs[k] /= e[i];
    return vs;
}

ScaledProblem rescale_problem(const BlockProblem& p, const Equilibration& eq) {
    if (static_cast<int>(eq.d.size()) != p.A.rows() ||
        static_cast<int>(eq.e.size()) != p.num_blocks())
        throw std::invalid_argument("rescale_problem: scaling sizes mismatch");
    ScaledProblem sp;
    sp.d = eq.d;
    sp.e = eq.e;
    std::vector<ProxPtr> prox;
    prox.reserve(p.prox.size());
    for (int i = 0; i < p.num_blocks(); ++i) prox.push_back(wrap_scaled(p.prox[i], eq.e[i]));
    DenseVector bs = p.b;
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i] *= eq.d[i];
    sp.problem = BlockProblem::make(std::move(prox), p.A.scaled(eq.d, eq.e), std::move(bs));
    sp.t = choose_t(eq.e);
    return sp;
}

}  // namespace a2dr
