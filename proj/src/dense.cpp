#include "a2dr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace a2dr {

void dense_mul(int rows, int cols, const double* M, const double* x, double* y) {
    std::fill(y, y + rows, 0.0);
    for (int c = 0; c < cols; ++c) {
        double xc = x[c];
        const double* col = M + static_cast<std::size_t>(c) * rows;
        for (int r = 0; r < rows; ++r) y[r] += col[r] * xc;
    }
}

void dense_tmul(int rows, int cols, const double* M, const double* x, double* y) {
    for (int c = 0; c < cols; ++c) {
        const double* col = M + static_cast<std::size_t>(c) * rows;
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += col[r] * x[r];
        y[c] = s;
    }
}

namespace {

// Householder QR least squares on an (n x k) column-major system, n >= k,
// assumed full column rank. Overwrites A and b.
DenseVector qr_solve(int n, int k, DenseVector& A, DenseVector& b) {
    for (int j = 0; j < k; ++j) {
        double* col = A.data() + static_cast<std::size_t>(j) * n;
        double nrm = 0.0;
        for (int i = j; i < n; ++i) nrm = std::hypot(nrm, col[i]);
        if (nrm == 0.0) continue;
        if (col[j] > 0.0) nrm = -nrm;
        for (int i = j; i < n; ++i) col[i] /= nrm;
        col[j] -= 1.0;
        for (int c = j + 1; c < k; ++c) {
            double* rhs = A.data() + static_cast<std::size_t>(c) * n;
            double s = 0.0;
            for (int i = j; i < n; ++i) s += col[i] * rhs[i];
            s /= col[j];
            for (int i = j; i < n; ++i) rhs[i] += s * col[i];
        }
        double s = 0.0;
        for (int i = j; i < n; ++i) s += col[i] * b[i];
        s /= col[j];
        for (int i = j; i < n; ++i) b[i] += s * col[i];
        col[j] = nrm;  // stash R(j,j)
    }
    DenseVector x(k, 0.0);
    for (int j = k - 1; j >= 0; --j) {
        double s = b[j];
        for (int c = j + 1; c < k; ++c) s -= A[static_cast<std::size_t>(c) * n + j] * x[c];
        double rjj = A[static_cast<std::size_t>(j) * n + j];
        x[j] = rjj != 0.0 ? s / rjj : 0.0;
    }
    return x;
}

}  // namespace

DenseVector ridge_lstsq(int n, int k, const double* Y, const double* g, double mu) {
    if (k == 0) return {};
    if (mu < 0.0) throw std::invalid_argument("ridge_lstsq: negative mu");
    if (mu > 0.0) {
        const int rows = n + k;
        DenseVector S(static_cast<std::size_t>(rows) * k, 0.0);
        for (int c = 0; c < k; ++c) {
            std::copy(Y + static_cast<std::size_t>(c) * n, Y + static_cast<std::size_t>(c + 1) * n,
                      S.begin() + static_cast<std::size_t>(c) * rows);
            S[static_cast<std::size_t>(c) * rows + n + c] = std::sqrt(mu);
        }
        DenseVector rhs(rows, 0.0);
        std::copy(g, g + n, rhs.begin());
        return qr_solve(rows, k, S, rhs);
    }
    // mu = 0: minimum-norm via SVD, tolerating rank deficiency
    Svd svd = jacobi_svd(n, k, Y);
    int r = static_cast<int>(svd.s.size());
    double cutoff = (r > 0 ? svd.s[0] : 0.0) * std::max(n, k) * 2.220446049250313e-16;
    DenseVector ug(r);
    dense_tmul(n, r, svd.U.data(), g, ug.data());
    DenseVector coef(r, 0.0);
    for (int i = 0; i < r; ++i)
        if (svd.s[i] > cutoff) coef[i] = ug[i] / svd.s[i];
    DenseVector x(k);
    dense_mul(k, r, svd.V.data(), coef.data(), x.data());
    return x;
}

SymEig jacobi_eigh(int q, const double* M) {
    SymEig out;
    out.values.assign(q, 0.0);
    out.vectors.assign(static_cast<std::size_t>(q) * q, 0.0);
    if (q == 0) return out;
    DenseVector A(M, M + static_cast<std::size_t>(q) * q);
    // enforce symmetry of the working copy
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            double v = 0.5 * (A[static_cast<std::size_t>(j) * q + i] + A[static_cast<std::size_t>(i) * q + j]);
            A[static_cast<std::size_t>(j) * q + i] = v;
            A[static_cast<std::size_t>(i) * q + j] = v;
        }
    DenseVector& V = out.vectors;
    for (int i = 0; i < q; ++i) V[static_cast<std::size_t>(i) * q + i] = 1.0;

    double fro = 0.0;
    for (double v : A) fro += v * v;
    fro = std::sqrt(fro);
    const double tol = 1e-12 * fro;
    auto at = [&](int i, int j) -> double& { return A[static_cast<std::size_t>(j) * q + i]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = i + 1; j < q; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) <= tol) break;
        for (int p = 0; p < q - 1; ++p) {
            for (int r = p + 1; r < q; ++r) {
                double apr = at(p, r);
                if (apr == 0.0) continue;
                double app = at(p, p), arr = at(r, r);
                double tau = (arr - app) / (2.0 * apr);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                for (int i = 0; i < q; ++i) {
                    double aip = at(i, p), air = at(i, r);
                    at(i, p) = c * aip - s * air;
                    at(i, r) = s * aip + c * air;
                }
                for (int i = 0; i < q; ++i) {
                    double api = at(p, i), ari = at(r, i);
                    at(p, i) = c * api - s * ari;
                    at(r, i) = s * api + c * ari;
                }
                for (int i = 0; i < q; ++i) {
                    double vip = V[static_cast<std::size_t>(p) * q + i], vir = V[static_cast<std::size_t>(r) * q + i];
                    V[static_cast<std::size_t>(p) * q + i] = c * vip - s * vir;
                    V[static_cast<std::size_t>(r) * q + i] = s * vip + c * vir;
                }
            }
        }
    }
    std::vector<int> idx(q);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return at(a, a) < at(b, b); });
    DenseVector Vs(V.size());
    for (int i = 0; i < q; ++i) {
        out.values[i] = at(idx[i], idx[i]);
        std::copy(V.begin() + static_cast<std::size_t>(idx[i]) * q,
                  V.begin() + static_cast<std::size_t>(idx[i] + 1) * q,
                  Vs.begin() + static_cast<std::size_t>(i) * q);
    }
    out.vectors = std::move(Vs);
    return out;
}

Svd jacobi_svd(int rows, int cols, const double* M) {
    // Work on the tall orientation; swap U and V back afterwards.
    if (rows < cols) {
        DenseVector T(static_cast<std::size_t>(rows) * cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r)
                T[static_cast<std::size_t>(r) * cols + c] = M[static_cast<std::size_t>(c) * rows + r];
        Svd s = jacobi_svd(cols, rows, T.data());
        std::swap(s.U, s.V);
        return s;
    }
    const int n = rows, k = cols;
    DenseVector U(M, M + static_cast<std::size_t>(n) * k);
    DenseVector V(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) V[static_cast<std::size_t>(i) * k + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < k - 1; ++p) {
            for (int r = p + 1; r < k; ++r) {
                double* up = U.data() + static_cast<std::size_t>(p) * n;
                double* ur = U.data() + static_cast<std::size_t>(r) * n;
                double app = 0.0, arr = 0.0, apr = 0.0;
                for (int i = 0; i < n; ++i) {
                    app += up[i] * up[i];
                    arr += ur[i] * ur[i];
                    apr += up[i] * ur[i];
                }
                if (app == 0.0 || arr == 0.0 || std::fabs(apr) <= 1e-12 * std::sqrt(app * arr)) continue;
                double tau = (arr - app) / (2.0 * apr);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                rotated = true;
                for (int i = 0; i < n; ++i) {
                    double a = up[i], b = ur[i];
                    up[i] = c * a - s * b;
                    ur[i] = s * a + c * b;
                }
                double* vp = V.data() + static_cast<std::size_t>(p) * k;
                double* vr = V.data() + static_cast<std::size_t>(r) * k;
                for (int i = 0; i < k; ++i) {
                    double a = vp[i], b = vr[i];
                    vp[i] = c * a - s * b;
                    vr[i] = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }

    Svd out;
    out.s.assign(k, 0.0);
    out.U.assign(static_cast<std::size_t>(n) * k, 0.0);
    out.V = std::move(V);
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    DenseVector norms(k);
    for (int c = 0; c < k; ++c) {
        double s = 0.0;
        const double* uc = U.data() + static_cast<std::size_t>(c) * n;
        for (int i = 0; i < n; ++i) s += uc[i] * uc[i];
        norms[c] = std::sqrt(s);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return norms[a] > norms[b]; });
    DenseVector Vs(out.V.size());
    for (int c = 0; c < k; ++c) {
        int j = idx[c];
        out.s[c] = norms[j];
        double inv = norms[j] > 0.0 ? 1.0 / norms[j] : 0.0;
        for (int i = 0; i < n; ++i)
            out.U[static_cast<std::size_t>(c) * n + i] = U[static_cast<std::size_t>(j) * n + i] * inv;
        std::copy(out.V.begin() + static_cast<std::size_t>(j) * k,
                  out.V.begin() + static_cast<std::size_t>(j + 1) * k,
                  Vs.begin() + static_cast<std::size_t>(c) * k);
    }
    out.V = std::move(Vs);
    return out;
}

bool cholesky_lower(int n, double* M) {
    for (int j = 0; j < n; ++j) {
        double d = M[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            double l = M[static_cast<std::size_t>(k) * n + j];
            d -= l * l;
        }
        if (d <= 0.0) return false;
        d = std::sqrt(d);
        M[static_cast<std::size_t>(j) * n + j] = d;
        for (int i = j + 1; i < n; ++i) {
            double s = M[static_cast<std::size_t>(j) * n + i];
            for (int k = 0; k < j; ++k)
                s -= M[static_cast<std::size_t>(k) * n + i] * M[static_cast<std::size_t>(k) * n + j];
            M[static_cast<std::size_t>(j) * n + i] = s / d;
        }
        for (int i = 0; i < j; ++i) M[static_cast<std::size_t>(j) * n + i] = 0.0;
    }
    return true;
}

void cholesky_solve(int n, const double* L, double* x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= L[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] = s / L[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= L[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / L[static_cast<std::size_t>(i) * n + i];
    }
}

}  // namespace a2dr
