#include "a2dr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "a2dr/dense.hpp"
#include "a2dr/lsqr.hpp"
#include "a2dr/rng.hpp"

namespace a2dr {

namespace {

constexpr double kHuge = 1e300;  // stands in for an unbounded box side

DenseVector normals(Rng& rng, int n) {
    DenseVector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// Largest singular value of a dense rows x cols matrix, power iteration on
// M'M with a fixed deterministic start.
double dense_norm2_est(int rows, int cols, const double* M, int iters = 200) {
    DenseVector x(cols), y(rows), z(cols);
    for (int i = 0; i < cols; ++i) x[i] = std::cos(i + 1.0);
    double nx = norm2(x);
    for (int i = 0; i < cols; ++i) x[i] /= nx;
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        dense_mul(rows, cols, M, x.data(), y.data());
        dense_tmul(rows, cols, M, y.data(), z.data());
        lam = norm2(z);
        if (lam == 0.0) return 0.0;
        for (int i = 0; i < cols; ++i) x[i] = z[i] / lam;
    }
    return std::sqrt(lam);
}

// C = A B with A rows x inner, B inner x cols, all column-major.
void dense_mm(int rows, int inner, int cols, const double* A, const double* B, double* C) {
    std::fill(C, C + static_cast<size_t>(rows) * cols, 0.0);
    for (int j = 0; j < cols; ++j)
        for (int k = 0; k < inner; ++k) {
            double bkj = B[j * inner + k];
            if (bkj == 0.0) continue;
            const double* a = A + static_cast<size_t>(k) * rows;
            double* c = C + static_cast<size_t>(j) * rows;
            for (int i = 0; i < rows; ++i) c[i] += a[i] * bkj;
        }
}

// Spectral radius by normalized repeated squaring:
// rho = lim ||M^(2^k)||_F^(1/2^k).
double spectral_radius_est(int q, DenseVector M) {
    auto fro = [&](const DenseVector& B) {
        double s = 0.0;
        for (double v : B) s += v * v;
        return std::sqrt(s);
    };
    double f0 = fro(M);
    if (f0 == 0.0) return 0.0;
    for (double& v : M) v /= f0;
    double logscale = std::log(f0);
    DenseVector tmp(static_cast<size_t>(q) * q);
    double pow2 = 1.0;
    for (int k = 0; k < 40; ++k) {
        dense_mm(q, q, q, M.data(), M.data(), tmp.data());
        double f = fro(tmp);
        if (f == 0.0) return 0.0;
        for (size_t i = 0; i < tmp.size(); ++i) M[i] = tmp[i] / f;
        logscale = 2.0 * logscale + std::log(f);
        pow2 *= 2.0;
    }
    return std::exp(logscale / pow2);
}

int geti(const nlohmann::json& sizes, const char* key, int fallback) {
    auto it = sizes.find(key);
    if (it == sizes.end()) return fallback;
    return it->get<int>();
}

double getd(const nlohmann::json& sizes, const char* key, double fallback) {
    auto it = sizes.find(key);
    if (it == sizes.end()) return fallback;
    return it->get<double>();
}

// A = [I -I] with two n-wide blocks, for consensus pairs.
SparseMatrix consensus_pair(int n) {
    std::vector<Triplet> t;
    t.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 1.0});
        t.push_back({i, n + i, -1.0});
    }
    return SparseMatrix(n, 2 * n, std::move(t), {0, n, 2 * n});
}

// ---- generators ----

GeneratedProblem gen_nnls(int p, int q, double density, std::uint64_t seed) {
    if (p < 1 || q < 1 || density <= 0.0 || density > 1.0)
        throw std::invalid_argument("nnls: bad sizes");
    Rng rf(seed, "nnls.F");
    std::vector<Triplet> ft;
    DenseVector Fd(static_cast<size_t>(p) * q, 0.0);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < p; ++i)
            if (rf.uniform() < density) {
                double val = rf.normal();
                ft.push_back({i, j, val});
                Fd[static_cast<size_t>(j) * p + i] = val;
            }
    SparseMatrix F(p, q, std::move(ft));
    Rng rg(seed, "nnls.g");
    DenseVector g = normals(rg, p);

    GeneratedProblem gp;
    gp.family = "nnls";
    std::vector<ProxPtr> prox{make_sum_squares_affine(F, g), make_nonneg(q)};
    gp.problem = BlockProblem::make(std::move(prox), consensus_pair(q), DenseVector(q, 0.0));
    gp.meta = {{"family", "nnls"},
               {"seed", seed},
               {"sizes", {{"p", p}, {"q", q}, {"density", density}}}};
    gp.data["F"] = std::move(Fd);
    gp.data["g"] = std::move(g);
    gp.dims["p"] = p;
    gp.dims["q"] = q;
    return gp;
}

GeneratedProblem gen_sparse_inv_cov(int q, int p, std::uint64_t seed) {
    if (q < 2 || p < 1) throw std::invalid_argument("sparse_inv_cov: bad sizes");
    Rng rs(seed, "spcov.precision");
    DenseVector S0(static_cast<size_t>(q) * q, 0.0);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < j; ++i)
            if (rs.uniform() < 0.1) {
                double val = rs.normal();
                S0[static_cast<size_t>(j) * q + i] = val;
                S0[static_cast<size_t>(i) * q + j] = val;
            }
    SymEig eig = jacobi_eigh(q, S0.data());
    double shift = 0.5 + std::max(0.0, -eig.values[0]);
    // Sigma = inverse of the shifted precision matrix, from the same basis.
    DenseVector Sig(static_cast<size_t>(q) * q, 0.0);
    for (int k = 0; k < q; ++k) {
        double w = 1.0 / (eig.values[k] + shift);
        const double* vk = eig.vectors.data() + static_cast<size_t>(k) * q;
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < q; ++i) Sig[static_cast<size_t>(j) * q + i] += w * vk[i] * vk[j];
    }
    DenseVector L = Sig;
    if (!cholesky_lower(q, L.data()))
        throw std::runtime_error("sparse_inv_cov: covariance factorization failed");
    Rng rz(seed, "spcov.samples");
    DenseVector Q(static_cast<size_t>(q) * q, 0.0), z(q);
    for (int l = 0; l < p; ++l) {
        DenseVector xi = normals(rz, q);
        for (int i = 0; i < q; ++i) {
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += L[static_cast<size_t>(j) * q + i] * xi[j];
            z[i] = s;
        }
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < q; ++i) Q[static_cast<size_t>(j) * q + i] += z[i] * z[j] / p;
    }
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < j; ++i) {
            double avg = 0.5 * (Q[static_cast<size_t>(j) * q + i] + Q[static_cast<size_t>(i) * q + j]);
            Q[static_cast<size_t>(j) * q + i] = Q[static_cast<size_t>(i) * q + j] = avg;
        }
    double alpha_max = 0.0;
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i)
            if (i != j) alpha_max = std::max(alpha_max, std::fabs(Q[static_cast<size_t>(j) * q + i]));
    double alpha = 0.001 * alpha_max;

    GeneratedProblem gp;
    gp.family = "sparse_inv_cov";
    int n = q * q;
    std::vector<ProxPtr> prox{make_neg_log_det_trace(q, Q), make_soft_threshold(n, alpha)};
    gp.problem = BlockProblem::make(std::move(prox), consensus_pair(n), DenseVector(n, 0.0));
    gp.meta = {{"family", "sparse_inv_cov"},
               {"seed", seed},
               {"sizes", {{"q", q}, {"p", p}}},
               {"alpha", alpha},
               {"alpha_max", alpha_max}};
    gp.data["Q"] = std::move(Q);
    gp.dims["q"] = q;
    gp.dims["p"] = p;
    return gp;
}

GeneratedProblem gen_l1_trend(int q, std::uint64_t seed) {
    if (q < 3) throw std::invalid_argument("l1_trend: q must be at least 3");
    Rng ry(seed, "l1trend.y");
    DenseVector y = normals(ry, q);
    double alpha_max = norm_inf(y);
    double alpha = 0.01 * alpha_max;

    // f1 = (1/2)||x - y||^2 written as ||F x - g||^2 with F = I/sqrt(2).
    double c = 1.0 / std::sqrt(2.0);
    std::vector<Triplet> ft;
    ft.reserve(q);
    for (int i = 0; i < q; ++i) ft.push_back({i, i, c});
    DenseVector g(q);
    for (int i = 0; i < q; ++i) g[i] = c * y[i];

    std::vector<Triplet> at;
    at.reserve(4 * (q - 2));
    for (int i = 0; i < q - 2; ++i) {
        at.push_back({i, i, 1.0});
        at.push_back({i, i + 1, -2.0});
        at.push_back({i, i + 2, 1.0});
        at.push_back({i, q + i, -1.0});
    }
    SparseMatrix A(q - 2, 2 * q - 2, std::move(at), {0, q, 2 * q - 2});

    GeneratedProblem gp;
    gp.family = "l1_trend";
    std::vector<ProxPtr> prox{make_sum_squares_affine(SparseMatrix(q, q, std::move(ft)), std::move(g)),
                              make_soft_threshold(q - 2, alpha)};
    gp.problem = BlockProblem::make(std::move(prox), std::move(A), DenseVector(q - 2, 0.0));
    gp.meta = {{"family", "l1_trend"},
               {"seed", seed},
               {"sizes", {{"q", q}}},
               {"alpha", alpha},
               {"alpha_max", alpha_max}};
    gp.data["y"] = std::move(y);
    gp.dims["q"] = q;
    return gp;
}

GeneratedProblem gen_commodity_flow(int p, int q, std::uint64_t seed) {
    if (p < 6 || q < p + 1) throw std::invalid_argument("commodity_flow: need p >= 6 and q >= p+1");
    Rng rb(seed, "flow.arcs");
    std::vector<Triplet> bt;
    DenseVector Bd(static_cast<size_t>(p) * q, 0.0);
    int qt = q - p + 1;
    for (int j = 0; j < qt; ++j) {
        int i = static_cast<int>(rb.integer(p));
        int i2 = static_cast<int>(rb.integer(p - 1));
        if (i2 >= i) ++i2;
        bt.push_back({i, j, 1.0});
        bt.push_back({i2, j, -1.0});
        Bd[static_cast<size_t>(j) * p + i] = 1.0;
        Bd[static_cast<size_t>(j) * p + i2] = -1.0;
    }
    for (int k = 0; k < p - 1; ++k) {
        int j = qt + k;
        bt.push_back({k, j, 1.0});
        bt.push_back({k + 1, j, -1.0});
        Bd[static_cast<size_t>(j) * p + k] = 1.0;
        Bd[static_cast<size_t>(j) * p + k + 1] = -1.0;
    }
    SparseMatrix B(p, q, bt);

    Rng rs(seed, "flow.sources");
    DenseVector sb = normals(rs, p);
    int n_tr = p / 3, n2 = 2 * p / 3, m5 = 5 * p / 6;
    int n_sink = n2 - n_tr, n_src = p - n2;
    DenseVector st(p, 0.0);
    double total = 0.0;
    for (int i = n_tr; i < n2; ++i) {
        st[i] = -std::fabs(sb[i]);
        total += std::fabs(sb[i]);
    }
    for (int i = n2; i < p; ++i) st[i] = total / n_src;
    DenseVector s_max(n_src);
    for (int i = n2; i < p; ++i) {
        double v = st[i] + 0.001;
        s_max[i - n2] = i < m5 ? v : 2.0 * v;
    }
    DenseVector neg_st(p);
    for (int i = 0; i < p; ++i) neg_st[i] = -st[i];
    LsqrResult ls = lsqr_solve(B, neg_st, nullptr, 1e-13, 40 * (p + q));
    DenseVector z_max(q);
    for (int j = 0; j < q; ++j) {
        double v = std::fabs(ls.x[j]) + 0.001;
        z_max[j] = j < q / 2 ? v : 2.0 * v;
    }
    Rng rc(seed, "flow.c");
    DenseVector c(q);
    for (int j = 0; j < q; ++j) c[j] = rc.uniform();
    Rng rd(seed, "flow.d");
    DenseVector d(p);
    for (int i = 0; i < p; ++i) d[i] = rd.uniform();
    DenseVector d_src(d.begin() + n2, d.end());
    DenseVector L_sink(st.begin() + n_tr, st.begin() + n2);

    DenseVector z_lo(q), z_hi(q);
    for (int j = 0; j < q; ++j) {
        z_lo[j] = -z_max[j];
        z_hi[j] = z_max[j];
    }
    std::vector<ProxPtr> prox{make_quad_box(c, z_lo, z_hi), make_affine_indicator(DenseVector(n_tr, 0.0)),
                              make_affine_indicator(L_sink), make_quad_box(d_src, DenseVector(n_src, 0.0), s_max)};
    std::vector<Triplet> at = bt;
    for (int i = 0; i < p; ++i) at.push_back({i, q + i, 1.0});
    SparseMatrix A(p, q + p, std::move(at), {0, q, q + n_tr, q + n2, q + p});

    GeneratedProblem gp;
    gp.family = "commodity_flow";
    gp.problem = BlockProblem::make(std::move(prox), std::move(A), DenseVector(p, 0.0));
    gp.meta = {{"family", "commodity_flow"}, {"seed", seed}, {"sizes", {{"p", p}, {"q", q}}}};
    gp.data["B"] = std::move(Bd);
    gp.data["c"] = std::move(c);
    gp.data["d_src"] = std::move(d_src);
    gp.data["L_sink"] = std::move(L_sink);
    gp.data["z_max"] = std::move(z_max);
    gp.data["s_max"] = std::move(s_max);
    gp.data["s_tilde"] = std::move(st);
    gp.dims["p"] = p;
    gp.dims["q"] = q;
    gp.dims["n_tr"] = n_tr;
    gp.dims["n_sink"] = n_sink;
    gp.dims["n_src"] = n_src;
    return gp;
}

GeneratedProblem gen_optimal_control(int p, int q, int L, std::uint64_t seed) {
    if (p < 1 || q < 1 || L < 2) throw std::invalid_argument("optimal_control: bad sizes");
    Rng rf(seed, "oc.F");
    DenseVector F = normals(rf, q * q);
    double rho = spectral_radius_est(q, F);
    if (rho > 0.0)
        for (double& v : F) v /= rho;
    Rng rg(seed, "oc.G");
    DenseVector G = normals(rg, q * p);
    Rng rz(seed, "oc.z_init");
    DenseVector z_init = normals(rz, q);

    Rng ru(seed, "oc.controls");
    DenseVector u_feas(static_cast<size_t>(L) * p);
    for (int l = 0; l < L; ++l) {
        DenseVector uh = normals(ru, p);
        double s = norm_inf(uh);
        for (int i = 0; i < p; ++i) u_feas[static_cast<size_t>(l) * p + i] = uh[i] / s;
    }
    DenseVector z_feas(static_cast<size_t>(L) * q);
    std::copy(z_init.begin(), z_init.end(), z_feas.begin());
    DenseVector tmp(q);
    for (int l = 0; l + 1 < L; ++l) {
        const double* zl = z_feas.data() + static_cast<size_t>(l) * q;
        const double* ul = u_feas.data() + static_cast<size_t>(l) * p;
        dense_mul(q, q, F.data(), zl, tmp.data());
        double* zn = z_feas.data() + static_cast<size_t>(l + 1) * q;
        dense_mul(q, p, G.data(), ul, zn);
        for (int i = 0; i < q; ++i) zn[i] += tmp[i];
    }
    DenseVector z_term(z_feas.end() - q, z_feas.end());

    std::vector<Triplet> at;
    for (int i = 0; i < q; ++i) at.push_back({i, i, 1.0});
    for (int r = 1; r < L; ++r) {
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < q; ++i) {
                double v = F[static_cast<size_t>(j) * q + i];
                if (v != 0.0) at.push_back({r * q + i, (r - 1) * q + j, -v});
            }
        for (int i = 0; i < q; ++i) at.push_back({r * q + i, r * q + i, 1.0});
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < q; ++i) {
                double v = G[static_cast<size_t>(j) * q + i];
                if (v != 0.0) at.push_back({r * q + i, L * q + (r - 1) * p + j, -v});
            }
    }
    for (int i = 0; i < q; ++i) at.push_back({L * q + i, (L - 1) * q + i, 1.0});
    SparseMatrix A((L + 1) * q, L * q + L * p, std::move(at), {0, L * q, L * q + L * p});
    DenseVector b(static_cast<size_t>(L + 1) * q, 0.0);
    std::copy(z_init.begin(), z_init.end(), b.begin());
    std::copy(z_term.begin(), z_term.end(), b.end() - q);

    GeneratedProblem gp;
    gp.family = "optimal_control";
    std::vector<ProxPtr> prox{
        make_quad_box(DenseVector(L * q, 1.0), DenseVector(L * q, -kHuge), DenseVector(L * q, kHuge)),
        make_quad_box(DenseVector(L * p, 1.0), DenseVector(L * p, -1.0), DenseVector(L * p, 1.0))};
    gp.problem = BlockProblem::make(std::move(prox), std::move(A), std::move(b));
    gp.meta = {{"family", "optimal_control"},
               {"seed", seed},
               {"sizes", {{"p", p}, {"q", q}, {"L", L}}}};
    gp.data["F"] = std::move(F);
    gp.data["G"] = std::move(G);
    gp.data["z_init"] = std::move(z_init);
    gp.data["z_term"] = std::move(z_term);
    gp.data["z_feas"] = std::move(z_feas);
    gp.data["u_feas"] = std::move(u_feas);
    gp.dims["p"] = p;
    gp.dims["q"] = q;
    gp.dims["L"] = L;
    return gp;
}

GeneratedProblem gen_coupled_qp(int L, int s, int ql, int pl, std::uint64_t seed) {
    if (L < 1 || s < 1 || ql < 1 || pl < 1) throw std::invalid_argument("coupled_qp: bad sizes");
    Rng rc(seed, "qp.c"), rF(seed, "qp.F"), rG(seed, "qp.G"), rz(seed, "qp.z"), rH(seed, "qp.H");
    GeneratedProblem gp;
    gp.family = "coupled_qp";
    DenseVector Qa, ca, Fa, da, Ga, za, h(s, 0.0);
    std::vector<ProxPtr> prox;
    std::vector<Triplet> at;
    std::vector<int> offsets{0};
    for (int l = 0; l < L; ++l) {
        DenseVector c = normals(rc, ql);
        DenseVector F = normals(rF, pl * ql);
        DenseVector G = normals(rG, s * ql);
        DenseVector zt = normals(rz, ql);
        DenseVector H = normals(rH, ql * ql);
        DenseVector Q(static_cast<size_t>(ql) * ql, 0.0);
        for (int j = 0; j < ql; ++j)
            for (int i = 0; i <= j; ++i) {
                double v = 0.0;
                for (int k = 0; k < ql; ++k)
                    v += H[static_cast<size_t>(i) * ql + k] * H[static_cast<size_t>(j) * ql + k];
                Q[static_cast<size_t>(j) * ql + i] = Q[static_cast<size_t>(i) * ql + j] = v;
            }
        DenseVector d(pl);
        dense_mul(pl, ql, F.data(), zt.data(), d.data());
        for (int i = 0; i < pl; ++i) d[i] += 0.1;
        DenseVector Gz(s);
        dense_mul(s, ql, G.data(), zt.data(), Gz.data());
        for (int i = 0; i < s; ++i) h[i] += Gz[i];
        for (int j = 0; j < ql; ++j)
            for (int i = 0; i < s; ++i) at.push_back({i, l * ql + j, G[static_cast<size_t>(j) * s + i]});
        prox.push_back(make_quad_form_polyhedron(ql, Q, c, pl, F, d));
        offsets.push_back(offsets.back() + ql);
        Qa.insert(Qa.end(), Q.begin(), Q.end());
        ca.insert(ca.end(), c.begin(), c.end());
        Fa.insert(Fa.end(), F.begin(), F.end());
        da.insert(da.end(), d.begin(), d.end());
        Ga.insert(Ga.end(), G.begin(), G.end());
        za.insert(za.end(), zt.begin(), zt.end());
    }
    SparseMatrix A(s, L * ql, std::move(at), std::move(offsets));
    gp.problem = BlockProblem::make(std::move(prox), std::move(A), h);
    gp.meta = {{"family", "coupled_qp"},
               {"seed", seed},
               {"sizes", {{"L", L}, {"s", s}, {"q", ql}, {"p", pl}}}};
    gp.data["Q"] = std::move(Qa);
    gp.data["c"] = std::move(ca);
    gp.data["F"] = std::move(Fa);
    gp.data["d"] = std::move(da);
    gp.data["G"] = std::move(Ga);
    gp.data["z_tilde"] = std::move(za);
    gp.data["h"] = std::move(h);
    gp.dims["L"] = L;
    gp.dims["s"] = s;
    gp.dims["q"] = ql;
    gp.dims["p"] = pl;
    return gp;
}

GeneratedProblem gen_multitask_logistic(int p, int s, int L, double alpha, double beta,
                                        std::uint64_t seed) {
    if (p < 1 || s < 1 || L < 1 || alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("multitask_logistic: bad sizes");
    Rng rw(seed, "mt.W");
    DenseVector W = normals(rw, p * s);
    Rng rt(seed, "mt.theta");
    DenseVector Th = normals(rt, s * L);
    DenseVector Y(static_cast<size_t>(p) * L);
    DenseVector col(p);
    for (int l = 0; l < L; ++l) {
        dense_mul(p, s, W.data(), Th.data() + static_cast<size_t>(l) * s, col.data());
        for (int i = 0; i < p; ++i) Y[static_cast<size_t>(l) * p + i] = col[i] > 0.0 ? 1.0 : -1.0;
    }
    int pL = p * L, sL = s * L;
    std::vector<Triplet> at;
    for (int r = 0; r < pL; ++r) at.push_back({r, r, 1.0});
    for (int l = 0; l < L; ++l)
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < p; ++i)
                at.push_back({l * p + i, pL + l * s + j, -W[static_cast<size_t>(j) * p + i]});
    for (int r = 0; r < sL; ++r) {
        at.push_back({pL + r, pL + r, 1.0});
        at.push_back({pL + r, pL + sL + r, -1.0});
    }
    SparseMatrix A(pL + sL, pL + 2 * sL, std::move(at), {0, pL, pL + sL, pL + 2 * sL});

    GeneratedProblem gp;
    gp.family = "multitask_logistic";
    std::vector<ProxPtr> prox{make_logistic(Y), make_group_lasso(alpha, std::vector<int>(L, s)),
                              make_nuclear_norm(s, L, beta)};
    gp.problem = BlockProblem::make(std::move(prox), std::move(A), DenseVector(pL + sL, 0.0));
    gp.meta = {{"family", "multitask_logistic"},
               {"seed", seed},
               {"sizes", {{"p", p}, {"s", s}, {"L", L}}},
               {"alpha", alpha},
               {"beta", beta}};
    gp.data["W"] = std::move(W);
    gp.data["Y"] = std::move(Y);
    gp.dims["p"] = p;
    gp.dims["s"] = s;
    gp.dims["L"] = L;
    return gp;
}

}  // namespace

const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names{"nnls",         "sparse_inv_cov",
                                                "l1_trend",     "commodity_flow",
                                                "optimal_control", "coupled_qp",
                                                "multitask_logistic"};
    return names;
}

nlohmann::json desk_sizes(const std::string& family) {
    if (family == "nnls") return {{"p", 300}, {"q", 500}, {"density", 0.001}};
    if (family == "sparse_inv_cov") return {{"q", 30}, {"p", 300}};
    if (family == "l1_trend") return {{"q", 300}};
    if (family == "commodity_flow") return {{"p", 60}, {"q", 100}};
    if (family == "optimal_control") return {{"p", 8}, {"q", 15}, {"L", 6}};
    if (family == "coupled_qp") return {{"L", 4}, {"s", 10}, {"q", 20}, {"p", 10}};
    if (family == "multitask_logistic")
        return {{"p", 30}, {"s", 50}, {"L", 3}, {"alpha", 0.1}, {"beta", 0.1}};
    throw std::invalid_argument("unknown family \"" + family + "\"");
}

nlohmann::json paper_sizes(const std::string& family) {
    if (family == "nnls") return {{"p", 10000}, {"q", 8000}, {"density", 0.001}};
    if (family == "sparse_inv_cov") return {{"q", 100}, {"p", 1000}};
    if (family == "l1_trend") return {{"q", 1000000}};
    if (family == "commodity_flow") return {{"p", 4000}, {"q", 7000}};
    if (family == "optimal_control") return {{"p", 80}, {"q", 150}, {"L", 20}};
    if (family == "coupled_qp") return {{"L", 8}, {"s", 50}, {"q", 300}, {"p", 200}};
    if (family == "multitask_logistic")
        return {{"p", 300}, {"s", 500}, {"L", 10}, {"alpha", 0.1}, {"beta", 0.1}};
    throw std::invalid_argument("unknown family \"" + family + "\"");
}

GeneratedProblem gen_problem(const std::string& family, nlohmann::json sizes, std::uint64_t seed) {
    nlohmann::json dflt = desk_sizes(family);
    auto di = [&](const char* key) { return dflt[key].get<int>(); };
    auto dd = [&](const char* key) { return dflt[key].get<double>(); };
    if (family == "nnls")
        return gen_nnls(geti(sizes, "p", di("p")), geti(sizes, "q", di("q")),
                        getd(sizes, "density", dd("density")), seed);
    if (family == "sparse_inv_cov")
        return gen_sparse_inv_cov(geti(sizes, "q", di("q")), geti(sizes, "p", di("p")), seed);
    if (family == "l1_trend") return gen_l1_trend(geti(sizes, "q", di("q")), seed);
    if (family == "commodity_flow")
        return gen_commodity_flow(geti(sizes, "p", di("p")), geti(sizes, "q", di("q")), seed);
    if (family == "optimal_control")
        return gen_optimal_control(geti(sizes, "p", di("p")), geti(sizes, "q", di("q")),
                                   geti(sizes, "L", di("L")), seed);
    if (family == "coupled_qp")
        return gen_coupled_qp(geti(sizes, "L", di("L")), geti(sizes, "s", di("s")),
                              geti(sizes, "q", di("q")), geti(sizes, "p", di("p")), seed);
    if (family == "multitask_logistic")
        return gen_multitask_logistic(geti(sizes, "p", di("p")), geti(sizes, "s", di("s")),
                                      geti(sizes, "L", di("L")), getd(sizes, "alpha", dd("alpha")),
                                      getd(sizes, "beta", dd("beta")), seed);
    throw std::invalid_argument("unknown family \"" + family + "\"");
}

// ---- reference solvers ----

namespace {

double clip1(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Accelerated projected gradient for
//   minimize x'Px + q'x + (rho/2)||E x - r||^2   over  lo <= x <= hi.
// P may be empty (zero). lam_p and lam_e2 bound ||P||_2 and ||E||_2^2.
struct ApgResult {
    DenseVector x;
    double pg_inf = 0.0;
    int iters = 0;
};

ApgResult apg_box(int n, int m, const DenseVector& P, const DenseVector& q, double rho,
                  const DenseVector& E, const DenseVector& r, const DenseVector& lo,
                  const DenseVector& hi, DenseVector x, double lam_p, double lam_e2, double tol,
                  int cap) {
    double L = 2.0 * lam_p + rho * lam_e2 + 1e-30;
    DenseVector res(m), grad(n), tmp(n);
    auto gradient = [&](const DenseVector& at) {
        if (!P.empty()) {
            dense_mul(n, n, P.data(), at.data(), grad.data());
            for (int i = 0; i < n; ++i) grad[i] = 2.0 * grad[i] + q[i];
        } else {
            for (int i = 0; i < n; ++i) grad[i] = q[i];
        }
        if (m > 0) {
            dense_mul(m, n, E.data(), at.data(), res.data());
            for (int i = 0; i < m; ++i) res[i] -= r[i];
            dense_tmul(m, n, E.data(), res.data(), tmp.data());
            for (int i = 0; i < n; ++i) grad[i] += rho * tmp[i];
        }
    };
    auto value = [&](const DenseVector& at) {
        double f = 0.0;
        if (!P.empty()) {
            dense_mul(n, n, P.data(), at.data(), tmp.data());
            f += dot(at, tmp);
        }
        f += dot(q, at);
        if (m > 0) {
            dense_mul(m, n, E.data(), at.data(), res.data());
            for (int i = 0; i < m; ++i) {
                double d = res[i] - r[i];
                f += 0.5 * rho * d * d;
            }
        }
        return f;
    };

    for (int i = 0; i < n; ++i) x[i] = clip1(x[i], lo[i], hi[i]);
    DenseVector y = x, xn(n);
    double tk = 1.0, fx = value(x);
    ApgResult out;
    for (int it = 1; it <= cap; ++it) {
        gradient(y);
        for (int i = 0; i < n; ++i) xn[i] = clip1(y[i] - grad[i] / L, lo[i], hi[i]);
        double fn = value(xn);
        if (fn > fx) {  // momentum restart
            gradient(x);
            for (int i = 0; i < n; ++i) xn[i] = clip1(x[i] - grad[i] / L, lo[i], hi[i]);
            fn = value(xn);
            tk = 1.0;
        }
        double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        for (int i = 0; i < n; ++i) y[i] = xn[i] + (tk - 1.0) / tn * (xn[i] - x[i]);
        x.swap(xn);
        fx = fn;
        tk = tn;
        out.iters = it;
        if (it % 10 == 0 || it == cap) {
            gradient(x);
            double pg = 0.0;
            for (int i = 0; i < n; ++i)
                pg = std::max(pg, std::fabs(x[i] - clip1(x[i] - grad[i] / L, lo[i], hi[i])));
            out.pg_inf = pg;
            if (pg <= tol) break;
        }
    }
    out.x = std::move(x);
    return out;
}

// Augmented Lagrangian for  minimize x'Px + q'x  s.t.  E x = h, lo <= x <= hi.
struct AlResult {
    DenseVector x;
    double feas_inf = 0.0;
    int iters = 0;
};

AlResult al_box_qp(int n, int m, const DenseVector& P, const DenseVector& q, const DenseVector& E,
                   const DenseVector& h, const DenseVector& lo, const DenseVector& hi) {
    double lam_p = P.empty() ? 0.0 : 1.02 * dense_norm2_est(n, n, P.data());
    double se = dense_norm2_est(m, n, E.data());
    double lam_e2 = 1.02 * se * se;
    DenseVector lam(m, 0.0), x(n, 0.0), res(m), qeff(n);
    double rho = 1.0, feas_prev = std::numeric_limits<double>::infinity();
    double hscale = 1.0 + norm_inf(h);
    AlResult out;
    for (int outer = 0; outer < 80; ++outer) {
        dense_tmul(m, n, E.data(), lam.data(), qeff.data());
        for (int i = 0; i < n; ++i) qeff[i] += q[i];
        double tol_in = std::max(1e-13 * (1.0 + norm_inf(qeff)), 1e-14);
        ApgResult inner =
            apg_box(n, m, P, qeff, rho, E, h, lo, hi, std::move(x), lam_p, lam_e2, tol_in, 8000);
        x = std::move(inner.x);
        out.iters += inner.iters;
        dense_mul(m, n, E.data(), x.data(), res.data());
        for (int i = 0; i < m; ++i) res[i] -= h[i];
        double feas = norm_inf(res);
        out.feas_inf = feas;
        for (int i = 0; i < m; ++i) lam[i] += rho * res[i];
        if (feas <= 1e-10 * hscale && inner.pg_inf <= 10.0 * tol_in) break;
        if (feas > 0.25 * feas_prev) rho = std::min(rho * 5.0, 1e9);
        feas_prev = feas;
    }
    out.x = std::move(x);
    return out;
}

double softplus(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::fabs(m))); }

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    double e = std::exp(u);
    return e / (1.0 + e);
}

OracleSolution oracle_nnls(const GeneratedProblem& gp) {
    int p = gp.dims.at("p"), q = gp.dims.at("q");
    const DenseVector& F = gp.data.at("F");
    const DenseVector& g = gp.data.at("g");
    double sF = dense_norm2_est(p, q, F.data());
    double L = 2.0 * sF * sF * 1.02 + 1e-30;
    DenseVector z(q, 0.0), y = z, zn(q), r(p), grad(q);
    auto value = [&](const DenseVector& at) {
        dense_mul(p, q, F.data(), at.data(), r.data());
        double f = 0.0;
        for (int i = 0; i < p; ++i) {
            double d = r[i] - g[i];
            f += d * d;
        }
        return f;
    };
    auto gradient = [&](const DenseVector& at) {
        dense_mul(p, q, F.data(), at.data(), r.data());
        for (int i = 0; i < p; ++i) r[i] -= g[i];
        dense_tmul(p, q, F.data(), r.data(), grad.data());
        for (int i = 0; i < q; ++i) grad[i] *= 2.0;
    };
    double tk = 1.0, fz = value(z);
    OracleSolution out;
    for (int it = 1; it <= 200000; ++it) {
        gradient(y);
        for (int i = 0; i < q; ++i) zn[i] = std::max(0.0, y[i] - grad[i] / L);
        double fn = value(zn);
        if (fn > fz) {
            gradient(z);
            for (int i = 0; i < q; ++i) zn[i] = std::max(0.0, z[i] - grad[i] / L);
            fn = value(zn);
            tk = 1.0;
        }
        double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        for (int i = 0; i < q; ++i) y[i] = zn[i] + (tk - 1.0) / tn * (zn[i] - z[i]);
        z.swap(zn);
        fz = fn;
        tk = tn;
        out.iters = it;
        if (it % 20 == 0) {
            gradient(z);
            double pg = 0.0;
            for (int i = 0; i < q; ++i)
                pg = std::max(pg, std::fabs(z[i] - std::max(0.0, z[i] - grad[i] / L)));
            out.gap = pg;
            if (pg <= 1e-12 * (1.0 + norm_inf(z))) break;
        }
    }
    out.objective = value(z);
    out.x = z;
    out.x.insert(out.x.end(), z.begin(), z.end());
    return out;
}

OracleSolution oracle_sparse_inv_cov(const GeneratedProblem& gp) {
    int q = gp.dims.at("q");
    const DenseVector& Q = gp.data.at("Q");
    double alpha = gp.meta.at("alpha").get<double>();
    size_t nn = static_cast<size_t>(q) * q;

    // chol-based log det and inverse
    DenseVector L(nn), Sinv(nn), e(q);
    auto factor = [&](const DenseVector& S, double* logdet) {
        L = S;
        if (!cholesky_lower(q, L.data())) return false;
        if (logdet) {
            double ld = 0.0;
            for (int i = 0; i < q; ++i) ld += std::log(L[static_cast<size_t>(i) * q + i]);
            *logdet = 2.0 * ld;
        }
        return true;
    };
    auto inverse = [&]() {
        for (int j = 0; j < q; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            cholesky_solve(q, L.data(), e.data());
            for (int i = 0; i < q; ++i) Sinv[static_cast<size_t>(j) * q + i] = e[i];
        }
    };
    auto smooth = [&](const DenseVector& S, double logdet) {
        double tr = 0.0;
        for (size_t i = 0; i < nn; ++i) tr += S[i] * Q[i];
        return -logdet + tr;
    };

    DenseVector S(nn, 0.0);
    for (int i = 0; i < q; ++i)
        S[static_cast<size_t>(i) * q + i] = 1.0 / (Q[static_cast<size_t>(i) * q + i] + alpha);
    double logdet = 0.0;
    factor(S, &logdet);
    double tau = 1.0;
    DenseVector Sn(nn), grad(nn);
    OracleSolution out;
    for (int it = 1; it <= 100000; ++it) {
        inverse();
        for (size_t i = 0; i < nn; ++i) grad[i] = Q[i] - Sinv[i];
        double g0 = smooth(S, logdet);
        double logdet_n = 0.0;
        tau = std::min(tau * 2.0, 1e8);
        bool ok = false;
        while (tau > 1e-18) {
            for (size_t i = 0; i < nn; ++i) {
                double w = S[i] - tau * grad[i];
                Sn[i] = std::fabs(w) <= tau * alpha ? 0.0 : (w > 0 ? w - tau * alpha : w + tau * alpha);
            }
            if (factor(Sn, &logdet_n)) {
                double lin = 0.0, sq = 0.0;
                for (size_t i = 0; i < nn; ++i) {
                    double d = Sn[i] - S[i];
                    lin += grad[i] * d;
                    sq += d * d;
                }
                if (smooth(Sn, logdet_n) <= g0 + lin + sq / (2.0 * tau)) {
                    ok = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if (!ok) break;
        double step = 0.0, base = 0.0;
        for (size_t i = 0; i < nn; ++i) {
            double d = Sn[i] - S[i];
            step += d * d;
            base += S[i] * S[i];
        }
        S.swap(Sn);
        logdet = logdet_n;
        out.iters = it;
        out.gap = std::sqrt(step);
        if (step <= 1e-26 * (1.0 + base)) break;
    }
    double l1 = 0.0;
    for (size_t i = 0; i < nn; ++i) l1 += std::fabs(S[i]);
    out.objective = smooth(S, logdet) + alpha * l1;
    out.x = S;
    out.x.insert(out.x.end(), S.begin(), S.end());
    return out;
}

void second_diff(const DenseVector& z, DenseVector& out) {
    int q = static_cast<int>(z.size());
    out.resize(q - 2);
    for (int i = 0; i < q - 2; ++i) out[i] = z[i] - 2.0 * z[i + 1] + z[i + 2];
}

void second_diff_t(const DenseVector& nu, int q, DenseVector& out) {
    out.assign(q, 0.0);
    for (int i = 0; i < q - 2; ++i) {
        out[i] += nu[i];
        out[i + 1] -= 2.0 * nu[i];
        out[i + 2] += nu[i];
    }
}

OracleSolution oracle_l1_trend(const GeneratedProblem& gp) {
    int q = gp.dims.at("q");
    const DenseVector& y = gp.data.at("y");
    double alpha = gp.meta.at("alpha").get<double>();
    int md = q - 2;
    DenseVector Dy;
    second_diff(y, Dy);
    const double L = 16.0;  // ||D||_2 <= 4 for the second-difference stencil

    DenseVector nu(md, 0.0), w = nu, nun(md), Dtv(q), grad(md), z(q);
    double tk = 1.0;
    OracleSolution out;
    double primal = 0.0;
    for (int it = 1; it <= 500000; ++it) {
        second_diff_t(w, q, Dtv);
        second_diff(Dtv, grad);
        for (int i = 0; i < md; ++i) grad[i] -= Dy[i];
        for (int i = 0; i < md; ++i) nun[i] = clip1(w[i] - grad[i] / L, -alpha, alpha);
        double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        for (int i = 0; i < md; ++i) w[i] = nun[i] + (tk - 1.0) / tn * (nun[i] - nu[i]);
        nu.swap(nun);
        tk = tn;
        out.iters = it;
        if (it % 50 == 0 || it == 1) {
            second_diff_t(nu, q, Dtv);
            for (int i = 0; i < q; ++i) z[i] = y[i] - Dtv[i];
            DenseVector Dz;
            second_diff(z, Dz);
            primal = 0.0;
            for (int i = 0; i < q; ++i) {
                double d = y[i] - z[i];
                primal += 0.5 * d * d;
            }
            for (int i = 0; i < md; ++i) primal += alpha * std::fabs(Dz[i]);
            double dual = dot(nu, Dy) - 0.5 * dot(Dtv, Dtv);
            out.gap = primal - dual;
            if (out.gap <= 1e-12 * (1.0 + std::fabs(primal))) break;
            if (it % 5000 == 0) {  // periodic momentum reset keeps APG monotone enough
                w = nu;
                tk = 1.0;
            }
        }
    }
    second_diff_t(nu, q, Dtv);
    for (int i = 0; i < q; ++i) z[i] = y[i] - Dtv[i];
    DenseVector Dz;
    second_diff(z, Dz);
    out.objective = primal;
    out.x = z;
    out.x.insert(out.x.end(), Dz.begin(), Dz.end());
    return out;
}

OracleSolution oracle_commodity_flow(const GeneratedProblem& gp) {
    int p = gp.dims.at("p"), q = gp.dims.at("q");
    int n_tr = gp.dims.at("n_tr"), n_sink = gp.dims.at("n_sink"), n_src = gp.dims.at("n_src");
    const DenseVector& B = gp.data.at("B");
    const DenseVector& c = gp.data.at("c");
    const DenseVector& d_src = gp.data.at("d_src");
    const DenseVector& st = gp.data.at("s_tilde");
    const DenseVector& z_max = gp.data.at("z_max");
    const DenseVector& s_max = gp.data.at("s_max");
    int n = q + n_src;
    DenseVector P(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < q; ++j) P[static_cast<size_t>(j) * n + j] = c[j];
    for (int k = 0; k < n_src; ++k) P[static_cast<size_t>(q + k) * n + q + k] = d_src[k];
    DenseVector qlin(n, 0.0);
    DenseVector E(static_cast<size_t>(p) * n, 0.0);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < p; ++i) E[static_cast<size_t>(j) * p + i] = B[static_cast<size_t>(j) * p + i];
    for (int k = 0; k < n_src; ++k) E[static_cast<size_t>(q + k) * p + n_tr + n_sink + k] = 1.0;
    DenseVector h(p, 0.0);
    for (int i = 0; i < n_tr + n_sink; ++i) h[i] = -st[i];
    DenseVector lo(n), hi(n);
    for (int j = 0; j < q; ++j) {
        lo[j] = -z_max[j];
        hi[j] = z_max[j];
    }
    for (int k = 0; k < n_src; ++k) {
        lo[q + k] = 0.0;
        hi[q + k] = s_max[k];
    }
    AlResult al = al_box_qp(n, p, P, qlin, E, h, lo, hi);
    OracleSolution out;
    out.iters = al.iters;
    out.gap = al.feas_inf;
    double obj = 0.0;
    for (int j = 0; j < q; ++j) obj += c[j] * al.x[j] * al.x[j];
    for (int k = 0; k < n_src; ++k) obj += d_src[k] * al.x[q + k] * al.x[q + k];
    out.objective = obj;
    out.x.assign(al.x.begin(), al.x.begin() + q);
    out.x.insert(out.x.end(), n_tr, 0.0);
    out.x.insert(out.x.end(), st.begin() + n_tr, st.begin() + n_tr + n_sink);
    out.x.insert(out.x.end(), al.x.begin() + q, al.x.end());
    return out;
}

OracleSolution oracle_optimal_control(const GeneratedProblem& gp) {
    int p = gp.dims.at("p"), q = gp.dims.at("q"), L = gp.dims.at("L");
    const DenseVector& F = gp.data.at("F");
    const DenseVector& G = gp.data.at("G");
    int nz = L * q, nu = L * p, n = nz + nu, m = (L + 1) * q;
    DenseVector P(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) P[static_cast<size_t>(i) * n + i] = 1.0;
    DenseVector qlin(n, 0.0);
    DenseVector E(static_cast<size_t>(m) * n, 0.0);
    auto at = [&](int r, int col) -> double& { return E[static_cast<size_t>(col) * m + r]; };
    for (int i = 0; i < q; ++i) at(i, i) = 1.0;
    for (int r = 1; r < L; ++r) {
        for (int j = 0; j < q; ++j)
            for (int i = 0; i < q; ++i) at(r * q + i, (r - 1) * q + j) = -F[static_cast<size_t>(j) * q + i];
        for (int i = 0; i < q; ++i) at(r * q + i, r * q + i) += 1.0;
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < q; ++i)
                at(r * q + i, nz + (r - 1) * p + j) = -G[static_cast<size_t>(j) * q + i];
    }
    for (int i = 0; i < q; ++i) at(L * q + i, (L - 1) * q + i) = 1.0;
    DenseVector h(m, 0.0);
    const DenseVector& z_init = gp.data.at("z_init");
    const DenseVector& z_term = gp.data.at("z_term");
    std::copy(z_init.begin(), z_init.end(), h.begin());
    std::copy(z_term.begin(), z_term.end(), h.end() - q);
    DenseVector lo(n, -kHuge), hi(n, kHuge);
    for (int i = nz; i < n; ++i) {
        lo[i] = -1.0;
        hi[i] = 1.0;
    }
    AlResult al = al_box_qp(n, m, P, qlin, E, h, lo, hi);
    OracleSolution out;
    out.iters = al.iters;
    out.gap = al.feas_inf;
    out.objective = dot(al.x, al.x);
    out.x = std::move(al.x);
    return out;
}

OracleSolution oracle_coupled_qp(const GeneratedProblem& gp) {
    int L = gp.dims.at("L"), s = gp.dims.at("s"), ql = gp.dims.at("q"), pl = gp.dims.at("p");
    const DenseVector& Qa = gp.data.at("Q");
    const DenseVector& ca = gp.data.at("c");
    const DenseVector& Fa = gp.data.at("F");
    const DenseVector& da = gp.data.at("d");
    const DenseVector& Ga = gp.data.at("G");
    const DenseVector& h_eq = gp.data.at("h");
    int nz = L * ql, nw = L * pl, n = nz + nw, m = nw + s;
    // x = (z, w): F_l z_l + w_l = d_l with w >= 0, plus sum_l G_l z_l = h.
    DenseVector P(static_cast<size_t>(n) * n, 0.0);
    for (int l = 0; l < L; ++l)
        for (int j = 0; j < ql; ++j)
            for (int i = 0; i < ql; ++i)
                P[static_cast<size_t>(l * ql + j) * n + l * ql + i] =
                    Qa[static_cast<size_t>(l) * ql * ql + static_cast<size_t>(j) * ql + i];
    DenseVector qlin(n, 0.0);
    std::copy(ca.begin(), ca.end(), qlin.begin());
    DenseVector E(static_cast<size_t>(m) * n, 0.0);
    auto at = [&](int r, int col) -> double& { return E[static_cast<size_t>(col) * m + r]; };
    for (int l = 0; l < L; ++l) {
        const double* Fl = Fa.data() + static_cast<size_t>(l) * pl * ql;
        for (int j = 0; j < ql; ++j)
            for (int i = 0; i < pl; ++i) at(l * pl + i, l * ql + j) = Fl[static_cast<size_t>(j) * pl + i];
        for (int i = 0; i < pl; ++i) at(l * pl + i, nz + l * pl + i) = 1.0;
        const double* Gl = Ga.data() + static_cast<size_t>(l) * s * ql;
        for (int j = 0; j < ql; ++j)
            for (int i = 0; i < s; ++i) at(nw + i, l * ql + j) = Gl[static_cast<size_t>(j) * s + i];
    }
    DenseVector h(m, 0.0);
    std::copy(da.begin(), da.end(), h.begin());
    std::copy(h_eq.begin(), h_eq.end(), h.begin() + nw);
    DenseVector lo(n, -kHuge), hi(n, kHuge);
    for (int i = nz; i < n; ++i) lo[i] = 0.0;
    AlResult al = al_box_qp(n, m, P, qlin, E, h, lo, hi);
    OracleSolution out;
    out.iters = al.iters;
    out.gap = al.feas_inf;
    double obj = 0.0;
    DenseVector tmp(ql);
    for (int l = 0; l < L; ++l) {
        const double* zl = al.x.data() + static_cast<size_t>(l) * ql;
        const double* Ql = Qa.data() + static_cast<size_t>(l) * ql * ql;
        dense_mul(ql, ql, Ql, zl, tmp.data());
        for (int i = 0; i < ql; ++i) obj += zl[i] * tmp[i] + ca[static_cast<size_t>(l) * ql + i] * zl[i];
    }
    out.objective = obj;
    out.x.assign(al.x.begin(), al.x.begin() + nz);
    return out;
}

OracleSolution oracle_multitask(const GeneratedProblem& gp) {
    int p = gp.dims.at("p"), s = gp.dims.at("s"), L = gp.dims.at("L");
    const DenseVector& W = gp.data.at("W");
    const DenseVector& Y = gp.data.at("Y");
    double alpha = gp.meta.at("alpha").get<double>();
    double beta = gp.meta.at("beta").get<double>();
    int n = s * L;
    double sw = dense_norm2_est(p, s, W.data());
    double Lh = 1.02 * sw * sw / 4.0 + 1e-30;
    double gamma = 1.0 / Lh;

    DenseVector z(n, 0.0), th(n), xg(n), grad(n), Zm(static_cast<size_t>(p) * L), M(p);
    auto prox_group = [&](const DenseVector& v, DenseVector& outv) {
        outv.resize(n);
        for (int l = 0; l < L; ++l) {
            const double* vl = v.data() + static_cast<size_t>(l) * s;
            double nrm = 0.0;
            for (int i = 0; i < s; ++i) nrm += vl[i] * vl[i];
            nrm = std::sqrt(nrm);
            double sc = nrm <= gamma * alpha ? 0.0 : 1.0 - gamma * alpha / nrm;
            for (int i = 0; i < s; ++i) outv[static_cast<size_t>(l) * s + i] = sc * vl[i];
        }
    };
    auto prox_nuc = [&](DenseVector v) {
        Svd svd = jacobi_svd(s, L, v.data());
        int r = static_cast<int>(svd.s.size());
        for (int k = 0; k < r; ++k) svd.s[k] = std::max(0.0, svd.s[k] - gamma * beta);
        DenseVector outv(n, 0.0);
        for (int k = 0; k < r; ++k) {
            if (svd.s[k] == 0.0) continue;
            for (int l = 0; l < L; ++l)
                for (int i = 0; i < s; ++i)
                    outv[static_cast<size_t>(l) * s + i] +=
                        svd.s[k] * svd.U[static_cast<size_t>(k) * s + i] * svd.V[static_cast<size_t>(k) * L + l];
        }
        return outv;
    };
    auto gradient = [&](const DenseVector& theta) {
        for (int l = 0; l < L; ++l)
            dense_mul(p, s, W.data(), theta.data() + static_cast<size_t>(l) * s,
                      Zm.data() + static_cast<size_t>(l) * p);
        for (int l = 0; l < L; ++l) {
            for (int i = 0; i < p; ++i) {
                double yv = Y[static_cast<size_t>(l) * p + i];
                M[i] = -yv * sigmoid(-yv * Zm[static_cast<size_t>(l) * p + i]);
            }
            dense_tmul(p, s, W.data(), M.data(), grad.data() + static_cast<size_t>(l) * s);
        }
    };
    auto objective = [&](const DenseVector& theta) {
        double f = 0.0;
        for (int l = 0; l < L; ++l)
            dense_mul(p, s, W.data(), theta.data() + static_cast<size_t>(l) * s,
                      Zm.data() + static_cast<size_t>(l) * p);
        for (size_t i = 0; i < Zm.size(); ++i) f += softplus(-Y[i] * Zm[i]);
        for (int l = 0; l < L; ++l) {
            double nrm = 0.0;
            for (int i = 0; i < s; ++i) {
                double v = theta[static_cast<size_t>(l) * s + i];
                nrm += v * v;
            }
            f += alpha * std::sqrt(nrm);
        }
        Svd svd = jacobi_svd(s, L, theta.data());
        for (double sv : svd.s) f += beta * sv;
        return f;
    };

    OracleSolution out;
    double obj_prev = std::numeric_limits<double>::infinity();
    DenseVector half(n);
    for (int it = 1; it <= 300000; ++it) {
        prox_group(z, th);
        gradient(th);
        for (int i = 0; i < n; ++i) half[i] = 2.0 * th[i] - z[i] - gamma * grad[i];
        xg = prox_nuc(half);
        double dz = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = xg[i] - th[i];
            z[i] += d;
            dz += d * d;
        }
        out.iters = it;
        out.gap = std::sqrt(dz);
        if (it % 100 == 0) {
            double obj = objective(th);
            if (out.gap <= 1e-11 * (1.0 + norm2(z)) ||
                (it > 1000 && std::fabs(obj - obj_prev) <= 1e-13 * (1.0 + std::fabs(obj))))
                break;
            obj_prev = obj;
        }
    }
    prox_group(z, th);
    out.objective = objective(th);
    for (int l = 0; l < L; ++l)
        dense_mul(p, s, W.data(), th.data() + static_cast<size_t>(l) * s,
                  Zm.data() + static_cast<size_t>(l) * p);
    out.x = Zm;
    out.x.insert(out.x.end(), th.begin(), th.end());
    out.x.insert(out.x.end(), th.begin(), th.end());
    return out;
}

}  // namespace

double l1_trend_affine_threshold(const DenseVector& y) {
    int q = static_cast<int>(y.size());
    if (q < 3) throw std::invalid_argument("l1_trend_affine_threshold: need length >= 3");
    int md = q - 2;
    // DD' is the pentadiagonal (1, -4, 6, -4, 1) Gram of the stencil.
    DenseVector M(static_cast<size_t>(md) * md, 0.0);
    for (int i = 0; i < md; ++i)
        for (int j = std::max(0, i - 2); j <= std::min(md - 1, i + 2); ++j) {
            int dist = std::abs(i - j);
            M[static_cast<size_t>(j) * md + i] = dist == 0 ? 6.0 : (dist == 1 ? -4.0 : 1.0);
        }
    if (!cholesky_lower(md, M.data()))
        throw std::runtime_error("l1_trend_affine_threshold: factorization failed");
    DenseVector rhs;
    second_diff(y, rhs);
    cholesky_solve(md, M.data(), rhs.data());
    return norm_inf(rhs);
}

OracleSolution reference_solution(const GeneratedProblem& gp) {
    if (gp.family == "nnls") return oracle_nnls(gp);
    if (gp.family == "sparse_inv_cov") return oracle_sparse_inv_cov(gp);
    if (gp.family == "l1_trend") return oracle_l1_trend(gp);
    if (gp.family == "commodity_flow") return oracle_commodity_flow(gp);
    if (gp.family == "optimal_control") return oracle_optimal_control(gp);
    if (gp.family == "coupled_qp") return oracle_coupled_qp(gp);
    if (gp.family == "multitask_logistic") return oracle_multitask(gp);
    throw std::invalid_argument("unknown family \"" + gp.family + "\"");
}

}  // namespace a2dr
