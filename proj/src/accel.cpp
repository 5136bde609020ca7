#include "a2dr/accel.hpp"

#include <cmath>
#include <stdexcept>

#include "a2dr/dense.hpp"

namespace a2dr {

AaMemory::AaMemory(int n, int m_max) : n_(n), m_max_(m_max) {
    if (n <= 0 || m_max < 1) throw std::invalid_argument("AaMemory: bad sizes");
}

void AaMemory::seed(const DenseVector& v_drs) {
    if (static_cast<int>(v_drs.size()) != n_) throw std::invalid_argument("AaMemory: size mismatch");
    ring_.clear();
    s_.clear();
    y_.clear();
    fs_ = fy_ = 0.0;
    ring_.push_back(v_drs);
}

void AaMemory::push(const DenseVector& s, const DenseVector& y, const DenseVector& v_drs) {
    if (ring_.empty()) throw std::logic_error("AaMemory: push before seed");
    if (static_cast<int>(s.size()) != n_ || static_cast<int>(y.size()) != n_ ||
        static_cast<int>(v_drs.size()) != n_)
        throw std::invalid_argument("AaMemory: size mismatch");
    fs_ += dot(s, s);
    fy_ += dot(y, y);
    s_.push_back(s);
    y_.push_back(y);
    ring_.push_back(v_drs);
    if (width() > m_max_) {
        fs_ -= dot(s_.front(), s_.front());
        fy_ -= dot(y_.front(), y_.front());
        fs_ = std::max(fs_, 0.0);
        fy_ = std::max(fy_, 0.0);
        s_.pop_front();
        y_.pop_front();
        ring_.pop_front();
    }
    if (++pushes_ % 1000 == 0) {  // refresh the running sums
        fs_ = fy_ = 0.0;
        for (const auto& c : s_) fs_ += dot(c, c);
        for (const auto& c : y_) fy_ += dot(c, c);
    }
}

namespace {

// Columns of a deque flattened to an n x M column-major buffer.
DenseVector flatten(const std::deque<DenseVector>& cols, int n) {
    DenseVector out(static_cast<std::size_t>(n) * cols.size());
    std::size_t off = 0;
    for (const auto& c : cols) {
        std::copy(c.begin(), c.end(), out.begin() + off);
        off += n;
    }
    return out;
}

// Solve (Y'Y + mu I) x = r for small SPD-ish systems; eigendecomposition
// fallback covers the mu = 0 rank-deficient case.
void gram_solve(int M, DenseVector G, DenseVector& r) {
    DenseVector L = G;
    if (cholesky_lower(M, L.data())) {
        cholesky_solve(M, L.data(), r.data());
        return;
    }
    SymEig eig = jacobi_eigh(M, G.data());
    double cutoff = std::fabs(eig.values[M - 1]) * M * 2.220446049250313e-16;
    DenseVector c(M);
    dense_tmul(M, M, eig.vectors.data(), r.data(), c.data());
    for (int i = 0; i < M; ++i) c[i] = std::fabs(eig.values[i]) > cutoff ? c[i] / eig.values[i] : 0.0;
    dense_mul(M, M, eig.vectors.data(), c.data(), r.data());
}

}  // namespace

AaCandidate aa_candidate(const AaMemory& mem, const DenseVector& g, double eta, RegMode mode) {
    const int n = mem.dim();
    const int M = mem.width();
    if (static_cast<int>(g.size()) != n) throw std::invalid_argument("aa_candidate: size mismatch");
    if (static_cast<int>(mem.drs_ring().size()) != M + 1)
        throw std::logic_error("aa_candidate: ring not aligned with memory width");

    AaCandidate out;
    switch (mode) {
        case RegMode::adaptive: out.mu = eta * (mem.frob_s_sq() + mem.frob_y_sq()); break;
        case RegMode::constant: out.mu = eta; break;
        case RegMode::none: out.mu = 0.0; break;
    }
    if (M == 0) {
        out.v = mem.drs_ring().back();
        return out;
    }

    DenseVector Y = flatten(mem.y_cols(), n);
    out.gamma = ridge_lstsq(n, M, Y.data(), g.data(), out.mu);

    DenseVector alpha(M + 1);
    alpha[0] = out.gamma[0];
    for (int i = 1; i < M; ++i) alpha[i] = out.gamma[i] - out.gamma[i - 1];
    alpha[M] = 1.0 - out.gamma[M - 1];

    out.v.assign(n, 0.0);
    int j = 0;
    for (const DenseVector& cand : mem.drs_ring()) {
        const double a = alpha[j++];
        for (int i = 0; i < n; ++i) out.v[i] += a * cand[i];
    }
    return out;
}

double hk_norm_estimate(const AaMemory& mem, double mu, int power_iters) {
    const int n = mem.dim(), M = mem.width();
    if (M == 0) return 1.0;
    DenseVector Y = flatten(mem.y_cols(), n);
    DenseVector S = flatten(mem.s_cols(), n);
    DenseVector G(static_cast<std::size_t>(M) * M, 0.0);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            double s = 0.0;
            const double* ya = Y.data() + static_cast<std::size_t>(a) * n;
            const double* yb = Y.data() + static_cast<std::size_t>(b) * n;
            for (int i = 0; i < n; ++i) s += ya[i] * yb[i];
            G[static_cast<std::size_t>(b) * M + a] = s + (a == b ? mu : 0.0);
        }

    auto apply_h = [&](const DenseVector& w, DenseVector& out) {
        // out = w + (S - Y) (Y'Y + mu)^{-1} Y' w
        DenseVector c(M);
        dense_tmul(n, M, Y.data(), w.data(), c.data());
        gram_solve(M, G, c);
        out = w;
        for (int j = 0; j < M; ++j) {
            const double* sc = S.data() + static_cast<std::size_t>(j) * n;
            const double* yc = Y.data() + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < n; ++i) out[i] += c[j] * (sc[i] - yc[i]);
        }
    };
    auto apply_ht = [&](const DenseVector& w, DenseVector& out) {
        // out = w + Y (Y'Y + mu)^{-1} (S - Y)' w
        DenseVector c(M);
        for (int j = 0; j < M; ++j) {
            const double* sc = S.data() + static_cast<std::size_t>(j) * n;
            const double* yc = Y.data() + static_cast<std::size_t>(j) * n;
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += (sc[i] - yc[i]) * w[i];
            c[j] = s;
        }
        gram_solve(M, G, c);
        out = w;
        for (int j = 0; j < M; ++j) {
            const double* yc = Y.data() + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < n; ++i) out[i] += c[j] * yc[i];
        }
    };

    DenseVector w(n), u(n), hw(n);
    for (int i = 0; i < n; ++i) w[i] = std::cos(static_cast<double>(i) * 0.7 + 0.3) + 0.01;
    double lam = 1.0;
    for (int it = 0; it < power_iters; ++it) {
        double nw = norm2(w);
        if (nw == 0.0) break;
        scale(w, 1.0 / nw);
        apply_h(w, hw);
        apply_ht(hw, u);
        lam = norm2(u);
        w = u;
    }
    return std::sqrt(lam);
}

}  // namespace a2dr
