#include "a2dr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "a2dr/dense.hpp"
#include "a2dr/lsqr.hpp"

namespace a2dr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-6;

double softplus(double z) {  // log(1 + exp(z)) without overflow
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}
}  // namespace

ProxOperator::ProxOperator(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("ProxOperator: dimension must be positive");
}

DenseVector ProxOperator::evaluate(const DenseVector& v, double t) const {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("prox: input size mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("prox: step t must be positive");
    DenseVector x(n_);
    evaluate(v.data(), t, x.data());
    return x;
}

double ProxOperator::objective(const DenseVector& x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("objective: size mismatch");
    return objective(x.data());
}

namespace {

class ZeroProx final : public ProxOperator {
  public:
    explicit ZeroProx(int n) : ProxOperator(n) {}
    std::string_view kind() const override { return "zero"; }
    void evaluate(const double* v, double, double* x) const override {
        std::copy(v, v + n_, x);
    }
    double objective(const double*) const override { return 0.0; }
    void write_params(nlohmann::json&) const override {}
};

class SumSquaresAffine final : public ProxOperator {
  public:
    SumSquaresAffine(SparseMatrix F, DenseVector g)
        : ProxOperator(F.cols()), F_(std::move(F)), g_(std::move(g)) {
        if (static_cast<int>(g_.size()) != F_.rows())
            throw std::invalid_argument("sum_squares_affine: g size mismatch");
        if (!all_finite(g_)) throw std::invalid_argument("sum_squares_affine: non-finite g");
    }
    std::string_view kind() const override { return "sum_squares_affine"; }
    void evaluate(const double* v, double t, double* x) const override {
        // argmin ||Fx-g||^2 + ||x-v||^2/(2t) via the stacked least squares
        // [F; cI] x = [g; cv], c = 1/sqrt(2t)
        const int m = F_.rows(), n = n_;
        const double c = 1.0 / std::sqrt(2.0 * t);
        std::vector<Triplet> ts;
        ts.reserve(F_.nnz() + n);
        for (int k = 0; k < F_.nnz(); ++k)
            ts.push_back({F_.entry_rows()[k], F_.entry_cols()[k], F_.entry_vals()[k]});
        for (int i = 0; i < n; ++i) ts.push_back({m + i, i, c});
        SparseMatrix S(m + n, n, std::move(ts));
        DenseVector rhs(m + n);
        std::copy(g_.begin(), g_.end(), rhs.begin());
        for (int i = 0; i < n; ++i) rhs[m + i] = c * v[i];
        DenseVector warm(v, v + n);
        LsqrResult r = lsqr_solve(S, rhs, &warm, 1e-12, 0);
        std::copy(r.x.begin(), r.x.end(), x);
    }
    double objective(const double* x) const override {
        DenseVector Fx(F_.rows());
        F_.mul(x, Fx.data());
        double s = 0.0;
        for (int i = 0; i < F_.rows(); ++i) {
            double d = Fx[i] - g_[i];
            s += d * d;
        }
        return s;
    }
    void write_params(nlohmann::json& j) const override;
    const SparseMatrix& F() const { return F_; }
    const DenseVector& g() const { return g_; }

  private:
    SparseMatrix F_;
    DenseVector g_;
};

class NonnegProx final : public ProxOperator {
  public:
    explicit NonnegProx(int n) : ProxOperator(n) {}
    std::string_view kind() const override { return "nonneg"; }
    void evaluate(const double* v, double, double* x) const override {
        for (int i = 0; i < n_; ++i) x[i] = v[i] > 0.0 ? v[i] : 0.0;
    }
    double objective(const double* x) const override {
        for (int i = 0; i < n_; ++i)
            if (x[i] < -kFeasTol) return kInf;
        return 0.0;
    }
    void write_params(nlohmann::json&) const override {}
};

class SoftThreshold final : public ProxOperator {
  public:
    SoftThreshold(int n, double alpha) : ProxOperator(n), alpha_(alpha) {
        if (!(alpha >= 0.0)) throw std::invalid_argument("soft_threshold: alpha must be >= 0");
    }
    std::string_view kind() const override { return "soft_threshold"; }
    void evaluate(const double* v, double t, double* x) const override {
        const double k = t * alpha_;
        for (int i = 0; i < n_; ++i) {
            double a = std::fabs(v[i]) - k;
            x[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
        }
    }
    double objective(const double* x) const override {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += std::fabs(x[i]);
        return alpha_ * s;
    }
    void write_params(nlohmann::json& j) const override;
    double alpha() const { return alpha_; }

  private:
    double alpha_;
};

class QuadBox final : public ProxOperator {
  public:
    QuadBox(DenseVector w, DenseVector lo, DenseVector hi, bool pure_box)
        : ProxOperator(static_cast<int>(lo.size())),
          w_(std::move(w)), lo_(std::move(lo)), hi_(std::move(hi)), pure_box_(pure_box) {
        if (static_cast<int>(w_.size()) != n_ || static_cast<int>(hi_.size()) != n_)
            throw std::invalid_argument("quad_box: size mismatch");
        for (int i = 0; i < n_; ++i) {
            if (!(w_[i] >= 0.0) || !std::isfinite(w_[i]))
                throw std::invalid_argument("quad_box: weights must be finite and >= 0");
            if (std::isnan(lo_[i]) || std::isnan(hi_[i]) || lo_[i] > hi_[i])
                throw std::invalid_argument("quad_box: requires lo <= hi");
        }
    }
    std::string_view kind() const override { return pure_box_ ? "box" : "quad_box"; }
    void evaluate(const double* v, double t, double* x) const override {
        for (int i = 0; i < n_; ++i)
            x[i] = std::clamp(v[i] / (2.0 * t * w_[i] + 1.0), lo_[i], hi_[i]);
    }
    double objective(const double* x) const override {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
            double span = 1.0 + std::max(std::fabs(x[i]), 1.0);
            if (x[i] < lo_[i] - kFeasTol * span || x[i] > hi_[i] + kFeasTol * span) return kInf;
            s += w_[i] * x[i] * x[i];
        }
        return s;
    }
    void write_params(nlohmann::json& j) const override;
    const DenseVector& w() const { return w_; }
    const DenseVector& lo() const { return lo_; }
    const DenseVector& hi() const { return hi_; }

  private:
    DenseVector w_, lo_, hi_;
    bool pure_box_;
};

class AffineIndicator final : public ProxOperator {
  public:
    explicit AffineIndicator(DenseVector value)
        : ProxOperator(static_cast<int>(value.size())), value_(std::move(value)) {
        if (!all_finite(value_)) throw std::invalid_argument("affine_indicator: non-finite value");
    }
    std::string_view kind() const override { return "affine_indicator"; }
    void evaluate(const double*, double, double* x) const override {
        std::copy(value_.begin(), value_.end(), x);
    }
    double objective(const double* x) const override {
        for (int i = 0; i < n_; ++i)
            if (std::fabs(x[i] - value_[i]) > kFeasTol * (1.0 + std::fabs(value_[i]))) return kInf;
        return 0.0;
    }
    void write_params(nlohmann::json& j) const override;
    const DenseVector& value() const { return value_; }

  private:
    DenseVector value_;
};

class GroupLasso final : public ProxOperator {
  public:
    GroupLasso(double alpha, std::vector<int> widths)
        : ProxOperator(std::accumulate(widths.begin(), widths.end(), 0)),
          alpha_(alpha), widths_(std::move(widths)) {
        if (!(alpha >= 0.0)) throw std::invalid_argument("group_lasso: alpha must be >= 0");
        for (int w : widths_)
            if (w <= 0) throw std::invalid_argument("group_lasso: widths must be positive");
    }
    std::string_view kind() const override { return "group_lasso"; }
    void evaluate(const double* v, double t, double* x) const override {
        int off = 0;
        for (int w : widths_) {
            double nrm = 0.0;
            for (int i = 0; i < w; ++i) nrm += v[off + i] * v[off + i];
            nrm = std::sqrt(nrm);
            double f = nrm > t * alpha_ ? 1.0 - t * alpha_ / nrm : 0.0;
            for (int i = 0; i < w; ++i) x[off + i] = f * v[off + i];
            off += w;
        }
    }
    double objective(const double* x) const override {
        double s = 0.0;
        int off = 0;
        for (int w : widths_) {
            double nrm = 0.0;
            for (int i = 0; i < w; ++i) nrm += x[off + i] * x[off + i];
            s += std::sqrt(nrm);
            off += w;
        }
        return alpha_ * s;
    }
    void write_params(nlohmann::json& j) const override;
    double alpha() const { return alpha_; }
    const std::vector<int>& widths() const { return widths_; }

  private:
    double alpha_;
    std::vector<int> widths_;
};

class NuclearNorm final : public ProxOperator {
  public:
    NuclearNorm(int rows, int cols, double beta)
        : ProxOperator(rows * cols), rows_(rows), cols_(cols), beta_(beta) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("nuclear_norm: bad shape");
        if (!(beta >= 0.0)) throw std::invalid_argument("nuclear_norm: beta must be >= 0");
    }
    std::string_view kind() const override { return "nuclear_norm"; }
    void evaluate(const double* v, double t, double* x) const override {
        Svd svd = jacobi_svd(rows_, cols_, v);
        const int r = static_cast<int>(svd.s.size());
        for (int i = 0; i < r; ++i) svd.s[i] = std::max(svd.s[i] - t * beta_, 0.0);
        // X = U diag(s) V'
        std::fill(x, x + n_, 0.0);
        for (int k = 0; k < r; ++k) {
            if (svd.s[k] == 0.0) continue;
            const double* uk = svd.U.data() + static_cast<std::size_t>(k) * rows_;
            const double* vk = svd.V.data() + static_cast<std::size_t>(k) * cols_;
            for (int c = 0; c < cols_; ++c) {
                double f = svd.s[k] * vk[c];
                double* xc = x + static_cast<std::size_t>(c) * rows_;
                for (int rr = 0; rr < rows_; ++rr) xc[rr] += f * uk[rr];
            }
        }
    }
    double objective(const double* x) const override {
        Svd svd = jacobi_svd(rows_, cols_, x);
        double s = 0.0;
        for (double sv : svd.s) s += sv;
        return beta_ * s;
    }
    void write_params(nlohmann::json& j) const override;
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double beta() const { return beta_; }

  private:
    int rows_, cols_;
    double beta_;
};

class LogisticProx final : public ProxOperator {
  public:
    explicit LogisticProx(DenseVector labels)
        : ProxOperator(static_cast<int>(labels.size())), y_(std::move(labels)) {
        for (double y : y_)
            if (y != 1.0 && y != -1.0)
                throw std::invalid_argument("logistic: labels must be +1 or -1");
    }
    std::string_view kind() const override { return "logistic"; }
    void evaluate(const double* v, double t, double* x) const override {
#pragma omp parallel for schedule(static) if (n_ > 2048)
        for (int i = 0; i < n_; ++i) x[i] = scalar_prox(v[i], y_[i], t);
    }
    double objective(const double* x) const override {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += softplus(-y_[i] * x[i]);
        return s;
    }
    void write_params(nlohmann::json& j) const override;
    const DenseVector& labels() const { return y_; }

    // minimize log(1+exp(-y x)) + (x - v)^2 / (2t); Newton with a bisection
    // fallback on the bracket (v - t, v + t), which always contains the
    // minimizer since the loss slope lies in (-1, 0) after the sign fold.
    static double scalar_prox(double v, double y, double t) {
        auto sigma = [](double z) {  // 1/(1+e^-z)
            return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        };
        auto grad = [&](double x) { return (x - v) / t - y * sigma(-y * x); };
        double lo = v - t, hi = v + t;
        double x = v + y * t * sigma(-y * v);  // one fixed-point step as init
        for (int it = 0; it < 200; ++it) {
            double g = grad(x);
            if (std::fabs(g) <= 1e-12) return x;
            if (g > 0.0) hi = x; else lo = x;
            double sg = sigma(-y * x);
            double h = sg * (1.0 - sg) + 1.0 / t;
            double step = x - g / h;
            x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
        }
        return x;
    }

  private:
    DenseVector y_;
};

class QuadFormPolyhedron final : public ProxOperator {
  public:
    QuadFormPolyhedron(int n, DenseVector Q, DenseVector c, int n_ineq, DenseVector F,
                       DenseVector d)
        : ProxOperator(n), Q_(std::move(Q)), c_(std::move(c)), mi_(n_ineq), F_(std::move(F)),
          d_(std::move(d)) {
        if (!Q_.empty() && static_cast<int>(Q_.size()) != n * n)
            throw std::invalid_argument("quad_form_polyhedron: Q size mismatch");
        if (static_cast<int>(c_.size()) != n)
            throw std::invalid_argument("quad_form_polyhedron: c size mismatch");
        if (mi_ < 0 || static_cast<int>(F_.size()) != mi_ * n || static_cast<int>(d_.size()) != mi_)
            throw std::invalid_argument("quad_form_polyhedron: F/d size mismatch");
        if (!Q_.empty()) {
            // symmetrize, then check PSD by a diagonally shifted Cholesky
            double scale = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    double v = 0.5 * (Q_[static_cast<std::size_t>(j) * n + i] +
                                      Q_[static_cast<std::size_t>(i) * n + j]);
                    Q_[static_cast<std::size_t>(j) * n + i] = v;
                    scale = std::max(scale, std::fabs(v));
                }
            DenseVector C = Q_;
            for (int i = 0; i < n; ++i) C[static_cast<std::size_t>(i) * n + i] += 1e-10 * (1.0 + scale);
            if (!cholesky_lower(n, C.data()))
                throw std::invalid_argument("quad_form_polyhedron: Q is not positive semidefinite");
        }
    }
    std::string_view kind() const override { return "quad_form_polyhedron"; }

    void evaluate(const double* v, double t, double* x) const override {
        const int n = n_;
        // P = 2Q + I/t, qlin = c - v/t; solve min 1/2 x'Px + qlin'x, Fx <= d
        DenseVector P(static_cast<std::size_t>(n) * n, 0.0);
        if (!Q_.empty())
            for (std::size_t k = 0; k < P.size(); ++k) P[k] = 2.0 * Q_[k];
        for (int i = 0; i < n; ++i) P[static_cast<std::size_t>(i) * n + i] += 1.0 / t;
        DenseVector L = P;
        if (!cholesky_lower(n, L.data()))
            throw ProxError("quad_form_polyhedron: factorization failed");
        DenseVector qlin(n);
        for (int i = 0; i < n; ++i) qlin[i] = c_[i] - v[i] / t;

        auto xofmu = [&](const DenseVector& mu, DenseVector& out) {
            // out = -P^{-1}(qlin + F' mu)
            for (int i = 0; i < n; ++i) out[i] = qlin[i];
            if (mi_ > 0) {
                DenseVector ftmu(n);
                dense_tmul(mi_, n, F_.data(), mu.data(), ftmu.data());
                for (int i = 0; i < n; ++i) out[i] += ftmu[i];
            }
            cholesky_solve(n, L.data(), out.data());
            for (int i = 0; i < n; ++i) out[i] = -out[i];
        };

        DenseVector xs(n);
        DenseVector mu(mi_, 0.0);
        xofmu(mu, xs);
        if (mi_ == 0 || feas_violation(xs) <= 1e-14 * (1.0 + norm_inf(d_))) {
            std::copy(xs.begin(), xs.end(), x);
            return;
        }

        // FISTA on the dual: minimize over mu >= 0
        //   phi(mu) = 1/2 (qlin+F'mu)' P^{-1} (qlin+F'mu) + d'mu
        // grad phi = -F x(mu) + d, Lipschitz ||F P^{-1} F'||_2.
        double lip = dual_lipschitz(L);
        double step = lip > 0.0 ? 1.0 / lip : 1.0;
        DenseVector z = mu, mu_prev = mu, g(mi_), Fx(mi_);
        double theta = 1.0;
        const double dscale = 1.0 + norm_inf(d_);
        for (int it = 1; it <= 2000; ++it) {
            xofmu(z, xs);
            dense_mul(mi_, n_, F_.data(), xs.data(), Fx.data());
            for (int i = 0; i < mi_; ++i) g[i] = d_[i] - Fx[i];
            mu_prev = mu;
            for (int i = 0; i < mi_; ++i) mu[i] = std::max(0.0, z[i] - step * g[i]);
            double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            double mom = (theta - 1.0) / theta_next;
            // restart on a backward step to keep the dual monotone
            double dp = 0.0;
            for (int i = 0; i < mi_; ++i) dp += g[i] * (mu[i] - mu_prev[i]);
            if (dp > 0.0) {
                theta_next = 1.0;
                mom = 0.0;
            }
            for (int i = 0; i < mi_; ++i) z[i] = mu[i] + mom * (mu[i] - mu_prev[i]);
            theta = theta_next;
            if (it % 10 == 0 || it == 2000) {
                xofmu(mu, xs);
                dense_mul(mi_, n_, F_.data(), xs.data(), Fx.data());
                double feas = 0.0, comp = 0.0;
                for (int i = 0; i < mi_; ++i) {
                    feas = std::max(feas, Fx[i] - d_[i]);
                    comp = std::max(comp, std::fabs(mu[i] * (Fx[i] - d_[i])));
                }
                if (std::max(feas, comp) <= 1e-12 * dscale) break;
                if (it == 2000 && std::max(feas, comp) > 1e-8 * dscale)
                    throw ProxError(
                        "quad_form_polyhedron: dual iteration cap hit before the KKT "
                        "tolerance; the polyhedron {x : Fx <= d} may be infeasible");
                if (norm_inf(mu) > 1e12 && feas > 1e-6 * dscale)
                    throw ProxError(
                        "quad_form_polyhedron: dual variables diverged; the polyhedron "
                        "{x : Fx <= d} appears infeasible");
            }
        }
        xofmu(mu, xs);
        std::copy(xs.begin(), xs.end(), x);
    }

    double objective(const double* x) const override {
        const int n = n_;
        double s = 0.0;
        if (!Q_.empty()) {
            DenseVector Qx(n);
            dense_mul(n, n, Q_.data(), x, Qx.data());
            for (int i = 0; i < n; ++i) s += x[i] * Qx[i];
        }
        for (int i = 0; i < n; ++i) s += c_[i] * x[i];
        if (mi_ > 0) {
            DenseVector Fx(mi_);
            dense_mul(mi_, n, F_.data(), x, Fx.data());
            double dscale = 1.0 + norm_inf(d_);
            for (int i = 0; i < mi_; ++i)
                if (Fx[i] - d_[i] > kFeasTol * dscale) return kInf;
        }
        return s;
    }
    void write_params(nlohmann::json& j) const override;
    const DenseVector& Q() const { return Q_; }
    const DenseVector& c() const { return c_; }
    int n_ineq() const { return mi_; }
    const DenseVector& F() const { return F_; }
    const DenseVector& d() const { return d_; }

  private:
    double feas_violation(const DenseVector& x) const {
        if (mi_ == 0) return 0.0;
        DenseVector Fx(mi_);
        dense_mul(mi_, n_, F_.data(), x.data(), Fx.data());
        double m = 0.0;
        for (int i = 0; i < mi_; ++i) m = std::max(m, Fx[i] - d_[i]);
        return m;
    }
    double dual_lipschitz(const DenseVector& L) const {
        DenseVector w(mi_, 1.0);
        DenseVector tmp(n_);
        double lam = 0.0;
        for (int it = 0; it < 40; ++it) {
            double nw = norm2(w);
            if (nw == 0.0) return 0.0;
            scale(w, 1.0 / nw);
            dense_tmul(mi_, n_, F_.data(), w.data(), tmp.data());
            cholesky_solve(n_, L.data(), tmp.data());
            dense_mul(mi_, n_, F_.data(), tmp.data(), w.data());
            lam = norm2(w);
        }
        return lam * 1.01;  // small head-room so 1/lip is a safe step
    }

    DenseVector Q_, c_;
    int mi_;
    DenseVector F_, d_;
};

class ScaledProx final : public ProxOperator {
  public:
    ScaledProx(ProxPtr inner, double e) : ProxOperator(inner->dim()), inner_(std::move(inner)), e_(e) {
        if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("wrap_scaled: e must be positive");
    }
    std::string_view kind() const override { return "scaled"; }
    void evaluate(const double* v, double t, double* x) const override {
        DenseVector ev(n_);
        for (int i = 0; i < n_; ++i) ev[i] = e_ * v[i];
        inner_->evaluate(ev.data(), e_ * e_ * t, x);
        for (int i = 0; i < n_; ++i) x[i] /= e_;
    }
    double objective(const double* x) const override {
        DenseVector ex(n_);
        for (int i = 0; i < n_; ++i) ex[i] = e_ * x[i];
        return inner_->objective(ex.data());
    }
    void write_params(nlohmann::json& j) const override;
    const ProxPtr& inner() const { return inner_; }
    double e() const { return e_; }

  private:
    ProxPtr inner_;
    double e_;
};

}  // namespace

NegLogDetTrace::NegLogDetTrace(int q, DenseVector Q) : ProxOperator(q * q), q_(q), Q_(std::move(Q)) {
    if (q <= 0) throw std::invalid_argument("neg_log_det_trace: side must be positive");
    if (static_cast<int>(Q_.size()) != q * q)
        throw std::invalid_argument("neg_log_det_trace: Q size mismatch");
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            double a = Q_[static_cast<std::size_t>(j) * q + i], b = Q_[static_cast<std::size_t>(i) * q + j];
            if (std::fabs(a - b) > 1e-10 * (1.0 + std::fabs(a)))
                throw std::invalid_argument("neg_log_det_trace: Q must be symmetric");
        }
}

bool NegLogDetTrace::evaluate_checked(const double* v, double t, double* x) const {
    const int q = q_;
    double asym = 0.0, nrm = 0.0;
    DenseVector M(static_cast<std::size_t>(q) * q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i) {
            double a = v[static_cast<std::size_t>(j) * q + i], b = v[static_cast<std::size_t>(i) * q + j];
            asym += (a - b) * (a - b);
            nrm += a * a;
            M[static_cast<std::size_t>(j) * q + i] = 0.5 * (a + b) - t * Q_[static_cast<std::size_t>(j) * q + i];
        }
    bool warned = std::sqrt(asym) > 1e-9 * (1.0 + std::sqrt(nrm));
    SymEig eig = jacobi_eigh(q, M.data());
    // eigenvalue map from s - t/s = lambda, positive root
    for (int i = 0; i < q; ++i)
        eig.values[i] = 0.5 * (eig.values[i] + std::sqrt(eig.values[i] * eig.values[i] + 4.0 * t));
    // X = U diag(mapped) U'
    std::fill(x, x + n_, 0.0);
    for (int k = 0; k < q; ++k) {
        const double* uk = eig.vectors.data() + static_cast<std::size_t>(k) * q;
        double lam = eig.values[k];
        for (int j = 0; j < q; ++j) {
            double f = lam * uk[j];
            double* xc = x + static_cast<std::size_t>(j) * q;
            for (int i = 0; i < q; ++i) xc[i] += f * uk[i];
        }
    }
    return warned;
}

void NegLogDetTrace::evaluate(const double* v, double t, double* x) const {
    evaluate_checked(v, t, x);
}

double NegLogDetTrace::objective(const double* x) const {
    const int q = q_;
    DenseVector S(static_cast<std::size_t>(q) * q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i)
            S[static_cast<std::size_t>(j) * q + i] =
                0.5 * (x[static_cast<std::size_t>(j) * q + i] + x[static_cast<std::size_t>(i) * q + j]);
    SymEig eig = jacobi_eigh(q, S.data());
    double logdet = 0.0;
    for (double lam : eig.values) {
        if (lam <= 0.0) return kInf;
        logdet += std::log(lam);
    }
    double tr = 0.0;
    for (std::size_t k = 0; k < S.size(); ++k) tr += S[k] * Q_[k];
    return -logdet + tr;
}

// ---- factories ----

ProxPtr make_zero(int n) { return std::make_shared<ZeroProx>(n); }
ProxPtr make_sum_squares_affine(SparseMatrix F, DenseVector g) {
    return std::make_shared<SumSquaresAffine>(std::move(F), std::move(g));
}
ProxPtr make_nonneg(int n) { return std::make_shared<NonnegProx>(n); }
ProxPtr make_soft_threshold(int n, double alpha) {
    return std::make_shared<SoftThreshold>(n, alpha);
}
ProxPtr make_box(DenseVector lo, DenseVector hi) {
    DenseVector w(lo.size(), 0.0);
    return std::make_shared<QuadBox>(std::move(w), std::move(lo), std::move(hi), true);
}
ProxPtr make_quad_box(DenseVector w, DenseVector lo, DenseVector hi) {
    return std::make_shared<QuadBox>(std::move(w), std::move(lo), std::move(hi), false);
}
ProxPtr make_affine_indicator(DenseVector value) {
    return std::make_shared<AffineIndicator>(std::move(value));
}
ProxPtr make_neg_log_det_trace(int q, DenseVector Q) {
    return std::make_shared<NegLogDetTrace>(q, std::move(Q));
}
ProxPtr make_group_lasso(double alpha, std::vector<int> widths) {
    return std::make_shared<GroupLasso>(alpha, std::move(widths));
}
ProxPtr make_nuclear_norm(int rows, int cols, double beta) {
    return std::make_shared<NuclearNorm>(rows, cols, beta);
}
ProxPtr make_logistic(DenseVector labels) {
    return std::make_shared<LogisticProx>(std::move(labels));
}
ProxPtr make_quad_form_polyhedron(int n, DenseVector Q, DenseVector c, int n_ineq, DenseVector F,
                                  DenseVector d) {
    return std::make_shared<QuadFormPolyhedron>(n, std::move(Q), std::move(c), n_ineq,
                                                std::move(F), std::move(d));
}
ProxPtr wrap_scaled(ProxPtr inner, double e) {
    return std::make_shared<ScaledProx>(std::move(inner), e);
}

// ---- schema parameter writers ----

namespace {
nlohmann::json sparse_to_json(const SparseMatrix& A) {
    nlohmann::json j;
    j["m"] = A.rows();
    j["n"] = A.cols();
    j["rows"] = A.entry_rows();
    j["cols"] = A.entry_cols();
    j["vals"] = A.entry_vals();
    return j;
}
}  // namespace

void SumSquaresAffine::write_params(nlohmann::json& j) const {
    j["F"] = sparse_to_json(F_);
    j["g"] = g_;
}
void SoftThreshold::write_params(nlohmann::json& j) const { j["alpha"] = alpha_; }
void QuadBox::write_params(nlohmann::json& j) const {
    if (!pure_box_) j["w"] = w_;
    j["lo"] = lo_;
    j["hi"] = hi_;
}
void AffineIndicator::write_params(nlohmann::json& j) const { j["value"] = value_; }
void NegLogDetTrace::write_params(nlohmann::json& j) const {
    j["q"] = q_;
    j["Q"] = Q_;
}
void GroupLasso::write_params(nlohmann::json& j) const {
    j["alpha"] = alpha_;
    j["widths"] = widths_;
}
void NuclearNorm::write_params(nlohmann::json& j) const {
    j["rows"] = rows_;
    j["cols"] = cols_;
    j["beta"] = beta_;
}
void LogisticProx::write_params(nlohmann::json& j) const { j["labels"] = y_; }
void QuadFormPolyhedron::write_params(nlohmann::json& j) const {
    j["Q"] = Q_;
    j["c"] = c_;
    j["n_ineq"] = mi_;
    j["F"] = F_;
    j["d"] = d_;
}
void ScaledProx::write_params(nlohmann::json& j) const {
    j["e"] = e_;
    nlohmann::json in;
    in["kind"] = std::string(inner_->kind());
    in["n"] = inner_->dim();
    nlohmann::json params = nlohmann::json::object();
    inner_->write_params(params);
    in["params"] = params;
    j["inner"] = in;
}

}  // namespace a2dr
