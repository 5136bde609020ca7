#pragma once

#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "a2dr/sparse.hpp"
#include "a2dr/vec.hpp"

namespace a2dr {

// Proximal operator of a closed convex function f on R^n:
//   evaluate(v, t) = argmin_x f(x) + ||x - v||^2 / (2t),  t > 0.
// Operators are immutable after construction and evaluate is pure, so a
// solver may fan blocks out across threads freely.
class ProxOperator {
  public:
    virtual ~ProxOperator() = default;

    int dim() const { return n_; }
    virtual std::string_view kind() const = 0;
    virtual void evaluate(const double* v, double t, double* x) const = 0;
    DenseVector evaluate(const DenseVector& v, double t) const;

    // f(x). Indicator parts contribute +inf when violated beyond a small
    // relative tolerance (prox outputs always satisfy them exactly or to
    // the subsolver's accuracy).
    virtual double objective(const double* x) const = 0;
    double objective(const DenseVector& x) const;

    // Parameters for the problem-file schema (see io.hpp).
    virtual void write_params(nlohmann::json& j) const = 0;

  protected:
    explicit ProxOperator(int n);
    int n_;
};

using ProxPtr = std::shared_ptr<const ProxOperator>;

ProxPtr make_zero(int n);
// f(x) = ||F x - g||^2
ProxPtr make_sum_squares_affine(SparseMatrix F, DenseVector g);
ProxPtr make_nonneg(int n);
// f(x) = alpha * ||x||_1
ProxPtr make_soft_threshold(int n, double alpha);
ProxPtr make_box(DenseVector lo, DenseVector hi);
// f(x) = sum_i w_i x_i^2 + indicator(lo <= x <= hi), w_i >= 0
ProxPtr make_quad_box(DenseVector w, DenseVector lo, DenseVector hi);
// indicator(x == value)
ProxPtr make_affine_indicator(DenseVector value);
// f(S) = -log det S + tr(S Q) on the full q*q column-major vectorization,
// Q symmetric. Asymmetric inputs are symmetrized; see NegLogDetTrace below.
ProxPtr make_neg_log_det_trace(int q, DenseVector Q);
// f(x) = alpha * sum over blocks of ||x_block||_2, widths partition n
ProxPtr make_group_lasso(double alpha, std::vector<int> widths);
// f(X) = beta * (nuclear norm of the rows x cols matrix), column-major
ProxPtr make_nuclear_norm(int rows, int cols, double beta);
// f(x) = sum_i log(1 + exp(-labels_i * x_i)), labels in {-1, +1}
ProxPtr make_logistic(DenseVector labels);
// f(x) = x'Qx + c'x + indicator(F x <= d). Q is n*n column-major PSD (empty
// means zero), F is n_ineq x n column-major. The prox solves the QP through
// accelerated projected gradient on its dual; an infeasible polyhedron
// surfaces as a ProxError.
ProxPtr make_quad_form_polyhedron(int n, DenseVector Q, DenseVector c, int n_ineq,
                                  DenseVector F, DenseVector d);
// prox_{t fhat}(v) = (1/e) prox_{e^2 t f}(e v) for fhat(x) = f(e x), e > 0.
ProxPtr wrap_scaled(ProxPtr inner, double e);

struct ProxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exposed concretely for the symmetrization warning channel.
class NegLogDetTrace : public ProxOperator {
  public:
    NegLogDetTrace(int q, DenseVector Q);
    std::string_view kind() const override { return "neg_log_det_trace"; }
    void evaluate(const double* v, double t, double* x) const override;
    double objective(const double* x) const override;
    void write_params(nlohmann::json& j) const override;
    // Returns true when the input had to be symmetrized beyond roundoff.
    bool evaluate_checked(const double* v, double t, double* x) const;
    int side() const { return q_; }
    const DenseVector& Q() const { return Q_; }

  private:
    int q_;
    DenseVector Q_;
};

}  // namespace a2dr
