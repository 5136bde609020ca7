#pragma once

#include <deque>
#include <optional>

#include "a2dr/accel.hpp"
#include "a2dr/drs.hpp"
#include "a2dr/problem.hpp"

namespace a2dr {

enum class Status {
    solved,
    max_iterations,
    infeasible_candidate,
    unbounded_candidate,
    linear_system_infeasible,  // presolve: no x satisfies A x = b at all
};

const char* status_name(Status s);

struct SolverOptions {
    double t = 0.0;  // <= 0 selects the equilibration-based choice (0.1 without preconditioning)
    int max_iter = 1000;
    double eps_abs = 1e-6;
    double eps_rel = 1e-8;

    bool enable_aa = true;
    int aa_memory = 10;          // M_max
    double eta = 1e-8;           // regularization weight
    RegMode reg = RegMode::adaptive;
    double safeguard_d = 1e6;    // D
    double safeguard_eps = 1e-6; // epsilon in the decay exponent
    int safeguard_r = 10;        // R

    bool enable_precond = true;
    double presolve_tol = 1e-8;

    DenseVector v0;  // empty means zeros

    double lsqr_tol = 1e-10;
    int lsqr_max_iter = 0;

    // Stalled-iterate monitor (advisory): window length, relative spread
    // bound, and an absolute floor of 10 * eps_tol on the stalled value.
    int stall_window = 50;
    double stall_tol = 1e-3;
    bool stop_on_pathology = false;
};

struct SolverResult {
    Status status = Status::max_iterations;
    std::vector<DenseVector> x_blocks;  // from the iteration with smallest residual norm
    DenseVector lambda;
    int num_iters = 0;
    double solve_time = 0.0;  // seconds
    DenseVector primal_norms, dual_norms;  // per iteration, length num_iters
    DenseVector g_norms, delta_v_norms;    // fixed-point and iterate-change histories
    double delta_v_norm = 0.0;             // last ||v^k - v^{k+1}||
    double t_used = 0.0;
    int best_iter = 0;
    double eps_tol = 0.0;
    // For the *_candidate statuses: ||delta v|| (infeasible, a lower bound on
    // the primal distance) or ||delta v||/t (unbounded, dual distance).
    double pathology_estimate = 0.0;
    long aa_accepted = 0;

    DenseVector x_stacked() const;
};

SolverResult solve(const BlockProblem& p, const SolverOptions& opts = {});

// Safeguard bookkeeping of the accelerated loop, exposed for tests.
struct SafeguardState {
    bool check_required = true;  // I_safeguard
    long n_aa = 0;
    int r_aa = 0;                // R_AA
    double g0_norm = 0.0;
};

enum class SafeguardDecision { accept_aa, reject_aa, skip_check_accept_aa };

// Three-way branch: when a check is due (check_required or r_aa >= r), AA is
// accepted only if g_norm <= d * g0_norm * (n_aa/r + 1)^-(1+eps); otherwise
// the vanilla candidate is kept and r_aa resets. Outside checks AA is taken
// and both counters advance.
SafeguardDecision safeguard_decide(SafeguardState& st, double g_norm, double d, double eps, int r);

// Watches ||v^k - v^{k+1}|| for a stalled nonzero limit, which signals an
// unsolvable instance: if the primal residual also vanished the problem
// looks unbounded (dual infeasible), otherwise infeasible. Advisory only.
class PathologyMonitor {
  public:
    PathologyMonitor(int window, double stall_tol, double eps_tol);
    void update(double delta_v_norm, double prim_norm);
    struct Classification {
        Status status;          // infeasible_candidate or unbounded_candidate
        double delta_v_norm;    // stalled value
    };
    std::optional<Classification> current() const { return current_; }

  private:
    int window_;
    double stall_tol_, eps_tol_;
    std::deque<double> dv_, prim_;
    std::optional<Classification> current_;
};

}  // namespace a2dr
