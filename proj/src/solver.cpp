#include "a2dr/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "a2dr/precond.hpp"

namespace a2dr {

const char* status_name(Status s) {
    switch (s) {
        case Status::solved: return "solved";
        case Status::max_iterations: return "max_iterations";
        case Status::infeasible_candidate: return "infeasible_candidate";
        case Status::unbounded_candidate: return "unbounded_candidate";
        case Status::linear_system_infeasible: return "linear_system_infeasible";
    }
    return "unknown";
}

SafeguardDecision safeguard_decide(SafeguardState& st, double g_norm, double d, double eps,
                                   int r) {
    if (st.check_required || st.r_aa >= r) {
        double bound = d * st.g0_norm *
                       std::pow(static_cast<double>(st.n_aa) / r + 1.0, -(1.0 + eps));
        if (g_norm <= bound) {
            ++st.n_aa;
            st.check_required = false;
            st.r_aa = 1;
            return SafeguardDecision::accept_aa;
        }
        st.r_aa = 0;
        return SafeguardDecision::reject_aa;
    }
    ++st.n_aa;
    ++st.r_aa;
    return SafeguardDecision::skip_check_accept_aa;
}

PathologyMonitor::PathologyMonitor(int window, double stall_tol, double eps_tol)
    : window_(window), stall_tol_(stall_tol), eps_tol_(eps_tol) {}

void PathologyMonitor::update(double delta_v_norm, double prim_norm) {
    dv_.push_back(delta_v_norm);
    prim_.push_back(prim_norm);
    if (static_cast<int>(dv_.size()) > window_) {
        dv_.pop_front();
        prim_.pop_front();
    }
    current_.reset();
    if (static_cast<int>(dv_.size()) < window_) return;
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double v : dv_) {
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    if (mx <= 0.0 || (mx - mn) / mx > stall_tol_ || mn < 10.0 * eps_tol_) return;
    bool prim_vanished = true;
    for (double v : prim_)
        if (v > eps_tol_) {
            prim_vanished = false;
            break;
        }
    current_ = Classification{
        prim_vanished ? Status::unbounded_candidate : Status::infeasible_candidate, dv_.back()};
}

DenseVector SolverResult::x_stacked() const {
    DenseVector x;
    for (const auto& blk : x_blocks) x.insert(x.end(), blk.begin(), blk.end());
    return x;
}

SolverResult solve(const BlockProblem& p, const SolverOptions& opts) {
    auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    const int n = p.total_dim();
    if (!opts.v0.empty() && static_cast<int>(opts.v0.size()) != n)
        throw std::invalid_argument("solve: v0 size mismatch");
    if (!opts.v0.empty() && !all_finite(opts.v0)) throw std::invalid_argument("solve: non-finite v0");
    if (opts.enable_aa && opts.aa_memory < 1)
        throw std::invalid_argument("solve: aa_memory must be >= 1");
    if (opts.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");

    SolverResult out;

    if (p.A.rows() > 0) {
        FeasibilityReport rep = presolve_check(p.A, p.b, opts.presolve_tol);
        if (!rep.feasible) {
            out.status = Status::linear_system_infeasible;
            out.pathology_estimate = rep.residual_norm;
            out.solve_time = elapsed();
            return out;
        }
    }

    // Equilibrate when asked and meaningful; otherwise identity scalings.
    ScaledProblem sp;
    const BlockProblem* work = &p;
    bool scaled = false;
    if (opts.enable_precond && p.A.nnz() > 0) {
        sp = rescale_problem(p, equilibrate(p.A));
        work = &sp.problem;
        scaled = true;
    }
    double t = opts.t > 0.0 ? opts.t : (scaled ? sp.t : 0.1);
    out.t_used = t;

    DenseVector v(n, 0.0);
    if (!opts.v0.empty()) v = scaled ? sp.scale_v(opts.v0) : opts.v0;

    DrsWorkspace ws;
    ws.lsqr_tol = opts.lsqr_tol;
    ws.lsqr_max_iter = opts.lsqr_max_iter;

    // Seed pass: fixes the stopping threshold and opens the AA memory.
    DrsStep step = drs_step(*work, v, t, ws);
    Residuals res0 = residuals(*work, v, step.x_half, t, ws);
    out.eps_tol = opts.eps_abs + opts.eps_rel * res0.norm;

    AaMemory mem(n, opts.enable_aa ? opts.aa_memory : 1);
    SafeguardState sg;
    DenseVector g_prev = step.g;
    sg.g0_norm = norm2(g_prev);
    if (opts.enable_aa) mem.seed(step.v_next);

    PathologyMonitor monitor(opts.stall_window, opts.stall_tol, out.eps_tol);
    monitor.update(sg.g0_norm, res0.prim_norm);

    DenseVector v_prev = v;
    v = step.v_next;

    double best_norm = std::numeric_limits<double>::infinity();
    DenseVector best_x, best_lam;
    bool solved = false;

    for (int k = 1; k <= opts.max_iter; ++k) {
        step = drs_step(*work, v, t, ws);
        Residuals res = residuals(*work, v, step.x_half, t, ws);
        if (!std::isfinite(res.norm))
            throw std::runtime_error("solve: non-finite residual at iteration " + std::to_string(k));
        double g_norm = norm2(step.g);
        out.primal_norms.push_back(res.prim_norm);
        out.dual_norms.push_back(res.dual_norm);
        out.g_norms.push_back(g_norm);
        out.num_iters = k;
        if (res.norm < best_norm) {
            best_norm = res.norm;
            best_x = step.x_half;
            best_lam = res.lam;
            out.best_iter = k;
        }

        DenseVector v_next = step.v_next;
        if (opts.enable_aa) {
            mem.push(sub(v, v_prev), sub(step.g, g_prev), step.v_next);
            AaCandidate cand = aa_candidate(mem, step.g, opts.eta, opts.reg);
            SafeguardDecision dec = safeguard_decide(sg, g_norm, opts.safeguard_d,
                                                     opts.safeguard_eps, opts.safeguard_r);
            if (dec != SafeguardDecision::reject_aa) v_next = std::move(cand.v);
        }
        g_prev = step.g;
        v_prev = v;

        double dv = 0.0;
        for (int i = 0; i < n; ++i) {
            double diff = v[i] - v_next[i];
            dv += diff * diff;
        }
        dv = std::sqrt(dv);
        out.delta_v_norms.push_back(dv);
        out.delta_v_norm = dv;
        monitor.update(dv, res.prim_norm);

        v = std::move(v_next);
        if (check_stop(res.norm, res0.norm, opts.eps_abs, opts.eps_rel)) {
            solved = true;
            break;
        }
        if (opts.stop_on_pathology && monitor.current()) break;
    }

    out.aa_accepted = sg.n_aa;
    if (solved) {
        out.status = Status::solved;
    } else if (auto cls = monitor.current()) {
        out.status = cls->status;
        out.pathology_estimate =
            cls->status == Status::unbounded_candidate ? cls->delta_v_norm / t : cls->delta_v_norm;
    } else {
        out.status = Status::max_iterations;
    }

    DenseVector x = scaled ? sp.unscale_x(best_x) : best_x;
    DenseVector lam = scaled ? sp.unscale_lambda(best_lam) : best_lam;
    const auto& off = p.A.block_offsets();
    out.x_blocks.resize(p.num_blocks());
    for (int i = 0; i < p.num_blocks(); ++i)
        out.x_blocks[i].assign(x.begin() + off[i], x.begin() + off[i + 1]);
    out.lambda = std::move(lam);
    out.solve_time = elapsed();
    return out;
}

}  // namespace a2dr
