#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "a2dr/bench.hpp"
#include "a2dr/io.hpp"
#include "a2dr/parallel.hpp"
#include "a2dr/solver.hpp"

namespace {

int exit_code_for(a2dr::Status s) {
    switch (s) {
        case a2dr::Status::solved: return 0;
        case a2dr::Status::max_iterations: return 2;
        case a2dr::Status::infeasible_candidate:
        case a2dr::Status::unbounded_candidate:
        case a2dr::Status::linear_system_infeasible: return 3;
    }
    return 1;
}

struct SolveFlags {
    int max_iters = 1000;
    double eps_abs = 1e-6;
    double eps_rel = 1e-8;
    double t = 0.0;
    double eta = 1e-8;
    int mem = 10;
    double safeguard_d = 1e6;
    double safeguard_eps = 1e-6;
    int safeguard_r = 10;
    bool no_aa = false;
    bool no_precond = false;
    std::string reg = "adaptive";
    int threads = 0;
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--max-iters", f.max_iters, "iteration cap");
    cmd->add_option("--eps-abs", f.eps_abs, "absolute stopping tolerance");
    cmd->add_option("--eps-rel", f.eps_rel, "relative stopping tolerance");
    cmd->add_option("--t", f.t, "step size (<= 0 selects automatically)");
    cmd->add_option("--eta", f.eta, "acceleration regularization weight");
    cmd->add_option("--mem", f.mem, "acceleration memory");
    cmd->add_option("--safeguard-D", f.safeguard_d, "safeguard constant D");
    cmd->add_option("--safeguard-eps", f.safeguard_eps, "safeguard decay epsilon");
    cmd->add_option("--safeguard-R", f.safeguard_r, "safeguard check spacing R");
    cmd->add_flag("--no-aa", f.no_aa, "plain splitting, no acceleration");
    cmd->add_flag("--no-precond", f.no_precond, "skip equilibration");
    cmd->add_option("--reg", f.reg, "regularization mode: adaptive, constant, none")
        ->check(CLI::IsMember({"adaptive", "constant", "none"}));
    cmd->add_option("--threads", f.threads, "bound on parallel prox evaluation threads");
}

a2dr::SolverOptions to_options(const SolveFlags& f) {
    a2dr::SolverOptions o;
    o.max_iter = f.max_iters;
    o.eps_abs = f.eps_abs;
    o.eps_rel = f.eps_rel;
    o.t = f.t;
    o.eta = f.eta;
    o.aa_memory = f.mem;
    o.safeguard_d = f.safeguard_d;
    o.safeguard_eps = f.safeguard_eps;
    o.safeguard_r = f.safeguard_r;
    o.enable_aa = !f.no_aa;
    o.enable_precond = !f.no_precond;
    if (f.reg == "constant") o.reg = a2dr::RegMode::constant;
    if (f.reg == "none") o.reg = a2dr::RegMode::none;
    if (f.threads > 0) a2dr::set_threads(f.threads);
    return o;
}

int run_solve(const std::string& path, const SolveFlags& flags, const std::string& output) {
    a2dr::BlockProblem p = a2dr::load_problem(path);
    a2dr::SolverResult res = a2dr::solve(p, to_options(flags));
    nlohmann::json j = a2dr::result_to_json(res);
    if (!res.x_blocks.empty()) j["objective"] = p.objective(res.x_stacked());
    if (output.empty())
        std::cout << a2dr::dump_json(j);
    else
        a2dr::write_json_file(output, j);
    std::fprintf(stderr, "status=%s iters=%d time=%.3fs", a2dr::status_name(res.status),
                 res.num_iters, res.solve_time);
    if (!res.primal_norms.empty())
        std::fprintf(stderr, " residual=%.3e",
                     std::hypot(res.primal_norms[res.best_iter - 1], res.dual_norms[res.best_iter - 1]));
    std::fprintf(stderr, "\n");
    return exit_code_for(res.status);
}

nlohmann::json merged_sizes(const std::string& family, const std::string& preset, CLI::App* cmd,
                            int p, int q, int L, int s, double density, double alpha, double beta) {
    nlohmann::json sizes =
        preset == "paper" ? a2dr::paper_sizes(family) : a2dr::desk_sizes(family);
    if (cmd->count("--p")) sizes["p"] = p;
    if (cmd->count("--q")) sizes["q"] = q;
    if (cmd->count("--L")) sizes["L"] = L;
    if (cmd->count("--s")) sizes["s"] = s;
    if (cmd->count("--density")) sizes["density"] = density;
    if (cmd->count("--alpha")) sizes["alpha"] = alpha;
    if (cmd->count("--beta")) sizes["beta"] = beta;
    return sizes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block-splitting convex solver with safeguarded acceleration"};
    app.require_subcommand(1);

    auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
    std::string problem_path, output;
    solve_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    SolveFlags flags;
    add_solver_flags(solve_cmd, flags);
    solve_cmd->add_option("--output", output, "write the result JSON here instead of stdout");

    auto* gen_cmd = app.add_subcommand("gen", "generate a problem instance");
    std::string family, preset = "desk", gen_output;
    std::uint64_t seed = 0;
    int sp = 0, sq = 0, sL = 0, ss = 0;
    double sdensity = 0.0, salpha = 0.0, sbeta = 0.0;
    gen_cmd->add_option("family", family, "problem family")
        ->required()
        ->check(CLI::IsMember(a2dr::family_names()));
    gen_cmd->add_option("--seed", seed, "generator seed");
    gen_cmd->add_option("--preset", preset, "desk or paper sizes")
        ->check(CLI::IsMember({"desk", "paper"}));
    gen_cmd->add_option("--p", sp, "size p");
    gen_cmd->add_option("--q", sq, "size q");
    gen_cmd->add_option("--L", sL, "size L");
    gen_cmd->add_option("--s", ss, "size s");
    gen_cmd->add_option("--density", sdensity, "nonzero fraction");
    gen_cmd->add_option("--alpha", salpha, "regularization weight");
    gen_cmd->add_option("--beta", sbeta, "regularization weight");
    gen_cmd->add_option("--output", gen_output, "output path (default <family>.json)");

    auto* bench_cmd = app.add_subcommand("bench", "compare plain and accelerated iteration counts");
    std::string bfamily, bpreset = "desk";
    std::uint64_t bseed = 0;
    double btol = 1e-4;
    int bmax = 20000;
    int bthreads = 0;
    bench_cmd->add_option("family", bfamily, "problem family")
        ->required()
        ->check(CLI::IsMember(a2dr::family_names()));
    bench_cmd->add_option("--seed", bseed, "generator seed");
    bench_cmd->add_option("--preset", bpreset, "desk or paper sizes")
        ->check(CLI::IsMember({"desk", "paper"}));
    bench_cmd->add_option("--tol", btol, "absolute residual tolerance");
    bench_cmd->add_option("--max-iters", bmax, "iteration cap");
    bench_cmd->add_option("--threads", bthreads, "bound on parallel prox evaluation threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(problem_path, flags, output);
        if (gen_cmd->parsed()) {
            nlohmann::json sizes = merged_sizes(family, preset, gen_cmd, sp, sq, sL, ss, sdensity,
                                                salpha, sbeta);
            a2dr::GeneratedProblem gp = a2dr::gen_problem(family, sizes, seed);
            nlohmann::json j = a2dr::problem_to_json(gp.problem);
            j["meta"] = gp.meta;
            std::string path = gen_output.empty() ? family + ".json" : gen_output;
            a2dr::write_json_file(path, j);
            std::fprintf(stderr, "wrote %s (%d blocks, %d rows)\n", path.c_str(),
                         gp.problem.num_blocks(), gp.problem.num_rows());
            return 0;
        }
        if (bench_cmd->parsed()) {
            if (bthreads > 0) a2dr::set_threads(bthreads);
            nlohmann::json sizes =
                bpreset == "paper" ? a2dr::paper_sizes(bfamily) : a2dr::desk_sizes(bfamily);
            a2dr::GeneratedProblem gp = a2dr::gen_problem(bfamily, sizes, bseed);
            a2dr::SolverOptions base;
            base.eps_abs = btol;
            base.eps_rel = 0.0;
            base.max_iter = bmax;
            a2dr::SolverOptions plain = base;
            plain.enable_aa = false;
            a2dr::SolverResult rd = a2dr::solve(gp.problem, plain);
            a2dr::SolverResult ra = a2dr::solve(gp.problem, base);
            std::printf("family=%s seed=%llu tol=%g\n", bfamily.c_str(),
                        static_cast<unsigned long long>(bseed), btol);
            std::printf("drs:  status=%s iters=%d time=%.3fs\n", a2dr::status_name(rd.status),
                        rd.num_iters, rd.solve_time);
            std::printf("a2dr: status=%s iters=%d time=%.3fs\n", a2dr::status_name(ra.status),
                        ra.num_iters, ra.solve_time);
            if (ra.num_iters > 0)
                std::printf("iteration ratio drs/a2dr = %.2f\n",
                            static_cast<double>(rd.num_iters) / ra.num_iters);
            return 0;
        }
    } catch (const a2dr::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const a2dr::InvalidProblem& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
