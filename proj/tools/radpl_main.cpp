#include <CLI11.hpp>

#include "radpl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Radial p-Laplacian Neumann solver suite"};
    app.require_subcommand(1);

    radpl::SolveOptions so;
    double so_ell = -1.0;
    CLI::App* solve = app.add_subcommand("solve", "compute one solution record");
    solve->add_option("--p", so.p, "operator exponent, in (1,2)");
    solve->add_option("--q", so.q, "nonlinearity exponent, > 2");
    solve->add_option("--N", so.N, "space dimension");
    solve->add_option("--ell", so_ell, "truncation growth exponent (default: derived)");
    solve->add_option("--method", so.method, "nehari | shoot | mp")
        ->check(CLI::IsMember({"nehari", "shoot", "mp"}));
    solve->add_option("--grid-n", so.grid_n, "number of grid cells");
    solve->add_option("--tol", so.tol, "relative residual acceptance gate");
    solve->add_option("--out", so.out, "output JSON path (default: stdout)");
    solve->add_option("--multistart", so.multistart, "number of minimization starts");
    solve->add_option("--seed", so.seed, "RNG seed for the extra starts");

    radpl::BranchOptions bo;
    CLI::App* branch = app.add_subcommand("branch", "trace the bifurcation diagram");
    branch->add_option("--p", bo.p, "operator exponent, in (1,2)");
    branch->add_option("--N", bo.N, "space dimension");
    branch->add_option("--q-min", bo.q_min, "sweep start");
    branch->add_option("--q-max", bo.q_max, "sweep end");
    branch->add_option("--q-steps", bo.q_steps, "number of sweep intervals");
    branch->add_option("--ell", bo.ell_hint, "truncation growth exponent cap");
    branch->add_option("--grid-n", bo.grid_n, "number of grid cells");
    branch->add_option("--out-csv", bo.out_csv, "CSV path (default: stdout)");
    branch->add_option("--out-svg", bo.out_svg, "SVG plot path (optional)");

    radpl::VerifyOptions vo;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant check registry");
    verify->add_option("--p", vo.config.p, "operator exponent, in (1,2)");
    verify->add_option("--N", vo.config.N, "space dimension");
    verify->add_option("--grid-n", vo.config.M, "number of grid cells");
    verify->add_option("--q-list", vo.config.q_list, "exponents to check");
    verify->add_option("--seed", vo.config.seed, "RNG seed for sampled checks");
    verify->add_option("--multistart", vo.config.multistart,
                       "number of minimization starts");
    verify->add_option("--out", vo.out, "report JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // 0 for --help, nonzero for bad flags
        return code == 0 ? 0 : radpl::exit_usage;
    }

    if (solve->parsed()) {
        if (so_ell > 0.0) so.ell = so_ell;
        return radpl::cmd_solve(so);
    }
    if (branch->parsed()) return radpl::cmd_branch(bo);
    return radpl::cmd_verify(vo);
}
