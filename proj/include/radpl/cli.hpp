#pragma once

#include <iostream>
#include <optional>
#include <string>

#include "radpl/verify.hpp"

namespace radpl {

// exit codes shared by the subcommands
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_no_convergence = 2;
inline constexpr int exit_partial = 3;

struct SolveOptions {
    double p = 1.97;
    double q = 40.0;
    int N = 1;
    std::optional<double> ell;
    std::string method = "nehari";  // nehari | shoot | mp
    std::size_t grid_n = 512;
    double tol = 1e-6;  // relative Nehari-residual acceptance gate
    std::string out;    // empty: JSON to stdout
    int multistart = 6;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct BranchOptions {
    double p = 1.97;
    int N = 1;
    double q_min = 3.0;
    double q_max = 100.0;
    int q_steps = 200;
    double ell_hint = 3.0;
    std::size_t grid_n = 512;
    std::string out_csv;  // empty: CSV to stdout
    std::string out_svg;  // empty: no plot
};

struct VerifyOptions {
    VerifyConfig config;
    std::string out;  // empty: JSON to stdout
};

namespace detail {

inline void emit(const std::string& path, const std::string& content, std::ostream& os) {
    if (path.empty())
        os << content;
    else
        write_text_file(path, content);
}

/// Lowest monotone nonconstant root, polished onto the discrete stationarity
/// system so the record passes the same residual gate as the variational
/// route; falls back to the constant when no such root exists.
inline SolutionRecord solve_by_shooting(const EnergyModel& model) {
    const RadialGrid& grid = model.grid();
    const auto roots = find_neumann_roots(model.params(), grid, 1e-3, 1.0 - 1e-3, 300);
    std::optional<ShotResult> lower;
    for (const ShotResult& s : roots)
        if (s.monotone && (!lower || s.d < lower->d)) lower = s;
    if (!lower) return make_record(model, constant_field(grid, 1.0), Provenance::shooting);

    const RadialField v = newton_refine(model, lower->u, 1e-12, 80);
    if (sup_distance(v, lower->u) > 5e-3)
        throw std::runtime_error("shoot: polish left the shooting root");
    return make_record(model, v, Provenance::shooting);
}

inline SolutionRecord solve_by_mountain_pass(const EnergyModel& model, int multistart,
                                             std::uint64_t seed, std::ostream& log) {
    const SolutionRecord uq = minimize_on_nehari(model, multistart, seed);
    const auto [R1, R2] = choose_box(model, uq);
    PathSurface sf = make_surface(uq.u, R1, R2);
    const DqEstimate est = estimate_dq(model, sf);
    log << "mountain pass: d_q = " << est.d_q << " after " << est.sweeps << " sweeps\n";
    const auto vq = refine_vq(model, est.argmax);
    if (!vq)
        throw std::runtime_error(
            "mp: saddle refinement did not separate from the constant (d_q = " +
            detail::fmt(est.d_q) + ")");
    return *vq;
}

}  // namespace detail

inline int cmd_solve(const SolveOptions& opt, std::ostream& log = std::cerr) {
    try {
        const double ell = opt.ell ? *opt.ell : default_ell(opt.p, opt.q);
        const ProblemParams pp = make_params(opt.p, opt.q, opt.N, ell);
        const RadialGrid grid(opt.N, opt.grid_n);
        const EnergyModel model(pp, grid);

        SolutionRecord rec;
        if (opt.method == "nehari")
            rec = minimize_on_nehari(model, opt.multistart, opt.seed);
        else if (opt.method == "shoot")
            rec = detail::solve_by_shooting(model);
        else if (opt.method == "mp")
            rec = detail::solve_by_mountain_pass(model, opt.multistart, opt.seed, log);
        else
            throw std::invalid_argument("unknown method: " + opt.method);

        if (!in_cone(rec.u) ||
            !(std::abs(rec.nehari_residual) <
              std::max(opt.tol, 1e-12) * std::max(1.0, std::abs(rec.energy))))
            throw std::runtime_error("solution failed the acceptance gate");

        detail::emit(opt.out, record_to_json(rec, pp, grid).dump(2) + "\n", std::cout);
        return exit_ok;
    } catch (const std::invalid_argument& e) {
        log << "solve: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        log << "solve: " << e.what() << "\n";
        return exit_no_convergence;
    }
}

inline int cmd_branch(const BranchOptions& opt, std::ostream& log = std::cerr) {
    Branch br;
    try {
        if (!(opt.q_min > 2.0 && opt.q_max > opt.q_min && opt.q_steps >= 1))
            throw std::invalid_argument("require 2 < q-min < q-max and q-steps >= 1");
        const RadialGrid grid(opt.N, opt.grid_n);
        br = trace_branch(opt.p, opt.N, opt.ell_hint, grid, opt.q_min, opt.q_max,
                          opt.q_steps);
    } catch (const std::invalid_argument& e) {
        log << "branch: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        log << "branch: " << e.what() << "\n";
        br.complete = false;
    }
    try {
        detail::emit(opt.out_csv, branch_csv(br), std::cout);
        if (!opt.out_svg.empty()) write_text_file(opt.out_svg, branch_svg(br));
    } catch (const std::exception& e) {
        log << "branch: " << e.what() << "\n";
        return exit_no_convergence;
    }
    if (!br.complete) {
        log << "branch: sweep incomplete, emitted collected points\n";
        return exit_partial;
    }
    return exit_ok;
}

inline int cmd_verify(const VerifyOptions& opt, std::ostream& log = std::cerr) {
    try {
        const VerificationReport rep = run_verification(opt.config);
        detail::emit(opt.out, report_to_json(rep).dump(2) + "\n", std::cout);
        int failed = 0;
        for (const CheckResult& c : rep.checks)
            if (c.status == "fail") ++failed;
        if (failed) {
            log << "verify: " << failed << " check(s) failed\n";
            return exit_no_convergence;
        }
        return exit_ok;
    } catch (const std::invalid_argument& e) {
        log << "verify: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        log << "verify: " << e.what() << "\n";
        return exit_no_convergence;
    }
}

}  // namespace radpl
