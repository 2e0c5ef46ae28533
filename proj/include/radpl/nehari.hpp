#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radpl/fixed_point.hpp"
#include "radpl/parallel.hpp"
#include "radpl/shooting.hpp"

namespace radpl {

enum class Provenance { variational, shooting, mountain_pass };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::variational: return "variational";
        case Provenance::shooting: return "shooting";
        default: return "mountain_pass";
    }
}

/// An accepted solution with its certification scalars.
struct SolutionRecord {
    RadialField u;
    double q = 0.0;
    double energy = 0.0;
    double nehari_residual = 0.0;
    double grad_norm = 0.0;  // max norm of the energy gradient
    double u0 = 0.0;         // u(0)
    double u1 = 0.0;         // u(1)
    Provenance provenance = Provenance::variational;
};

inline SolutionRecord make_record(const EnergyModel& model, const RadialField& u,
                                  Provenance prov) {
    SolutionRecord rec;
    rec.u = u;
    rec.q = model.params().q;
    rec.energy = model.energy(u);
    rec.nehari_residual = model.nehari_residual(u);
    rec.grad_norm = detail::weak_max_norm(model.gradient(u));
    rec.u0 = u.front();
    rec.u1 = u.back();
    rec.provenance = prov;
    return rec;
}

/// Residual/cone acceptance gate shared by all solution producers.
inline bool record_accepted(const SolutionRecord& rec) {
    return in_cone(rec.u) &&
           std::abs(rec.nehari_residual) < 1e-6 * std::max(1.0, std::abs(rec.energy));
}

namespace detail {

/// Low-frequency cosine noise, values of order one, smooth on the grid scale.
inline RadialField smooth_noise(const RadialGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double a[9];
    for (int k = 0; k <= 8; ++k) a[k] = unif(rng) / (1.0 + k * k);
    RadialField out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = grid.nodes()[i];
        double s = 0.0;
        for (int k = 0; k <= 8; ++k) s += a[k] * std::cos(k * M_PI * r);
        out[i] = s;
    }
    return out;
}

struct StartResult {
    RadialField u;
    double energy = 0.0;
    int iters = 0;
    bool converged = false;
    std::string note;
};

/**
 * Minimize the energy over the Nehari set intersected with the cone,
 * starting from one seed: line search along the fixed-point direction
 * tilde_T(u) - u, with every trial re-projected onto the Nehari set
 * (off the set the energy is unbounded below for q > p, so comparing
 * unprojected trials would run away).
 */
inline StartResult minimize_from(const EnergyModel& model, const RadialField& seed,
                                 int max_outer = 500) {
    const RadialGrid& grid = model.grid();
    const double p = model.params().p;
    StartResult res;
    try {
        RadialField u = cone_project(grid, seed);
        if (sup_norm(u) < 1e-12) throw std::runtime_error("seed projects to zero");
        u = model.nehari_project(u).field;
        double E = model.energy(u);
        double step = 1.0;
        int outer = 0;
        for (outer = 0; outer < max_outer; ++outer) {
            const RadialField Tu = tilde_T(model, u);
            RadialField dir(Tu.size());
            for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = Tu[i] - u[i];
            if (w1p_norm(grid, dir, p) < 1e-9) break;

            double alpha = step;
            bool accepted = false;
            while (alpha >= 1e-8) {
                RadialField trial(u.size());
                for (std::size_t i = 0; i < trial.size(); ++i)
                    trial[i] = u[i] + alpha * dir[i];
                trial = cone_project(grid, trial);
                if (sup_norm(trial) < 1e-12) {
                    alpha *= 0.5;
                    continue;
                }
                trial = model.nehari_project(trial).field;
                const double e = model.energy(trial);
                if (e < E - 1e-16 * std::abs(E)) {
                    u = std::move(trial);
                    E = e;
                    step = std::min(1.0, alpha * 1.5);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) break;  // stationary on the constraint set
        }
        u = model.nehari_project(u).field;
        res.u = newton_refine(model, u, 1e-12, 80);
        res.energy = model.energy(res.u);
        res.iters = outer;
        res.converged = true;
    } catch (const std::exception& e) {
        res.converged = false;
        res.note = e.what();
    }
    return res;
}

}  // namespace detail

/// The fixed multistart seed list; extras beyond it are RNG perturbations.
inline std::vector<RadialField> nehari_seed_list(const RadialGrid& grid,
                                                 const RadialField& G, int multistart,
                                                 std::uint64_t rng_seed) {
    std::vector<RadialField> seeds;
    seeds.push_back(constant_field(grid, 0.3));
    seeds.push_back(constant_field(grid, 0.7));
    RadialField ramp(grid.size()), ramp2(grid.size()), step(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.nodes()[i];
        ramp[i] = r;
        ramp2[i] = r * r;
        step[i] = 0.5 + 0.5 * std::tanh((r - 0.8) / 0.05);
    }
    seeds.push_back(std::move(ramp));
    seeds.push_back(std::move(ramp2));
    seeds.push_back(std::move(step));
    seeds.push_back(G);
    std::mt19937_64 rng(rng_seed);
    while (static_cast<int>(seeds.size()) < multistart) {
        RadialField noise = detail::smooth_noise(grid, rng);
        RadialField u(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) u[i] = G[i] + 0.3 * noise[i];
        seeds.push_back(cone_project(grid, u));
    }
    if (static_cast<int>(seeds.size()) > multistart && multistart >= 1)
        seeds.resize(static_cast<std::size_t>(multistart));
    return seeds;
}

/**
 * Ground state: argmin of the energy over the Nehari set within the cone.
 * Runs the fixed multistart list (constants 0.3/0.7, ramps r and r^2, a
 * smoothed step at r = 0.8, the limit profile G, then seeded perturbations
 * of G when multistart > 6), keeps the lowest converged energy, and
 * certifies the upper bound c_q <= I_q(h_q(G) G). Throws when every start
 * fails, with the collected failure notes.
 */
inline SolutionRecord minimize_on_nehari(const EnergyModel& model, int multistart = 6,
                                         std::uint64_t rng_seed = 0x9e3779b97f4a7c15ull) {
    const RadialGrid& grid = model.grid();
    const RadialField G = solve_G_variational(model.params(), grid);
    const std::vector<RadialField> seeds =
        nehari_seed_list(grid, G, std::max(multistart, 1), rng_seed);

    std::vector<detail::StartResult> results(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        results[i] = detail::minimize_from(model, seeds[i]);
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].converged) continue;
        if (!best || results[i].energy < results[*best].energy) best = i;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "minimize_on_nehari: no start converged;";
        for (std::size_t i = 0; i < results.size(); ++i)
            msg << " [start " << i << ": " << results[i].note << "]";
        throw std::runtime_error(msg.str());
    }

    SolutionRecord rec = make_record(model, results[*best].u, Provenance::variational);
    for (const auto& r : results)
        if (r.converged && r.energy < rec.energy - 1e-12)
            throw std::logic_error("minimize_on_nehari: argmin reduction broken");

    // upper bound through the limit profile: c_q <= I_q(h_q(G) G)
    const double cap = model.energy(model.nehari_project(G).field);
    if (!(rec.energy <= cap + 1e-9 * std::max(1.0, std::abs(cap)))) {
        std::ostringstream msg;
        msg << "minimize_on_nehari: minimum " << rec.energy
            << " exceeds the certified bound I(h(G)G) = " << cap;
        throw std::runtime_error(msg.str());
    }
    if (!record_accepted(rec))
        throw std::runtime_error("minimize_on_nehari: best record fails acceptance");
    return rec;
}

/// Sampling diagnostics of local minimality of the constant 1 on the
/// Nehari set (empirical coercivity constant and Poincare-Wirtinger ratio).
struct LocalMinDiagnostic {
    double m_q = 0.0;      // min (I(w) - I(1)) / ||w-1||^p over valid samples
    double min_gap = 0.0;  // min I(w) - I(1)
    double pw_max = 0.0;   // max ||w-1||_p^p / ||grad w||_p^p
    int n_valid = 0;
    int n_samples = 0;
};

/**
 * Draw n_samples cone perturbations w~ = cone_project(1 + a * noise) with
 * a <= delta, project each to the Nehari set, keep those within delta of
 * the constant in W^{1,p}, and measure the energy gap against ||w-1||^p.
 * Throws when fewer than 10 samples survive the filters.
 */
inline LocalMinDiagnostic check_local_min_at_1(const EnergyModel& model, int n_samples,
                                               double delta,
                                               std::uint64_t rng_seed = 0x5851f42d4c957f2dull) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("check_local_min_at_1: delta in (0,1) required");
    const RadialGrid& grid = model.grid();
    const double p = model.params().p;
    const double E1 = model.energy(constant_field(grid, 1.0));
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    LocalMinDiagnostic diag;
    diag.n_samples = n_samples;
    diag.m_q = std::numeric_limits<double>::infinity();
    diag.min_gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        RadialField noise = detail::smooth_noise(grid, rng);
        const double nn = w1p_norm(grid, noise, p);
        if (nn < 1e-14) continue;
        const double amp = delta * unif(rng) / nn;
        RadialField w(grid.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + amp * noise[i];
        w = cone_project(grid, w);
        if (sup_norm(w) < 1e-12) continue;
        w = model.nehari_project(w).field;

        RadialField diff(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) diff[i] = w[i] - 1.0;
        const double dist_p = w1p_norm_p(grid, diff, p);
        const double dist = std::pow(dist_p, 1.0 / p);
        if (dist < 1e-10 || dist > delta) continue;  // w == 1 or outside the ball

        const double gap = model.energy(w) - E1;
        ++diag.n_valid;
        diag.min_gap = std::min(diag.min_gap, gap);
        diag.m_q = std::min(diag.m_q, gap / dist_p);
        const double grad_p = grad_lp_norm_p(grid, w, p);
        if (grad_p > 0.0)
            diag.pw_max = std::max(diag.pw_max, lp_norm_p(grid, diff, p) / grad_p);
    }
    if (diag.n_valid < 10)
        throw std::runtime_error("check_local_min_at_1: fewer than 10 valid samples");
    return diag;
}

/// One row of the large-q table.
struct AsymptoticRow {
    double q = 0.0;
    double c_q = 0.0;         // ground-state energy
    double sup_dist_G = 0.0;  // ||u_q - G||_inf
    double w1p_uq = 0.0;      // ||u_q||_{W^{1,p}}
    double h_q_G = 0.0;       // Nehari scaling of G
};

/**
 * Ground states along an increasing q list at fixed p, N, grid; reports
 * the quantities whose limits identify the profile G (c_q -> ||G||^p / p,
 * u_q -> G, h_q(G) -> 1).
 */
inline std::vector<AsymptoticRow> asymptotic_study(double p, int N, const RadialGrid& grid,
                                                   const std::vector<double>& q_list,
                                                   int multistart = 6) {
    for (std::size_t i = 1; i < q_list.size(); ++i)
        if (!(q_list[i] > q_list[i - 1]))
            throw std::invalid_argument("asymptotic_study: q_list must increase");
    std::vector<AsymptoticRow> rows;
    rows.reserve(q_list.size());
    for (double q : q_list) {
        const ProblemParams pp = make_params(p, q, N, default_ell(p, q));
        const EnergyModel model(pp, grid);
        const RadialField G = solve_G_variational(pp, grid);
        const SolutionRecord rec = minimize_on_nehari(model, multistart);
        AsymptoticRow row;
        row.q = q;
        row.c_q = rec.energy;
        row.sup_dist_G = sup_distance(rec.u, G);
        row.w1p_uq = w1p_norm(grid, rec.u, p);
        row.h_q_G = model.nehari_project(G).t;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace radpl
