#pragma once

#include <optional>
#include <utility>

#include "radpl/nehari.hpp"

namespace radpl {

/**
 * Discrete two-parameter surface gamma(t_i, s_j) over the box
 * [R1, R2] x [0, 1], seeded with gamma0(t, s) = t (s u_q + 1 - s).
 * The boundary stays frozen to gamma0 while the interior deforms.
 */
struct PathSurface {
    std::vector<double> t_nodes;
    std::vector<double> s_nodes;
    std::vector<RadialField> fields;  // row-major, fields[i * s_nodes.size() + j]
    bool boundary_frozen = true;

    const RadialField& at(std::size_t i, std::size_t j) const {
        return fields[i * s_nodes.size() + j];
    }
    RadialField& at(std::size_t i, std::size_t j) {
        return fields[i * s_nodes.size() + j];
    }
};

/// gamma0(t, s) = t (s u_q + 1 - s), the seed path family.
inline RadialField gamma0(const RadialField& u_q, double t, double s) {
    RadialField g(u_q.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = t * (s * u_q[k] + 1.0 - s);
    return g;
}

inline PathSurface make_surface(const RadialField& u_q, double R1, double R2,
                                std::size_t nt = 17, std::size_t ns = 17) {
    if (!(R2 > R1 && R1 > 0.0)) throw std::invalid_argument("make_surface: bad box");
    if (nt < 3 || ns < 3) throw std::invalid_argument("make_surface: need >= 3 nodes");
    PathSurface sf;
    sf.t_nodes.resize(nt);
    sf.s_nodes.resize(ns);
    for (std::size_t i = 0; i < nt; ++i)
        sf.t_nodes[i] = R1 + (R2 - R1) * static_cast<double>(i) / (nt - 1);
    if (R1 < 1.0 && 1.0 < R2) {
        // snap the nearest interior node to t = 1: the boundary max of the
        // seed family is attained at the constant gamma0(1, 0) = 1
        std::size_t nearest = 1;
        for (std::size_t i = 2; i + 1 < nt; ++i)
            if (std::abs(sf.t_nodes[i] - 1.0) < std::abs(sf.t_nodes[nearest] - 1.0))
                nearest = i;
        sf.t_nodes[nearest] = 1.0;
    }
    for (std::size_t j = 0; j < ns; ++j)
        sf.s_nodes[j] = static_cast<double>(j) / (ns - 1);
    sf.fields.reserve(nt * ns);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            sf.fields.push_back(gamma0(u_q, sf.t_nodes[i], sf.s_nodes[j]));
    return sf;
}

/**
 * Box corners for the min-max: R1 is the largest value of a decreasing scan
 * with 0 < I(gamma0(R1, s)) <= c_q / 2 and positive Nehari residual for all
 * s on a 33-point grid; R2 the smallest of an increasing scan with both
 * negative. Throws naming the failing condition when a scan exhausts.
 */
inline std::pair<double, double> choose_box(const EnergyModel& model,
                                            const SolutionRecord& u_q) {
    const double c_q = u_q.energy;
    constexpr int ns = 33;

    auto all_small_side = [&](double t) {
        for (int j = 0; j < ns; ++j) {
            const double s = static_cast<double>(j) / (ns - 1);
            const RadialField g = gamma0(u_q.u, t, s);
            const double e = model.energy(g);
            if (!(e > 0.0 && e <= 0.5 * c_q)) return false;
            if (!(model.nehari_residual(g) > 0.0)) return false;
        }
        return true;
    };
    auto all_large_side = [&](double t) {
        for (int j = 0; j < ns; ++j) {
            const double s = static_cast<double>(j) / (ns - 1);
            const RadialField g = gamma0(u_q.u, t, s);
            if (!(model.energy(g) < 0.0)) return false;
            if (!(model.nehari_residual(g) < 0.0)) return false;
        }
        return true;
    };

    double R1 = 0.0;
    for (double t = 0.9; t > 1e-6; t *= 0.8) {
        if (all_small_side(t)) {
            R1 = t;
            break;
        }
    }
    if (R1 == 0.0)
        throw std::runtime_error(
            "choose_box: no R1 with 0 < I <= c_q/2 and positive Nehari residual");

    double R2 = 0.0;
    const double t_cap = 10.0 * model.params().s0;
    for (double t = 1.5; t < t_cap; t *= 1.25) {
        if (all_large_side(t)) {
            R2 = t;
            break;
        }
    }
    if (R2 == 0.0)
        throw std::runtime_error(
            "choose_box: no R2 with I < 0 and negative Nehari residual");
    return {R1, R2};
}

struct DqEstimate {
    double d_q = 0.0;                 // lowest achieved max over the box
    RadialField argmax;               // field where that max is attained
    std::vector<double> max_history;  // max over the box after each sweep
    int sweeps = 0;
};

/**
 * Deform the interior of the surface by per-node backtracked descent steps
 * along tilde_T(u) - u (cone-projected, energy never increasing), boundary
 * frozen; the max of I over the box is therefore nonincreasing. Stops when
 * the max stagnates below 1e-8 relative change over 20 sweeps or at
 * max_sweeps. Returns the lowest achieved max and its field.
 */
inline DqEstimate estimate_dq(const EnergyModel& model, PathSurface& sf,
                              int max_sweeps = 200) {
    const RadialGrid& grid = model.grid();
    const std::size_t nt = sf.t_nodes.size(), ns = sf.s_nodes.size();

    std::vector<double> energies(nt * ns);
    for (std::size_t k = 0; k < sf.fields.size(); ++k)
        energies[k] = model.energy(sf.fields[k]);

    auto box_max = [&]() {
        std::size_t arg = 0;
        for (std::size_t k = 1; k < energies.size(); ++k)
            if (energies[k] > energies[arg]) arg = k;
        return std::pair<double, std::size_t>{energies[arg], arg};
    };

    DqEstimate est;
    auto [m0, arg0] = box_max();
    est.d_q = m0;
    est.argmax = sf.fields[arg0];
    est.max_history.push_back(m0);

    std::vector<std::size_t> interior;
    for (std::size_t i = 1; i + 1 < nt; ++i)
        for (std::size_t j = 1; j + 1 < ns; ++j) interior.push_back(i * ns + j);

    // nodes already this far below every boundary level can never carry the
    // max again (descent only lowers them); skipping them also keeps the
    // runaway region I -> -inf from overflowing the nonlinearity
    double floor_e = energies[0];
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            if (i == 0 || j == 0 || i + 1 == nt || j + 1 == ns)
                floor_e = std::min(floor_e, energies[i * ns + j]);
    floor_e -= 1.0;

    std::vector<double> steps(nt * ns, 1.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        std::vector<RadialField> next(interior.size());
        std::vector<double> next_e(interior.size());
        parallel_for(interior.size(), [&](std::size_t idx) {
            const std::size_t k = interior[idx];
            const RadialField& u = sf.fields[k];
            if (energies[k] < floor_e) {
                next[idx] = u;
                next_e[idx] = energies[k];
                return;
            }
            const RadialField Tu = tilde_T(model, u);
            RadialField dir(u.size());
            for (std::size_t c = 0; c < u.size(); ++c) dir[c] = Tu[c] - u[c];
            double alpha = steps[k];
            while (alpha >= 1e-8) {
                RadialField trial(u.size());
                for (std::size_t c = 0; c < u.size(); ++c)
                    trial[c] = u[c] + alpha * dir[c];
                trial = cone_project(grid, trial);
                const double e = model.energy(trial);
                if (e <= energies[k]) {
                    next[idx] = std::move(trial);
                    next_e[idx] = e;
                    steps[k] = std::min(1.0, alpha * 1.5);
                    return;
                }
                alpha *= 0.5;
            }
            next[idx] = u;  // node already at its line-search floor
            next_e[idx] = energies[k];
            steps[k] = 1.0;
        });
        for (std::size_t idx = 0; idx < interior.size(); ++idx) {
            sf.fields[interior[idx]] = std::move(next[idx]);
            energies[interior[idx]] = next_e[idx];
        }

        auto [m, arg] = box_max();
        est.max_history.push_back(m);
        est.sweeps = sweep + 1;
        if (m < est.d_q) {
            est.d_q = m;
            est.argmax = sf.fields[arg];
        }
        if (est.max_history.size() > 20) {
            const double prev = est.max_history[est.max_history.size() - 21];
            if (std::abs(prev - m) <= 1e-8 * std::max(1.0, std::abs(m))) break;
        }
    }
    return est;
}

/**
 * Miranda-style certificate that the surface still crosses the Nehari set
 * at W^{1,p} distance delta from the constant: searches for a grid cell on
 * which F = ||h_q(gamma) gamma - 1|| - delta changes sign along s and
 * G = Nehari residual changes sign along t, with the required orientations.
 */
inline std::optional<std::pair<std::size_t, std::size_t>> miranda_crossing(
    const EnergyModel& model, const PathSurface& sf, double delta) {
    const RadialGrid& grid = model.grid();
    const double p = model.params().p;
    const std::size_t nt = sf.t_nodes.size(), ns = sf.s_nodes.size();

    std::vector<double> F(nt * ns), G(nt * ns);
    parallel_for(nt * ns, [&](std::size_t k) {
        const RadialField& g = sf.fields[k];
        G[k] = model.nehari_residual(g);
        if (sup_norm(g) < 1e-12) {  // collapsed node, no Nehari ray through it
            F[k] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        try {
            RadialField w = model.nehari_project(g).field;
            for (std::size_t c = 0; c < w.size(); ++c) w[c] -= 1.0;
            F[k] = w1p_norm(grid, w, p) - delta;
        } catch (const std::exception&) {
            F[k] = std::numeric_limits<double>::quiet_NaN();
        }
    });

    for (std::size_t i = 0; i + 1 < nt; ++i)
        for (std::size_t j = 0; j + 1 < ns; ++j) {
            const std::size_t a = i * ns + j, b = i * ns + j + 1;
            const std::size_t c = (i + 1) * ns + j, d = (i + 1) * ns + j + 1;
            const bool f_cross = F[a] < 0.0 && F[c] < 0.0 && F[b] > 0.0 && F[d] > 0.0;
            const bool g_cross = G[a] > 0.0 && G[b] > 0.0 && G[c] < 0.0 && G[d] < 0.0;
            if (f_cross && g_cross) return std::make_pair(i, j);
        }
    return std::nullopt;
}

/**
 * Newton polish of the estimated saddle. Returns a record only when the
 * refinement converges to a nonconstant cone field with I > I(1); otherwise
 * nullopt (the caller still has the d_q estimate).
 */
inline std::optional<SolutionRecord> refine_vq(const EnergyModel& model,
                                               const RadialField& argmax) {
    const RadialGrid& grid = model.grid();
    RadialField v;
    try {
        v = newton_refine(model, argmax, 1e-12, 80);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (!in_cone(v, 1e-10)) return std::nullopt;
    const double e1 = model.energy(constant_field(grid, 1.0));
    SolutionRecord rec = make_record(model, v, Provenance::mountain_pass);
    if (!(rec.energy > e1)) return std::nullopt;
    if (sup_distance(v, constant_field(grid, rec.u1)) < 1e-10) return std::nullopt;
    if (!record_accepted(rec)) return std::nullopt;
    return rec;
}

}  // namespace radpl
