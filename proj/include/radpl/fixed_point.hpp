#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "radpl/energy.hpp"

namespace radpl {

/// One row of an iteration trace (streamed as CSV when requested).
struct FlowTraceRow {
    int iter;
    double energy;
    double residual_norm;
    double step;
};

struct FlowState {
    RadialField u;
    double energy = 0.0;
    double residual_norm = 0.0;  // ||u - tilde_T(u)||_{W^{1,p}}
    double step = 1.0;
    int iter = 0;
    bool converged = false;
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;

/**
 * Assemble the tridiagonal J = S^T diag(mu_c c_c) S + diag(d_j) for the
 * cell-slope stencil S of the grid; c has one entry per cell, d per node.
 */
inline SpMat assemble_jacobian(const RadialGrid& grid, const std::vector<double>& c,
                               const std::vector<double>& d) {
    const std::size_t n = grid.size();
    const std::size_t M = grid.M();
    const double h = grid.h();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * M + n);
    for (std::size_t cc = 0; cc < M; ++cc) {
        const double k = grid.cell_measures()[cc] * c[cc] / (h * h);
        trip.emplace_back(cc, cc, k);
        trip.emplace_back(cc + 1, cc + 1, k);
        trip.emplace_back(cc, cc + 1, -k);
        trip.emplace_back(cc + 1, cc, -k);
    }
    for (std::size_t j = 0; j < n; ++j) trip.emplace_back(j, j, d[j]);
    SpMat J(static_cast<int>(n), static_cast<int>(n));
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

inline double weak_max_norm(const RadialField& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace detail

/**
 * Solve the radial Neumann problem
 *   -(r^{N-1} psi_p(v'))' / r^{N-1} + |v|^{p-2} v = w,  v'(1) = 0,
 * by damped Newton on the regularized discrete weak form. The returned
 * field drives the weak residual below 1e-12 relative to the data scale
 * (1e-10 enforced); throws on non-convergence.
 */
inline RadialField solve_T(const EnergyModel& model, const RadialField& rhs,
                           int max_iter = 60) {
    const RadialGrid& grid = model.grid();
    grid.check_field(rhs);
    const double p = model.params().p;
    const double eps = model.eps_reg();
    const std::size_t n = grid.size();

    // The T-equation is the optimality system of the strictly convex
    //   J(v) = int ( |v'|_eps^p / p + |v|_eps^p / p - w v ),
    // so Newton with a line search on J converges from any start.
    auto objective = [&](const RadialField& v) {
        const std::vector<double> sl = grid.cell_slopes(v);
        double s = 0.0;
        for (std::size_t c = 0; c < sl.size(); ++c)
            s += grid.cell_measures()[c] *
                 std::pow(sl[c] * sl[c] + eps * eps, 0.5 * p) / p;
        for (std::size_t j = 0; j < n; ++j)
            s += grid.weights()[j] *
                 (std::pow(v[j] * v[j] + eps * eps, 0.5 * p) / p - rhs[j] * v[j]);
        return s;
    };
    auto residual = [&](const RadialField& v) {
        std::vector<double> a = grid.cell_slopes(v);
        for (std::size_t c = 0; c < a.size(); ++c)
            a[c] = grid.cell_measures()[c] * psi_p_reg(a[c], p, eps);
        RadialField r = grid.cell_slopes_transpose(a);
        for (std::size_t j = 0; j < n; ++j)
            r[j] += grid.weights()[j] * (psi_p_reg(v[j], p, eps) - rhs[j]);
        return r;
    };

    // initial guess from the zeroth-order balance |v|^{p-2} v = w
    RadialField v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = rhs[j];
        v[j] = (s == 0.0) ? 0.0
                          : std::copysign(std::pow(std::abs(s), 1.0 / (p - 1.0)), s);
    }

    // tolerances relative to the data scale (rhs can reach f_q(s0) ~ s0^{q-1})
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j)
        scale = std::max(scale, grid.weights()[j] * std::abs(rhs[j]));
    const double target = 1e-12 * scale;

    RadialField r = residual(v);
    double rnorm = detail::weak_max_norm(r);
    double obj = objective(v);
    for (int it = 0; it < max_iter && rnorm > target; ++it) {
        const std::vector<double> sl = grid.cell_slopes(v);
        std::vector<double> c(sl.size()), d(n);
        for (std::size_t i = 0; i < sl.size(); ++i) c[i] = psi_p_reg_prime(sl[i], p, eps);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = grid.weights()[i] * psi_p_reg_prime(v[i], p, eps);
        detail::SpMat J = detail::assemble_jacobian(grid, c, d);
        Eigen::SparseLU<detail::SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_T: singular Newton system");
        Eigen::VectorXd b(n);
        for (std::size_t j = 0; j < n; ++j) b[j] = -r[j];
        const Eigen::VectorXd dx = lu.solve(b);

        double damping = 1.0;
        bool accepted = false;
        while (damping >= 1e-10) {
            RadialField trial = v;
            for (std::size_t j = 0; j < n; ++j) trial[j] += damping * dx[j];
            const double ot = objective(trial);
            // near the minimum the objective decrement ~ rnorm^2 drops below
            // roundoff, so also accept plain residual decrease
            RadialField rt = residual(trial);
            const double rn = detail::weak_max_norm(rt);
            if (ot < obj || rn < rnorm) {
                v = std::move(trial);
                obj = ot;
                r = std::move(rt);
                rnorm = rn;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) break;  // at the roundoff floor of both criteria
    }
    if (rnorm > 100.0 * target)
        throw std::runtime_error("solve_T: Newton did not reach the residual tolerance");
    return v;
}

/// tilde_T(u) = T(f_q(u)).
inline RadialField tilde_T(const EnergyModel& model, const RadialField& u) {
    const TruncatedNonlinearity& fq = model.nonlinearity();
    RadialField rhs(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = fq.f(u[i]);
    return solve_T(model, rhs);
}

/**
 * Descent flow in the cone: iterate
 *   u <- cone_project(u + step (tilde_T(u) - u))
 * with backtracking so the (unregularized) energy never increases.
 * Terminates when ||u - tilde_T(u)||_{W^{1,p}} < stop or at max_iter;
 * the returned state records which.
 */
inline FlowState descend(const EnergyModel& model, const RadialField& u0, double stop,
                         int max_iter,
                         const std::function<void(const FlowTraceRow&)>& trace = {}) {
    const RadialGrid& grid = model.grid();
    FlowState st;
    st.u = cone_project(grid, u0);
    st.energy = model.energy(st.u);
    st.step = 1.0;

    const double p = model.params().p;
    for (st.iter = 0; st.iter <= max_iter; ++st.iter) {
        const RadialField Tu = tilde_T(model, st.u);
        RadialField dir(Tu.size());
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = Tu[i] - st.u[i];
        st.residual_norm = w1p_norm(grid, dir, p);
        if (trace) trace({st.iter, st.energy, st.residual_norm, st.step});
        if (st.residual_norm < stop) {
            st.converged = true;
            return st;
        }
        if (st.iter == max_iter) break;

        bool accepted = false;
        double alpha = st.step;
        while (alpha >= 1e-6) {
            RadialField trial(st.u.size());
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] = st.u[i] + alpha * dir[i];
            trial = cone_project(grid, trial);
            const double e = model.energy(trial);
            if (e <= st.energy) {
                st.u = std::move(trial);
                st.energy = e;
                st.step = std::min(1.0, alpha * 1.5);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // stalled at the step floor
    }
    st.converged = false;
    return st;
}

/**
 * Damped Newton on the full nonlinear weak residual (gradient of I_q),
 * used to polish near-critical points. Returns the refined field; throws
 * when the residual cannot be driven to tol.
 */
inline RadialField newton_refine(const EnergyModel& model, const RadialField& seed,
                                 double tol = 1e-12, int max_iter = 60) {
    const RadialGrid& grid = model.grid();
    const double p = model.params().p;
    const double eps = model.eps_reg();
    const TruncatedNonlinearity& fq = model.nonlinearity();
    const std::size_t n = grid.size();

    RadialField v = seed;
    RadialField r = model.weak_residual(v);
    double rnorm = detail::weak_max_norm(r);
    // the weak residual carries the quadrature weights, so measure it
    // against the weighted size of its own terms
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j)
        scale = std::max(scale, grid.weights()[j] * std::abs(fq.f(v[j])));
    const double target = tol * scale;
    double damping = 1.0;
    for (int it = 0; it < max_iter && rnorm > target; ++it) {
        const std::vector<double> sl = grid.cell_slopes(v);
        std::vector<double> c(sl.size()), d(n);
        for (std::size_t i = 0; i < sl.size(); ++i) c[i] = psi_p_reg_prime(sl[i], p, eps);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = grid.weights()[i] *
                   ((p - 1.0) * std::pow(v[i] * v[i] + eps * eps, 0.5 * (p - 2.0)) -
                    fq.f_prime(v[i]));
        detail::SpMat J = detail::assemble_jacobian(grid, c, d);
        Eigen::SparseLU<detail::SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("newton_refine: singular Newton system");
        Eigen::VectorXd b(n);
        for (std::size_t j = 0; j < n; ++j) b[j] = -r[j];
        const Eigen::VectorXd dx = lu.solve(b);

        bool accepted = false;
        while (damping >= 1e-8) {
            RadialField trial = v;
            for (std::size_t j = 0; j < n; ++j) trial[j] += damping * dx[j];
            RadialField rt = model.weak_residual(trial);
            const double rn = detail::weak_max_norm(rt);
            if (rn < rnorm) {
                v = std::move(trial);
                r = std::move(rt);
                rnorm = rn;
                accepted = true;
                damping = std::min(1.0, damping * 2.0);
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) break;
    }
    if (rnorm > 100.0 * target) {
        std::ostringstream msg;
        msg << "newton_refine: stalled at residual " << rnorm << " (target " << target << ")";
        throw std::runtime_error(msg.str());
    }
    return v;
}

}  // namespace radpl
