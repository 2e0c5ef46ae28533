#pragma once

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "radpl/fixed_point.hpp"

namespace radpl {

/**
 * Result of integrating the radial IVP u(0) = d, u'(0) = 0 and reading the
 * Neumann mismatch u'(1). H_trace carries the monotonicity certificate
 *   H(r) = u'(r)^p / p' + Phi(u(r)),
 * which is nonincreasing along exact shots (constant when N = 1).
 */
struct ShotResult {
    double d = 0.0;
    RadialField u;
    double up_end = 0.0;
    bool monotone = false;
    bool overflow = false;
    double end_sign = 0.0;  // sign of u' at termination (bracketing aid)
    std::vector<double> H_trace;
};

struct BranchPoint {
    double q;
    double d;       // u(0)
    double u_end;   // u(1)
    double energy;  // I_q of the recorded field
    std::string label;  // lower | upper | constant
};

struct Branch {
    std::vector<BranchPoint> points;
    std::optional<double> fold_q;  // smallest q at which nonconstant roots were found
    bool complete = true;          // false when some q-steps failed and were skipped
};

namespace detail {

struct ShotRhs {
    double p, q, N;
    const TruncatedNonlinearity* fq;
    bool truncated;

    double f_used(double u) const {
        if (u <= 0.0) return 0.0;
        return truncated ? fq->f(u) : pow_pos(u, q - 1.0);
    }

    void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy,
                    double r) const {
        const double rn = std::pow(r, N - 1.0);
        const double mt = y[1] / rn;
        dy[0] = std::copysign(std::pow(std::abs(mt), 1.0 / (p - 1.0)), mt);
        dy[1] = rn * (phi_p(y[0], p) - f_used(y[0]));
    }
};

inline double slope_from_flux(double m, double r, double p, int N) {
    const double mt = m / std::pow(r, N - 1.0);
    return std::copysign(std::pow(std::abs(mt), 1.0 / (p - 1.0)), mt);
}

/**
 * Step a controlled stepper from r to r_target with explicit failure
 * guards (blow-ups shrink dt to nothing; integrate_adaptive would spin).
 * Returns false when the trajectory left the finite range.
 */
template <typename Stepper, typename Rhs>
bool guarded_advance(Stepper& stepper, const Rhs& rhs, std::array<double, 2>& y,
                     double& r, double r_target, double u_cap) {
    namespace ode = boost::numeric::odeint;
    double dt = (r_target - r) / 8.0;
    for (long steps = 0; r < r_target; ++steps) {
        if (steps > 2000000) return false;
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > u_cap)
            return false;
        if (dt > r_target - r) dt = r_target - r;
        const auto rc = stepper.try_step(rhs, y, r, dt);
        if (rc == ode::fail && dt < 1e-15) return false;
    }
    return std::isfinite(y[0]) && std::isfinite(y[1]) && std::abs(y[0]) <= u_cap;
}

}  // namespace detail

/**
 * Integrate (r^{N-1} psi_p(u'))' = r^{N-1} (u^{p-1} - f(u)) from r = 0 with
 * u(0) = d, u'(0) = 0. Below r0 = 10 h the leading-order expansion
 *   u'(r) ~ sign(g) |r g / N|^{1/(p-1)},  g = d^{p-1} - f(d),
 * is used; adaptive Runge-Kutta (Dormand-Prince, tol 1e-12) on [r0, 1].
 * f is the raw power u^{q-1} or the truncation f_q per flag.
 */
inline ShotResult shoot(double d, const ProblemParams& params, const RadialGrid& grid,
                        bool use_truncation = false, bool record_field = true) {
    namespace ode = boost::numeric::odeint;
    if (!(d > 0.0)) throw std::invalid_argument("shoot: d > 0 required");

    const double p = params.p;
    const int N = params.N;
    TruncatedNonlinearity fq(params);
    detail::ShotRhs rhs{p, params.q, static_cast<double>(N), &fq, use_truncation};

    ShotResult res;
    res.d = d;
    const std::size_t M = grid.M();
    if (record_field) {
        res.u.assign(M + 1, std::numeric_limits<double>::quiet_NaN());
        res.H_trace.assign(M + 1, std::numeric_limits<double>::quiet_NaN());
    }

    // H is conserved (N = 1) / nonincreasing (N >= 2) for the potential of the
    // full right-hand side f(s) - s^{p-1}, not of f alone.
    auto phi_of = [&](double s) {
        const double F_part =
            use_truncation
                ? fq.Phi(s)
                : (s > 0.0 ? detail::pow_pos(s, params.q) / params.q : 0.0) -
                      1.0 / params.q;
        return F_part - (std::pow(std::abs(s), p) - 1.0) / p;
    };
    auto record = [&](std::size_t i, double u, double up) {
        if (!record_field) return;
        res.u[i] = u;
        res.H_trace[i] = std::pow(std::abs(up), p) / params.p_prime() + phi_of(u);
    };

    const double g = phi_p(d, p) - rhs.f_used(d);
    if (std::abs(g) < 1e-300) {  // constant shot (d = 1 or a fixed point of f)
        if (record_field)
            for (std::size_t i = 0; i <= M; ++i) record(i, d, 0.0);
        res.up_end = 0.0;
        res.monotone = true;
        return res;
    }

    const double r0 = 10.0 * grid.h();
    const double pprime = params.p_prime();
    auto series_u = [&](double r) {
        return d + std::copysign(std::pow(std::abs(g) / N, 1.0 / (p - 1.0)), g) *
                       std::pow(r, pprime) / pprime;
    };
    auto series_up = [&](double r) {
        const double v = r * g / N;
        return std::copysign(std::pow(std::abs(v), 1.0 / (p - 1.0)), v);
    };

    std::array<double, 2> y{series_u(r0), std::pow(r0, N) * g / N};
    if (record_field)
        for (std::size_t i = 0; i <= M && grid.nodes()[i] <= r0; ++i)
            record(i, series_u(grid.nodes()[i]), series_up(grid.nodes()[i]));

    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<std::array<double, 2>>>(
        1e-12, 1e-12);
    constexpr double u_cap = 1e4;

    double r = r0;
    bool blew = false;
    auto advance_to = [&](double r_target) {
        if (blew || r_target <= r) return;
        if (!detail::guarded_advance(stepper, rhs, y, r, r_target, u_cap)) blew = true;
        r = r_target;
    };

    if (record_field) {
        for (std::size_t i = 0; i <= M; ++i) {
            const double ri = grid.nodes()[i];
            if (ri <= r0) continue;
            advance_to(ri);
            if (blew) break;
            record(i, y[0], detail::slope_from_flux(y[1], ri, p, N));
        }
    } else {
        advance_to(1.0);
    }

    if (blew) {
        res.overflow = true;
        res.up_end = std::numeric_limits<double>::quiet_NaN();
        res.end_sign = std::isfinite(y[1]) ? (y[1] >= 0.0 ? 1.0 : -1.0)
                                           : (y[0] > 0.0 ? 1.0 : -1.0);
        res.monotone = false;
        return res;
    }

    res.up_end = detail::slope_from_flux(y[1], 1.0, p, N);
    res.end_sign = res.up_end >= 0.0 ? 1.0 : -1.0;
    if (record_field) {
        // tolerance relative to the oscillation amplitude: roots close to the
        // constant have dips far below any fixed tolerance
        double lo = res.u[0], hi = res.u[0];
        for (double v : res.u) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        res.monotone = in_cone(res.u, 1e-4 * (hi - lo) + 1e-12);
    } else {
        res.monotone = false;
    }
    return res;
}

/**
 * Scan u'(1; d) for sign changes over d_range, bisect each bracket to
 * |u'(1)| < 1e-10, deduplicate roots closer than 1e-8. An empty result is
 * a valid outcome.
 */
inline std::vector<ShotResult> find_neumann_roots(const ProblemParams& params,
                                                  const RadialGrid& grid, double d_lo,
                                                  double d_hi, int n_scan,
                                                  bool use_truncation = false) {
    if (!(d_lo > 0.0 && d_hi > d_lo))
        throw std::invalid_argument("find_neumann_roots: bad d range");

    auto mismatch = [&](double d) {
        ShotResult s = shoot(d, params, grid, use_truncation, /*record_field=*/false);
        if (s.overflow) return s.end_sign * 1e30;
        return s.up_end;
    };

    std::vector<double> roots;
    double prev_d = d_lo, prev_v = mismatch(d_lo);
    for (int k = 1; k <= n_scan; ++k) {
        const double dk = d_lo + (d_hi - d_lo) * static_cast<double>(k) / n_scan;
        const double vk = mismatch(dk);
        if ((prev_v < 0.0) != (vk < 0.0)) {
            double a = prev_d, b = dk, fa = prev_v;
            double mid = 0.5 * (a + b);
            for (int it = 0; it < 200; ++it) {
                mid = 0.5 * (a + b);
                const double fm = mismatch(mid);
                if (std::abs(fm) < 1e-10 || (b - a) < 1e-13 * std::max(1.0, mid)) break;
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(mid);
        }
        prev_d = dk;
        prev_v = vk;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<ShotResult> out;
    for (double d : roots) {
        if (!out.empty() && std::abs(d - out.back().d) < 1e-8) continue;
        out.push_back(shoot(d, params, grid, use_truncation));
    }
    return out;
}

/**
 * The monotone root closest to the constant, searched in the coordinate
 * lg = -log10(1 - d): the second branch approaches d = 1 exponentially in
 * q (half-periods scale like (1-d)^{(p-2)/p} for p < 2), so a linear scan
 * in d cannot see it. Brackets whose mismatch values sit at the integration
 * noise floor are rejected; nullopt means "not resolvable in doubles",
 * which genuinely happens for large q.
 */
inline std::optional<ShotResult> find_upper_root(const ProblemParams& params,
                                                 const RadialGrid& grid,
                                                 double lg_lo = 1.0, double lg_hi = 12.5,
                                                 int n_scan = 46) {
    auto mismatch = [&](double lg) {
        const double d = 1.0 - std::pow(10.0, -lg);
        ShotResult s = shoot(d, params, grid, false, false);
        if (s.overflow) return s.end_sign * 1e30;
        return s.up_end;
    };
    constexpr double noise_floor = 5e-13;

    std::optional<ShotResult> best;
    double prev_lg = lg_lo, prev_v = mismatch(lg_lo);
    for (int k = 1; k <= n_scan; ++k) {
        const double lg = lg_lo + (lg_hi - lg_lo) * static_cast<double>(k) / n_scan;
        const double v = mismatch(lg);
        const bool crossing = (prev_v < 0.0) != (v < 0.0);
        const bool resolved = std::min(std::abs(prev_v), std::abs(v)) > noise_floor;
        if (crossing && resolved) {
            double a = prev_lg, b = lg, fa = prev_v;
            for (int it = 0; it < 100 && b - a > 1e-11; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = mismatch(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double d = 1.0 - std::pow(10.0, -0.5 * (a + b));
            ShotResult s = shoot(d, params, grid);
            double ulo = s.u[0], uhi = s.u[0];
            for (double uv : s.u) {
                ulo = std::min(ulo, uv);
                uhi = std::max(uhi, uv);
            }
            // multi-bump roots also accumulate at d = 1 (kept out by the cone
            // test), and below ~1e3x the integrator tolerance a root cannot be
            // told apart from the constant
            if (s.monotone && uhi - ulo > 1e-9 && (!best || d > best->d))
                best = std::move(s);
        }
        prev_lg = lg;
        prev_v = v;
    }
    return best;
}

/**
 * Sweep q over [q_lo, q_hi]; emits the nonconstant monotone branches plus
 * the constant line and records the smallest q at which nonconstant roots
 * exist. The lower branch is scanned linearly in d, the upper branch in
 * lg = -log10(1 - d); the upper branch ends where it becomes numerically
 * indistinguishable from the constant.
 */
inline Branch trace_branch(double p, int N, double ell_hint, const RadialGrid& grid,
                           double q_lo, double q_hi, int q_steps) {
    Branch br;
    double d_lower = -1.0;

    auto mismatch = [&](const ProblemParams& pp, double d) {
        ShotResult s = shoot(d, pp, grid, false, false);
        if (s.overflow) return s.end_sign * 1e30;
        return s.up_end;
    };

    // refine the lower root near d_guess by expanding a bracket; -1 when lost
    auto track = [&](const ProblemParams& pp, double d_guess) -> double {
        double w = 2e-3;
        for (int grow = 0; grow < 12; ++grow, w *= 2.0) {
            double a = std::max(1e-6, d_guess - w);
            double b = std::min(1.0 - 1e-9, d_guess + w);
            double fa = mismatch(pp, a), fb = mismatch(pp, b);
            if ((fa < 0.0) == (fb < 0.0)) continue;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = mismatch(pp, mid);
                if (std::abs(fm) < 1e-10 || (b - a) < 1e-13) return mid;
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        return -1.0;
    };

    for (int k = 0; k <= q_steps; ++k) {
        const double q = q_lo + (q_hi - q_lo) * static_cast<double>(k) / q_steps;
        try {
        const double ell = std::min(ell_hint, 0.5 * (p + q));
        const ProblemParams pp = make_params(p, q, N, ell);
        EnergyModel model(pp, grid);

        std::optional<ShotResult> lower;
        if (d_lower > 0.0) {
            const double dl = track(pp, d_lower);
            if (dl > 0.0) {
                ShotResult s = shoot(dl, pp, grid);
                if (s.monotone) lower = std::move(s);
            }
        }
        if (!lower) {
            auto roots = find_neumann_roots(pp, grid, 1e-3, 1.0 - 1e-3, 300);
            for (auto& s : roots)
                if (s.monotone && (!lower || s.d < lower->d)) lower = std::move(s);
        }
        std::optional<ShotResult> upper = find_upper_root(pp, grid);
        if (lower && upper && upper->d - lower->d < 1e-10) upper.reset();

        if (lower) {
            if (!br.fold_q) br.fold_q = q;
            d_lower = lower->d;
            br.points.push_back(
                {q, lower->d, lower->u.back(), model.energy(lower->u), "lower"});
        } else {
            d_lower = -1.0;
        }
        if (upper)
            br.points.push_back(
                {q, upper->d, upper->u.back(), model.energy(upper->u), "upper"});
        br.points.push_back(
            {q, 1.0, 1.0, model.energy(constant_field(grid, 1.0)), "constant"});
        } catch (const std::exception&) {
            // keep the points gathered so far; the sweep is reported partial
            br.complete = false;
            d_lower = -1.0;
        }
    }
    return br;
}

/**
 * Limit profile G: shooting on -(r^{N-1} psi_p(G'))' / r^{N-1} + G^{p-1} = 0
 * with G'(0) = 0, bisecting d in (0, 1] until G(1; d) = 1. G(1; d) is
 * strictly increasing in d, so (0, 1] brackets the root.
 */
inline RadialField solve_G(const ProblemParams& params, const RadialGrid& grid) {
    // reuse the shot machinery with f == 0 by sending q -> the raw power with
    // a zero right-hand side: integrate directly here instead.
    namespace ode = boost::numeric::odeint;
    const double p = params.p;
    const int N = params.N;

    auto rhs = [&](const std::array<double, 2>& y, std::array<double, 2>& dy, double r) {
        const double rn = std::pow(r, N - 1.0);
        const double mt = y[1] / rn;
        dy[0] = std::copysign(std::pow(std::abs(mt), 1.0 / (p - 1.0)), mt);
        dy[1] = rn * phi_p(y[0], p);
    };

    const double r0 = 10.0 * grid.h();
    const double pprime = params.p_prime();
    const std::size_t M = grid.M();

    auto integrate = [&](double d, RadialField* field) {
        const double g = phi_p(d, p);  // m ~ r^N g / N near 0
        auto series_u = [&](double r) {
            return d + std::pow(g / N, 1.0 / (p - 1.0)) * std::pow(r, pprime) / pprime;
        };
        std::array<double, 2> y{series_u(r0), std::pow(r0, N) * g / N};
        if (field)
            for (std::size_t i = 0; i <= M && grid.nodes()[i] <= r0; ++i)
                (*field)[i] = series_u(grid.nodes()[i]);
        auto stepper =
            ode::make_controlled<ode::runge_kutta_dopri5<std::array<double, 2>>>(1e-12,
                                                                                 1e-12);
        double r = r0;
        for (std::size_t i = 0; i <= M; ++i) {
            const double ri = grid.nodes()[i];
            if (ri <= r0) continue;
            if (!field && ri < 1.0) continue;
            if (!detail::guarded_advance(stepper, rhs, y, r, ri, 1e6))
                throw std::runtime_error("solve_G: integration failure");
            r = ri;
            if (field) (*field)[i] = y[0];
        }
        return y[0];
    };

    double lo = 1e-8, hi = 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (integrate(mid, nullptr) < 1.0 ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    RadialField G(M + 1, 0.0);
    integrate(d, &G);
    if (std::abs(G.back() - 1.0) > 1e-8)
        throw std::runtime_error("solve_G: bisection failed to match G(1) = 1");
    G.back() = 1.0;
    return G;
}

/**
 * Independent route to G: Newton on the optimality system of the convex
 * functional ||v||_{W^{1,p}}^p / p with the Dirichlet constraint v(1) = 1.
 */
inline RadialField solve_G_variational(const ProblemParams& params,
                                       const RadialGrid& grid, double eps = 1e-8,
                                       int max_iter = 80) {
    const double p = params.p;
    const std::size_t n = grid.size();
    const std::size_t M = grid.M();

    auto residual = [&](const RadialField& v) {
        std::vector<double> a = grid.cell_slopes(v);
        for (std::size_t c = 0; c < a.size(); ++c)
            a[c] = grid.cell_measures()[c] * psi_p_reg(a[c], p, eps);
        RadialField r = grid.cell_slopes_transpose(a);
        for (std::size_t j = 0; j < n; ++j) r[j] += grid.weights()[j] * phi_p(v[j], p);
        r[M] = 0.0;  // Dirichlet row
        return r;
    };

    RadialField v(n, 1.0);
    RadialField r = residual(v);
    double rnorm = detail::weak_max_norm(r);
    for (int it = 0; it < max_iter && rnorm > 1e-12; ++it) {
        const std::vector<double> sl = grid.cell_slopes(v);
        std::vector<double> c(sl.size()), dd(n);
        for (std::size_t i = 0; i < sl.size(); ++i)
            c[i] = psi_p_reg_prime(sl[i], p, eps);
        for (std::size_t i = 0; i < n; ++i)
            dd[i] = grid.weights()[i] * (p - 1.0) *
                    std::pow(v[i] * v[i] + eps * eps, 0.5 * (p - 2.0));
        detail::SpMat J = detail::assemble_jacobian(grid, c, dd);
        // pin v(1) = 1
        for (int k = 0; k < J.outerSize(); ++k)
            for (detail::SpMat::InnerIterator itJ(J, k); itJ; ++itJ)
                if (itJ.row() == static_cast<int>(M))
                    itJ.valueRef() = (itJ.col() == static_cast<int>(M)) ? 1.0 : 0.0;
        Eigen::SparseLU<detail::SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_G_variational: singular system");
        Eigen::VectorXd b(n);
        for (std::size_t j = 0; j < n; ++j) b[j] = -r[j];
        const Eigen::VectorXd dx = lu.solve(b);
        double damping = 1.0;
        while (damping >= 1e-8) {
            RadialField trial = v;
            for (std::size_t j = 0; j < n; ++j) trial[j] += damping * dx[j];
            trial[M] = 1.0;
            RadialField rt = residual(trial);
            const double rn = detail::weak_max_norm(rt);
            if (rn < rnorm) {
                v = std::move(trial);
                r = std::move(rt);
                rnorm = rn;
                break;
            }
            damping *= 0.5;
        }
        if (damping < 1e-8) break;
    }
    if (rnorm > 1e-10)
        throw std::runtime_error("solve_G_variational: Newton stalled");
    return v;
}

}  // namespace radpl
