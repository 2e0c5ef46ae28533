#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "radpl/grid.hpp"
#include "radpl/nonlinearity.hpp"

namespace radpl {

/// (s^2 + eps^2)^{(p-2)/2} s, the regularized p-Laplacian flux.
inline double psi_p_reg(double s, double p, double eps) {
    return std::pow(s * s + eps * eps, 0.5 * (p - 2.0)) * s;
}

/// d/ds of psi_p_reg; positive for p > 1.
inline double psi_p_reg_prime(double s, double p, double eps) {
    const double t = s * s + eps * eps;
    return std::pow(t, 0.5 * (p - 4.0)) * ((p - 1.0) * s * s + eps * eps);
}

/// |s|^{p-2} s, continuous at 0 for p > 1.
inline double phi_p(double s, double p) {
    if (s == 0.0) return 0.0;
    return std::pow(std::abs(s), p - 1.0) * (s > 0.0 ? 1.0 : -1.0);
}

struct NehariProjection {
    double t;           // scaling h_q(u)
    RadialField field;  // t * u
};

/**
 * Discrete energy
 *   I_q(u) = int_B ( |u'|^p / p + |u|^p / p - F_q(u) ) dx
 * with nodal derivatives, together with its exact gradient (Riesz
 * representative against the discrete L^2 pairing), the Nehari residual
 * I_q'(u)[u] and the Nehari projection h_q.
 *
 * Reported energies use the unregularized integrand; the gradient is the
 * exact derivative of the eps-regularized energy (p < 2 makes the flux
 * singular where u' = 0, which happens at r = 0 on every radial field).
 */
class EnergyModel {
public:
    EnergyModel(const ProblemParams& params, const RadialGrid& grid,
                double eps_reg = 1e-8)
        : pp_(params), grid_(grid), fq_(params), eps_(eps_reg) {
        if (!(eps_ > 0.0)) throw std::invalid_argument("eps_reg > 0 required");
    }

    const ProblemParams& params() const { return pp_; }
    const RadialGrid& grid() const { return grid_; }
    const TruncatedNonlinearity& nonlinearity() const { return fq_; }
    double eps_reg() const { return eps_; }

    double energy(const RadialField& u) const {
        const double p = pp_.p;
        double s = grad_lp_norm_p(grid_, u, p) / p;
        for (std::size_t i = 0; i < u.size(); ++i)
            s += grid_.weights()[i] * (std::pow(std::abs(u[i]), p) / p - fq_.F(u[i]));
        return s;
    }

    /// Same functional with (|u'|^2 + eps^2)^{p/2} in place of |u'|^p.
    double energy_regularized(const RadialField& u) const {
        const double p = pp_.p;
        const std::vector<double> sl = grid_.cell_slopes(u);
        double s = 0.0;
        for (std::size_t c = 0; c < sl.size(); ++c)
            s += grid_.cell_measures()[c] *
                 std::pow(sl[c] * sl[c] + eps_ * eps_, 0.5 * p) / p;
        for (std::size_t i = 0; i < u.size(); ++i)
            s += grid_.weights()[i] * (std::pow(std::abs(u[i]), p) / p - fq_.F(u[i]));
        return s;
    }

    /**
     * Exact gradient of energy_regularized, divided pointwise by the
     * quadrature weights: <gradient(u), v>_{L^2,h} equals the directional
     * derivative of the energy at u along v.
     */
    RadialField gradient(const RadialField& u) const {
        RadialField r = weak_residual(u);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] /= grid_.weights()[j];
        return r;
    }

    /// Components of the discrete weak form (weights included).
    RadialField weak_residual(const RadialField& u) const {
        const double p = pp_.p;
        std::vector<double> a = grid_.cell_slopes(u);
        for (std::size_t c = 0; c < a.size(); ++c)
            a[c] = grid_.cell_measures()[c] * psi_p_reg(a[c], p, eps_);
        RadialField g = grid_.cell_slopes_transpose(a);
        for (std::size_t j = 0; j < u.size(); ++j)
            g[j] += grid_.weights()[j] * (phi_p(u[j], p) - fq_.f(u[j]));
        return g;
    }

    /// I_q'(u)[u] = ||u||_{W^{1,p}}^p - int_B f_q(u) u dx (unregularized).
    double nehari_residual(const RadialField& u) const {
        double s = w1p_norm_p(grid_, u, pp_.p);
        for (std::size_t i = 0; i < u.size(); ++i)
            s -= grid_.weights()[i] * fq_.f(u[i]) * u[i];
        return s;
    }

    /**
     * The unique t > 0 with t*u on the Nehari set, by bracketing and
     * bisection on the strictly decreasing map
     *   t -> ||u||^p - t^{1-p} int_B f_q(tu) u dx.
     * Throws if the bracket search escapes t = 10 s0 / ||u||_inf.
     */
    NehariProjection nehari_project(const RadialField& u) const {
        const double norm_p = w1p_norm_p(grid_, u, pp_.p);
        const double sup = sup_norm(u);
        if (!(norm_p > 0.0) || !(sup > 0.0))
            throw std::invalid_argument("nehari_project: nonzero cone field required");
        const double t_cap = 10.0 * pp_.s0 / sup;

        auto gap = [&](double t) {
            double s = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
                s += grid_.weights()[i] * fq_.f(t * u[i]) * u[i];
            return norm_p - s / std::pow(t, pp_.p - 1.0);
        };

        double lo = 1.0, hi = 1.0;
        if (gap(1.0) > 0.0) {
            while (gap(hi) > 0.0) {
                hi *= 2.0;
                if (hi > t_cap)
                    throw std::runtime_error("nehari_project: bracket exceeded 10 s0/||u||_inf");
            }
            lo = hi / 2.0;
        } else {
            while (gap(lo) <= 0.0) {
                lo *= 0.5;
                if (lo < 1e-300)
                    throw std::runtime_error("nehari_project: degenerate bracket toward 0");
            }
            hi = 2.0 * lo;
        }
        for (int it = 0; it < 200 && (hi - lo) > 1e-12 * lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) > 0.0 ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);

        // certify the sign change of I_q'(tu)[u] across t
        RadialField tu(u.size());
        auto scaled = [&](double tt) {
            for (std::size_t i = 0; i < u.size(); ++i) tu[i] = tt * u[i];
        };
        scaled(t * (1.0 - 1e-6));
        const double below = nehari_residual(tu);
        scaled(t * (1.0 + 1e-6));
        const double above = nehari_residual(tu);
        if (!(below > above))
            throw std::runtime_error("nehari_project: residual not decreasing across t");

        scaled(t);
        return NehariProjection{t, tu};
    }

private:
    ProblemParams pp_;
    const RadialGrid& grid_;
    TruncatedNonlinearity fq_;
    double eps_;
};

}  // namespace radpl
