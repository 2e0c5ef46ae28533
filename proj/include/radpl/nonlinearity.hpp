#pragma once

#include <cmath>

#include "radpl/params.hpp"

namespace radpl {

namespace detail {
// s^e for s > 0 via exp/log; large q sweeps need exponents of order 500.
inline double pow_pos(double s, double e) {
    if (s <= 0.0) return e > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp(e * std::log(s));
}
}  // namespace detail

/**
 * The C^1 truncated nonlinearity
 *   f_q(s) = s^{q-1}                                        on [0, s0],
 *   f_q(s) = s0^{q-1} + (q-1)/(ell-1) s0^{q-ell} (s^{ell-1} - s0^{ell-1})
 *                                                           on (s0, inf),
 * extended by zero on (-inf, 0), together with its closed-form
 * antiderivative F_q and the shifted antiderivative Phi = F_q - F_q(1).
 */
class TruncatedNonlinearity {
public:
    explicit TruncatedNonlinearity(const ProblemParams& params) : pp_(params) {}

    const ProblemParams& params() const { return pp_; }

    double f(double s) const {
        if (s <= 0.0) return 0.0;
        const double q = pp_.q, ell = pp_.ell, s0 = pp_.s0;
        if (s <= s0) return detail::pow_pos(s, q - 1.0);
        const double c = (q - 1.0) / (ell - 1.0);
        return detail::pow_pos(s0, q - 1.0) +
               c * (detail::pow_pos(s0, q - ell) * detail::pow_pos(s, ell - 1.0) -
                    detail::pow_pos(s0, q - 1.0));
    }

    double f_prime(double s) const {
        if (s <= 0.0) return 0.0;
        const double q = pp_.q, ell = pp_.ell, s0 = pp_.s0;
        if (s <= s0) return (q - 1.0) * detail::pow_pos(s, q - 2.0);
        return (q - 1.0) * detail::pow_pos(s0, q - ell) * detail::pow_pos(s, ell - 2.0);
    }

    /// F_q(s) = int_0^s f_q, piecewise closed form, continuous at s0.
    double F(double s) const {
        if (s <= 0.0) return 0.0;
        const double q = pp_.q, ell = pp_.ell, s0 = pp_.s0;
        if (s <= s0) return detail::pow_pos(s, q) / q;
        const double c = (q - 1.0) / (ell - 1.0);
        const double F_s0 = detail::pow_pos(s0, q) / q;
        const double a = detail::pow_pos(s0, q - 1.0) - c * detail::pow_pos(s0, q - 1.0);
        const double b = c * detail::pow_pos(s0, q - ell);
        // beyond s0 the integrand is a + b t^{ell-1}
        return F_s0 + a * (s - s0) +
               b * (detail::pow_pos(s, ell) - detail::pow_pos(s0, ell)) / ell;
    }

    /// Phi(s) = F_q(s) - F_q(1), used by the shooting invariant H.
    double Phi(double s) const { return F(s) - F(1.0); }

private:
    ProblemParams pp_;
};

}  // namespace radpl
