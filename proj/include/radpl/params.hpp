#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace radpl {

/**
 * Problem parameters for the truncated radial p-Laplacian Neumann problem
 *   -div(|grad u|^{p-2} grad u) + u^{p-1} = f_q(u)  in B,  du/dn = 0 on dB,
 * with 1 < p < 2, q > 2 and a C^1 truncation of s^{q-1} above the
 * threshold s0, growing like s^{ell-1} (Sobolev-subcritical).
 */
struct ProblemParams {
    double p;             // exponent of the operator, in (1,2)
    double q;             // nonlinearity exponent, > 2
    int N;                // space dimension, >= 1
    double ell;           // subcritical growth exponent, in (p, p*) and < q
    double s0;            // truncation threshold, > 2
    double ball_measure;  // |B|, volume of the unit ball in R^N
    double c_emb;         // configured embedding constant C(N,p)

    double p_prime() const { return p / (p - 1.0); }

    // Sobolev critical exponent; +inf when N <= p.
    double p_star() const {
        return static_cast<double>(N) > p
                   ? static_cast<double>(N) * p / (static_cast<double>(N) - p)
                   : std::numeric_limits<double>::infinity();
    }
};

inline double unit_ball_volume(int N) {
    return std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

// Surface measure of the unit sphere S^{N-1}; equals 2 for N = 1.
inline double unit_sphere_measure(int N) {
    return static_cast<double>(N) * unit_ball_volume(N);
}

namespace detail {
[[noreturn]] inline void param_error(const std::string& what) {
    throw std::invalid_argument("invalid parameters: " + what);
}
}  // namespace detail

/**
 * Validate and build a ProblemParams. The truncation threshold defaults to
 *   s0 = max{ 2 + (p')^{1/p}, C_emb (1 + |B|^{1/p}) },
 * which keeps every cone solution strictly below s0 (checked a posteriori
 * on each accepted solution). Diagnostics name the violated inequality.
 */
inline ProblemParams make_params(double p, double q, int N, double ell,
                                 std::optional<double> s0_override = std::nullopt,
                                 double c_emb = 10.0) {
    std::ostringstream msg;
    if (!(p > 1.0 && p < 2.0)) {
        msg << "p = " << p << " violates 1 < p < 2";
        detail::param_error(msg.str());
    }
    if (!(q > 2.0)) {
        msg << "q = " << q << " violates q > 2";
        detail::param_error(msg.str());
    }
    if (N < 1) {
        msg << "N = " << N << " violates N >= 1";
        detail::param_error(msg.str());
    }
    if (!(ell > p)) {
        msg << "ell = " << ell << " violates ell > p (p = " << p << ")";
        detail::param_error(msg.str());
    }
    if (!(ell < q)) {
        msg << "ell = " << ell << " violates ell < q (q = " << q << ")";
        detail::param_error(msg.str());
    }
    const double pstar = static_cast<double>(N) > p
                             ? static_cast<double>(N) * p / (static_cast<double>(N) - p)
                             : std::numeric_limits<double>::infinity();
    if (!(ell < pstar)) {
        msg << "ell = " << ell << " violates ell < p* = " << pstar;
        detail::param_error(msg.str());
    }
    if (!(c_emb > 0.0)) {
        msg << "C_emb = " << c_emb << " violates C_emb > 0";
        detail::param_error(msg.str());
    }

    ProblemParams pp;
    pp.p = p;
    pp.q = q;
    pp.N = N;
    pp.ell = ell;
    pp.ball_measure = unit_ball_volume(N);
    pp.c_emb = c_emb;

    const double pprime = p / (p - 1.0);
    const double s0_floor =
        std::max(2.0 + std::pow(pprime, 1.0 / p),
                 c_emb * (1.0 + std::pow(pp.ball_measure, 1.0 / p)));
    if (s0_override) {
        if (!(*s0_override > 2.0)) {
            msg << "s0 = " << *s0_override << " violates s0 > 2";
            detail::param_error(msg.str());
        }
        pp.s0 = *s0_override;
    } else {
        pp.s0 = s0_floor;
    }
    return pp;
}

/// Default subcritical growth exponent: 3 when admissible, else (p+q)/2.
inline double default_ell(double p, double q) {
    return std::min(3.0, 0.5 * (p + q));
}

// L^infty a priori bound for cone solutions of the truncated problem.
inline double apriori_sup_bound(const ProblemParams& pp) {
    return 1.0 + std::pow(pp.p_prime(), 1.0 / pp.p);
}

// Matching bound on |u'|.
inline double apriori_slope_bound(const ProblemParams& pp) {
    return std::pow(pp.p_prime(), 1.0 / pp.p);
}

// Sharper bounds available for ground states (any q > 2).
inline double refined_sup_bound(const ProblemParams& pp) {
    return std::pow(pp.q / pp.p, 1.0 / (pp.q - pp.p));
}

inline double refined_slope_bound(const ProblemParams& pp) {
    return std::pow((pp.q - pp.p) / (pp.q * (pp.p - 1.0)), 1.0 / pp.p);
}

}  // namespace radpl
