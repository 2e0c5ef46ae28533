#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "radpl/params.hpp"

namespace radpl {

/// Nodal values of a radial function on the grid, values[i] = u(r_i).
using RadialField = std::vector<double>;

/**
 * Uniform grid on [0,1] with quadrature weights for
 *   int_B g dx = omega_{N-1} int_0^1 g(r) r^{N-1} dr.
 * Weights are the exact r^{N-1}-moments of the piecewise-linear hat basis,
 * so the rule integrates the linear interpolant exactly; in particular the
 * weights are positive and sum to |B| up to roundoff.
 */
class RadialGrid {
public:
    RadialGrid(int N, std::size_t M) : N_(N), M_(M) {
        if (N < 1) throw std::invalid_argument("RadialGrid: N >= 1 required");
        if (M < 4) throw std::invalid_argument("RadialGrid: M >= 4 required");
        h_ = 1.0 / static_cast<double>(M);
        nodes_.resize(M + 1);
        for (std::size_t i = 0; i <= M; ++i) nodes_[i] = static_cast<double>(i) * h_;
        nodes_.back() = 1.0;

        const double omega = unit_sphere_measure(N);
        weights_.assign(M + 1, 0.0);
        cell_measures_.assign(M, 0.0);
        // cell [r_i, r_{i+1}]: moments I_k = (r_{i+1}^k - r_i^k)/k, k = N, N+1
        for (std::size_t i = 0; i < M; ++i) {
            const double a = nodes_[i], b = nodes_[i + 1];
            const double In = (std::pow(b, N) - std::pow(a, N)) / N;
            const double In1 = (std::pow(b, N + 1) - std::pow(a, N + 1)) / (N + 1);
            weights_[i] += omega * (b * In - In1) / h_;
            weights_[i + 1] += omega * (In1 - a * In) / h_;
            cell_measures_[i] = omega * In;
        }
    }

    int dim() const { return N_; }
    /// omega_{N-1} int_{cell} r^{N-1} dr per cell; sums to |B|.
    const std::vector<double>& cell_measures() const { return cell_measures_; }
    std::size_t M() const { return M_; }
    std::size_t size() const { return M_ + 1; }
    double h() const { return h_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double ball_measure() const { return unit_ball_volume(N_); }

    /// int_B u dx; exact for constants.
    double integrate(const RadialField& u) const {
        check_field(u);
        double s = 0.0;
        for (std::size_t i = 0; i <= M_; ++i) s += weights_[i] * u[i];
        return s;
    }

    /**
     * Nodal derivative: central differences in the interior, u'(0) = 0 by
     * radial symmetry, second-order one-sided at r = 1.
     */
    RadialField derivative(const RadialField& u) const {
        check_field(u);
        RadialField du(M_ + 1, 0.0);
        for (std::size_t i = 1; i < M_; ++i) du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h_);
        du[M_] = (3.0 * u[M_] - 4.0 * u[M_ - 1] + u[M_ - 2]) / (2.0 * h_);
        return du;
    }

    /// Slopes of the linear interpolant, one per cell.
    std::vector<double> cell_slopes(const RadialField& u) const {
        check_field(u);
        std::vector<double> s(M_);
        for (std::size_t i = 0; i < M_; ++i) s[i] = (u[i + 1] - u[i]) / h_;
        return s;
    }

    /// Adjoint of cell_slopes: (S^T a)_j = (a_{j-1} - a_j)/h with a_{-1}=a_M=0.
    RadialField cell_slopes_transpose(const std::vector<double>& a) const {
        if (a.size() != M_) throw std::invalid_argument("cell array length mismatch");
        RadialField g(M_ + 1, 0.0);
        for (std::size_t c = 0; c < M_; ++c) {
            g[c] -= a[c] / h_;
            g[c + 1] += a[c] / h_;
        }
        return g;
    }

    /// Transpose of the derivative stencil, (D^T a)_j = sum_i a_i D_{ij}.
    RadialField derivative_transpose(const RadialField& a) const {
        check_field(a);
        RadialField g(M_ + 1, 0.0);
        for (std::size_t i = 1; i < M_; ++i) {
            g[i + 1] += a[i] / (2.0 * h_);
            g[i - 1] -= a[i] / (2.0 * h_);
        }
        g[M_] += 3.0 * a[M_] / (2.0 * h_);
        g[M_ - 1] -= 4.0 * a[M_] / (2.0 * h_);
        g[M_ - 2] += a[M_] / (2.0 * h_);
        return g;
    }

    void check_field(const RadialField& u) const {
        if (u.size() != M_ + 1)
            throw std::invalid_argument("field/grid length mismatch");
    }

private:
    int N_;
    std::size_t M_;
    double h_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> cell_measures_;
};

/// Membership test for the invariant cone: nonnegative and nondecreasing.
inline bool in_cone(const RadialField& u, double tol = 1e-12) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i]) || u[i] < -tol) return false;
        if (i > 0 && u[i] < u[i - 1] - tol) return false;
    }
    return true;
}

/**
 * Weighted L^2 projection onto the cone: pool-adjacent-violators isotonic
 * regression followed by clipping at zero. Idempotent.
 */
inline RadialField cone_project(const RadialGrid& grid, const RadialField& u) {
    grid.check_field(u);
    const std::vector<double>& w = grid.weights();
    const std::size_t n = u.size();
    // blocks carry (weighted mean, total weight, extent)
    std::vector<double> mean(n), wsum(n);
    std::vector<std::size_t> count(n);
    std::size_t top = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean[top] = u[i];
        wsum[top] = w[i];
        count[top] = 1;
        ++top;
        while (top > 1 && mean[top - 2] > mean[top - 1]) {
            const double tw = wsum[top - 2] + wsum[top - 1];
            mean[top - 2] = (wsum[top - 2] * mean[top - 2] + wsum[top - 1] * mean[top - 1]) / tw;
            wsum[top - 2] = tw;
            count[top - 2] += count[top - 1];
            --top;
        }
    }
    RadialField out(n);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < top; ++b)
        for (std::size_t k = 0; k < count[b]; ++k) out[pos++] = std::max(mean[b], 0.0);
    return out;
}

inline double sup_norm(const RadialField& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_distance(const RadialField& a, const RadialField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// int_B |u|^p dx.
inline double lp_norm_p(const RadialGrid& grid, const RadialField& u, double p) {
    grid.check_field(u);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += grid.weights()[i] * std::pow(std::abs(u[i]), p);
    return s;
}

/// int_B |u'|^p dx over the cells of the linear interpolant.
inline double grad_lp_norm_p(const RadialGrid& grid, const RadialField& u, double p) {
    const std::vector<double> s = grid.cell_slopes(u);
    double out = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c)
        out += grid.cell_measures()[c] * std::pow(std::abs(s[c]), p);
    return out;
}

/// int_B (|u'|^p + |u|^p) dx, the p-th power of the W^{1,p} norm.
inline double w1p_norm_p(const RadialGrid& grid, const RadialField& u, double p) {
    return grad_lp_norm_p(grid, u, p) + lp_norm_p(grid, u, p);
}

inline double w1p_norm(const RadialGrid& grid, const RadialField& u, double p) {
    return std::pow(w1p_norm_p(grid, u, p), 1.0 / p);
}

inline RadialField constant_field(const RadialGrid& grid, double c) {
    return RadialField(grid.size(), c);
}

}  // namespace radpl
