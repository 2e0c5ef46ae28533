#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "radpl/grid.hpp"

using namespace radpl;

TEST_CASE("quadrature weights sum to the ball volume") {
    for (int N : {1, 2, 3}) {
        RadialGrid grid(N, 64);
        double s = 0.0;
        for (double w : grid.weights()) s += w;
        CHECK(std::abs(s - unit_ball_volume(N)) < 1e-12);
        double cm = 0.0;
        for (double c : grid.cell_measures()) cm += c;
        CHECK(std::abs(cm - unit_ball_volume(N)) < 1e-12);
    }
}

TEST_CASE("quadrature is exact on the linear interpolant") {
    for (int N : {1, 3}) {
        RadialGrid grid(N, 50);
        RadialField lin(grid.size());
        for (std::size_t i = 0; i < lin.size(); ++i)
            lin[i] = 2.0 - 3.0 * grid.nodes()[i];
        // int_B (2 - 3r) dx = omega (2/N - 3/(N+1))
        const double omega = unit_sphere_measure(N);
        const double exact = omega * (2.0 / N - 3.0 / (N + 1.0));
        CHECK(std::abs(grid.integrate(lin) - exact) < 1e-12);
    }
}

TEST_CASE("weights are positive") {
    RadialGrid grid(2, 128);
    for (double w : grid.weights()) CHECK(w > 0.0);
}

TEST_CASE("cone projection satisfies the projection variational inequality") {
    // a = P_C(u) in the weighted L^2 metric iff <u - a, v - a>_w <= 0 for
    // every v in the cone; probing many random cone fields is an oracle
    // independent of the pooling algorithm
    RadialGrid grid(1, 16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    auto wdot = [&](const RadialField& a, const RadialField& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += grid.weights()[i] * a[i] * b[i];
        return s;
    };
    for (int trial = 0; trial < 30; ++trial) {
        RadialField u(grid.size());
        for (double& x : u) x = unif(rng);
        const RadialField a = cone_project(grid, u);
        CHECK(in_cone(a));
        for (int probe = 0; probe < 40; ++probe) {
            RadialField v(grid.size());
            double acc = pos(rng) * 0.1;
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = acc;
                acc += pos(rng);
            }
            RadialField du(u.size()), dv(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                du[i] = u[i] - a[i];
                dv[i] = v[i] - a[i];
            }
            CHECK(wdot(du, dv) <= 1e-12);
        }
    }
}

TEST_CASE("cone projection is idempotent and fixes cone fields") {
    RadialGrid grid(2, 40);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    RadialField u(grid.size());
    for (double& x : u) x = unif(rng);
    const RadialField v = cone_project(grid, u);
    CHECK(sup_distance(cone_project(grid, v), v) == 0.0);

    RadialField mono(grid.size());
    for (std::size_t i = 0; i < mono.size(); ++i) mono[i] = 0.1 + grid.nodes()[i];
    CHECK(sup_distance(cone_project(grid, mono), mono) == 0.0);
}

TEST_CASE("projection does not increase the weighted distance to cone fields") {
    RadialGrid grid(1, 32);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    RadialField u(grid.size()), c(grid.size());
    for (double& x : u) x = unif(rng);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 + 0.2 * grid.nodes()[i];
    const RadialField pu = cone_project(grid, u);
    auto wdist = [&](const RadialField& a, const RadialField& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += grid.weights()[i] * (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    };
    CHECK(wdist(pu, c) <= wdist(u, c) + 1e-14);
}

TEST_CASE("norms and derivatives on known fields") {
    RadialGrid grid(1, 200);
    const RadialField one = constant_field(grid, 2.0);
    const double p = 1.97;
    CHECK(lp_norm_p(grid, one, p) == doctest::Approx(2.0 * std::pow(2.0, p)).epsilon(1e-12));
    CHECK(grad_lp_norm_p(grid, one, p) == 0.0);

    RadialField lin(grid.size());
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = 3.0 * grid.nodes()[i];
    CHECK(grad_lp_norm_p(grid, lin, p) == doctest::Approx(2.0 * std::pow(3.0, p)).epsilon(1e-12));
    const RadialField du = grid.derivative(lin);
    CHECK(du.front() == 0.0);  // symmetry at the origin
    for (std::size_t i = 1; i < du.size(); ++i) CHECK(du[i] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("adjoint identity of the cell-slope stencil") {
    RadialGrid grid(2, 24);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    RadialField u(grid.size());
    std::vector<double> a(grid.M());
    for (double& x : u) x = unif(rng);
    for (double& x : a) x = unif(rng);
    const std::vector<double> Su = grid.cell_slopes(u);
    const RadialField STa = grid.cell_slopes_transpose(a);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) lhs += a[c] * Su[c];
    for (std::size_t j = 0; j < u.size(); ++j) rhs += STa[j] * u[j];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
