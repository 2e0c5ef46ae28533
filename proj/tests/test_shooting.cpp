#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radpl/shooting.hpp"

using namespace radpl;

TEST_CASE("shot from the constant-solution height stays constant") {
    RadialGrid grid(1, 256);
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    const ShotResult s = shoot(1.0, pp, grid);
    CHECK(std::abs(s.up_end) < 1e-10);
    CHECK(sup_distance(s.u, constant_field(grid, 1.0)) < 1e-10);
}

TEST_CASE("first integral is conserved for N = 1") {
    RadialGrid grid(1, 512);
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    for (double d : {0.5, 0.72292592, 0.9}) {
        const ShotResult s = shoot(d, pp, grid);
        REQUIRE(!s.H_trace.empty());
        double drift = 0.0;
        for (double h : s.H_trace) drift = std::max(drift, std::abs(h - s.H_trace.front()));
        CHECK(drift < 2e-7);  // scales like h^4 with the series-start radius
    }
}

TEST_CASE("first integral is nonincreasing for N = 3") {
    RadialGrid grid(3, 512);
    const ProblemParams pp = make_params(1.97, 40.0, 3, 3.0);
    const ShotResult s = shoot(0.7, pp, grid);
    double up = 0.0;
    for (std::size_t k = 1; k < s.H_trace.size(); ++k)
        up = std::max(up, s.H_trace[k] - s.H_trace[k - 1]);
    CHECK(up < 1e-8);
}

TEST_CASE("lower monotone root at the reference parameters") {
    RadialGrid grid(1, 512);
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    const auto roots = find_neumann_roots(pp, grid, 1e-3, 1.0 - 1e-3, 300);
    REQUIRE(!roots.empty());
    const ShotResult* lower = nullptr;
    for (const auto& s : roots)
        if (s.monotone && (!lower || s.d < lower->d)) lower = &s;
    REQUIRE(lower != nullptr);
    CHECK(lower->d == doctest::Approx(0.72292592).epsilon(1e-4));  // frozen
    CHECK(in_cone(lower->u, 1e-6));
    CHECK(lower->u.back() > 1.0);  // ends above the constant
}

TEST_CASE("no nonconstant roots below the fold") {
    RadialGrid grid(1, 256);
    const ProblemParams pp = make_params(1.97, 5.0, 1, 3.0);
    const auto roots = find_neumann_roots(pp, grid, 1e-3, 1.0 - 1e-3, 200);
    for (const auto& s : roots) CHECK(!s.monotone);
}

TEST_CASE("upper root exists close to the constant at moderate q") {
    RadialGrid grid(1, 512);
    const ProblemParams pp = make_params(1.97, 16.0, 1, 3.0);
    const auto upper = find_upper_root(pp, grid);
    REQUIRE(upper.has_value());
    CHECK(upper->monotone);
    CHECK(upper->d < 1.0);
    CHECK(1.0 - upper->d > 1e-9);   // resolvable amplitude
    CHECK(1.0 - upper->d < 1e-2);   // hugging the constant line
}

TEST_CASE("branch sweep finds the fold and labels all families") {
    RadialGrid grid(1, 256);
    const Branch br = trace_branch(1.97, 1, 3.0, grid, 10.0, 20.0, 10);
    CHECK(br.complete);
    REQUIRE(br.fold_q.has_value());
    CHECK(*br.fold_q > 12.0);
    CHECK(*br.fold_q < 15.0);
    bool has_lower = false, has_upper = false, has_constant = false;
    for (const auto& pt : br.points) {
        if (pt.label == "lower") {
            has_lower = true;
            CHECK(pt.d > 0.0);
            CHECK(pt.d < 1.0);
        }
        if (pt.label == "upper") {
            has_upper = true;
            CHECK(pt.d < 1.0);
        }
        if (pt.label == "constant") {
            has_constant = true;
            CHECK(pt.d == 1.0);
        }
    }
    CHECK(has_lower);
    CHECK(has_upper);
    CHECK(has_constant);
}

TEST_CASE("the two routes to the limit profile agree") {
    RadialGrid grid(1, 512);
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    const RadialField g1 = solve_G(pp, grid);
    const RadialField g2 = solve_G_variational(pp, grid);
    CHECK(sup_distance(g1, g2) < 1e-5);
    CHECK(std::abs(g1.back() - 1.0) < 1e-8);  // boundary value 1
    CHECK(in_cone(g1, 1e-9));
    CHECK(g1.front() > 0.5);
    CHECK(g1.front() < 0.8);
}
