#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radpl/mountain_pass.hpp"

using namespace radpl;

namespace {

struct Setup {
    RadialGrid grid{1, 256};
    ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    EnergyModel model{pp, grid};
    SolutionRecord uq = minimize_on_nehari(model, 6);
};

Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

TEST_CASE("seed family interpolates between the scaled constant and the ground state") {
    auto& s = setup();
    const RadialField g0 = gamma0(s.uq.u, 0.7, 0.0);
    for (double x : g0) CHECK(x == doctest::Approx(0.7).epsilon(1e-15));
    const RadialField g1 = gamma0(s.uq.u, 1.0, 1.0);
    CHECK(sup_distance(g1, s.uq.u) < 1e-14);
}

TEST_CASE("surface construction snaps a node to t = 1 and validates its box") {
    auto& s = setup();
    const PathSurface sf = make_surface(s.uq.u, 0.5, 1.5);
    bool has_one = false;
    for (double t : sf.t_nodes) has_one = has_one || t == 1.0;
    CHECK(has_one);
    CHECK(sf.fields.size() == sf.t_nodes.size() * sf.s_nodes.size());
    CHECK(sf.s_nodes.front() == 0.0);
    CHECK(sf.s_nodes.back() == 1.0);
    CHECK_THROWS_AS(make_surface(s.uq.u, 1.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_surface(s.uq.u, 0.5, 1.5, 2, 2), std::invalid_argument);
}

TEST_CASE("box selection brackets the constant level") {
    auto& s = setup();
    const auto [R1, R2] = choose_box(s.model, s.uq);
    CHECK(R1 > 0.0);
    CHECK(R1 < 1.0);
    CHECK(R2 > 1.0);
    // small side: positive energy below half the ground-state level
    for (double sv : {0.0, 0.5, 1.0}) {
        const RadialField g = gamma0(s.uq.u, R1, sv);
        CHECK(s.model.energy(g) > 0.0);
        CHECK(s.model.energy(g) <= 0.5 * s.uq.energy + 1e-12);
        CHECK(s.model.nehari_residual(g) > 0.0);
    }
    // large side: negative energy and residual
    for (double sv : {0.0, 0.5, 1.0}) {
        const RadialField g = gamma0(s.uq.u, R2, sv);
        CHECK(s.model.energy(g) < 0.0);
        CHECK(s.model.nehari_residual(g) < 0.0);
    }
}

TEST_CASE("surface descent: frozen boundary, nonincreasing max, saddle at the constant level") {
    auto& s = setup();
    const auto [R1, R2] = choose_box(s.model, s.uq);
    PathSurface sf = make_surface(s.uq.u, R1, R2);
    const PathSurface seed = sf;

    double init_max = -1e300;
    for (const auto& f : sf.fields) init_max = std::max(init_max, s.model.energy(f));
    const double e1 = s.model.energy(constant_field(s.grid, 1.0));
    CHECK(init_max >= e1);  // the snapped t = 1 node puts the constant on the boundary

    const DqEstimate est = estimate_dq(s.model, sf, 120);
    CHECK(est.sweeps > 0);
    for (std::size_t k = 1; k < est.max_history.size(); ++k)
        CHECK(est.max_history[k] <= est.max_history[k - 1] + 1e-14);
    CHECK(est.d_q <= init_max);
    CHECK(est.d_q >= e1 - 1e-9);

    const std::size_t nt = sf.t_nodes.size(), ns = sf.s_nodes.size();
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            if (i == 0 || j == 0 || i + 1 == nt || j + 1 == ns)
                CHECK(sup_distance(sf.at(i, j), seed.at(i, j)) == 0.0);

    // the refined saddle either separates from the constant with all gates
    // satisfied, or is honestly rejected (the expected outcome here: the
    // second solution sits below double resolution from the constant)
    const auto vq = refine_vq(s.model, est.argmax);
    if (vq) {
        CHECK(record_accepted(*vq));
        CHECK(vq->energy > e1);
        CHECK(in_cone(vq->u, 1e-10));
    }
}

TEST_CASE("sign-crossing certificate on the seed surface") {
    auto& s = setup();
    const auto [R1, R2] = choose_box(s.model, s.uq);
    const PathSurface sf = make_surface(s.uq.u, R1, R2);
    const auto cell = miranda_crossing(s.model, sf, 0.05);
    REQUIRE(cell.has_value());
    CHECK(cell->first + 1 < sf.t_nodes.size());
    CHECK(cell->second + 1 < sf.s_nodes.size());
}

TEST_CASE("refinement rejects the constant itself") {
    auto& s = setup();
    const RadialField one = constant_field(s.grid, 1.0);
    CHECK(!refine_vq(s.model, one).has_value());
}
