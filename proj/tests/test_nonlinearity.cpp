#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radpl/nonlinearity.hpp"

using namespace radpl;

TEST_CASE("parameter validation names the violated inequality") {
    CHECK_THROWS_AS(make_params(2.5, 40.0, 1, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(0.9, 40.0, 1, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.97, 1.5, 1, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.97, 40.0, 0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.97, 40.0, 1, 1.0), std::invalid_argument);   // ell <= p
    CHECK_THROWS_AS(make_params(1.97, 40.0, 1, 45.0), std::invalid_argument);  // ell >= q
    CHECK_THROWS_AS(make_params(1.97, 40.0, 1, 3.0, 1.5), std::invalid_argument);  // s0 <= 2
    CHECK_NOTHROW(make_params(1.97, 40.0, 1, 3.0));
}

TEST_CASE("default threshold for the reference parameters") {
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    // max{2 + (p')^{1/p}, 10 (1 + 2^{1/p})} at p = 1.97, N = 1
    CHECK(pp.s0 == doctest::Approx(24.2167).epsilon(1e-4));
    CHECK(pp.ball_measure == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(apriori_sup_bound(pp) == doctest::Approx(2.4328).epsilon(1e-3));
}

TEST_CASE("closed-form value above the threshold") {
    // q = 10, ell = 3, s0 = 5: f(10) = 5^9 + (9/2) 5^7 (10^2 - 5^2)
    const ProblemParams pp = make_params(1.5, 10.0, 1, 3.0, 5.0);
    const TruncatedNonlinearity fq(pp);
    const double expected = std::pow(5.0, 9) + 4.5 * std::pow(5.0, 7) * 75.0;
    CHECK(fq.f(10.0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("pure power below the threshold, zero on the negative axis") {
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0);
    const TruncatedNonlinearity fq(pp);
    for (double s : {0.1, 0.5, 1.0, 2.0, 0.99 * pp.s0})
        CHECK(fq.f(s) == doctest::Approx(std::pow(s, 39.0)).epsilon(1e-13));
    CHECK(fq.f(-1.0) == 0.0);
    CHECK(fq.f(0.0) == 0.0);
    CHECK(fq.f_prime(-2.0) == 0.0);
    CHECK(fq.F(-1.0) == 0.0);
}

TEST_CASE("C1 junction at the threshold") {
    for (double p : {1.2, 1.6, 1.97})
        for (double q : {5.0, 20.0, 60.0})
            for (double s0 : {3.0, 8.0}) {
                const ProblemParams pp = make_params(p, q, 1, std::min(3.0, 0.5 * (p + q)), s0);
                const TruncatedNonlinearity fq(pp);
                const double fs0 = fq.f(pp.s0);
                CHECK(std::abs(fq.f(pp.s0 * (1 - 1e-13)) - fq.f(pp.s0 * (1 + 1e-13))) <
                      1e-10 * fs0);
                const double h = 1e-6 * pp.s0;
                const double dl = (fq.f(pp.s0) - fq.f(pp.s0 - h)) / h;
                const double dr = (fq.f(pp.s0 + h) - fq.f(pp.s0)) / h;
                CHECK(std::abs(dr - dl) / std::abs(dl) < 1e-4);
                CHECK(std::abs(fq.f_prime(pp.s0 * (1 - 1e-13)) -
                               fq.f_prime(pp.s0 * (1 + 1e-13))) < 1e-9 * std::abs(dl));
            }
}

TEST_CASE("antiderivative differentiates back to f across the junction") {
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0, 5.0);
    const TruncatedNonlinearity fq(pp);
    for (double s : {0.5, 1.0, 3.0, 4.9, 5.1, 7.0, 12.0}) {
        const double h = 1e-6 * std::max(1.0, s);
        const double fd = (fq.F(s + h) - fq.F(s - h)) / (2.0 * h);
        CHECK(std::abs(fd - fq.f(s)) <= 1e-5 * std::max(1.0, fq.f(s)));
    }
    // continuity of F at s0
    CHECK(fq.F(5.0 * (1 - 1e-13)) == doctest::Approx(fq.F(5.0 * (1 + 1e-13))).epsilon(1e-11));
}

TEST_CASE("Phi vanishes at 1 and matches composite quadrature of f") {
    const ProblemParams pp = make_params(1.97, 10.0, 1, 3.0, 5.0);
    const TruncatedNonlinearity fq(pp);
    CHECK(fq.Phi(1.0) == 0.0);
    // Simpson quadrature of f over [0, 8] crosses the junction
    const int n = 4000;
    const double b = 8.0, h = b / n;
    double simpson = fq.f(0.0) + fq.f(b);
    for (int i = 1; i < n; ++i) simpson += fq.f(i * h) * (i % 2 ? 4.0 : 2.0);
    simpson *= h / 3.0;
    CHECK(fq.F(b) == doctest::Approx(simpson).epsilon(1e-8));
}

TEST_CASE("subcritical growth of the tail") {
    const ProblemParams pp = make_params(1.97, 40.0, 1, 3.0, 5.0);
    const TruncatedNonlinearity fq(pp);
    // above s0 the growth exponent is ell - 1 = 2: f(2s)/f(s) -> 4
    const double r = fq.f(4000.0) / fq.f(2000.0);
    CHECK(r == doctest::Approx(4.0).epsilon(1e-2));
}
