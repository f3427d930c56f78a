#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bicmcap/awgn_pam.hpp"
#include "bicmcap/bacm.hpp"
#include "bicmcap/baseline.hpp"
#include "test_support.hpp"

using namespace bicmcap;
using testsup::h2;

TEST_CASE("exhaustive_bicm") {
    SUBCASE("identity channel peaks at uniform") {
        GridSpec grid;
        grid.step = 0.01;
        const ExhaustiveResult r = exhaustive_bicm(testsup::identity_channel(4), grid);
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.bits[0].p0 == doctest::Approx(0.5));
        CHECK(r.bits[1].p0 == doctest::Approx(0.5));
        CHECK(r.grid_evaluations == 101 * 101);
        CHECK(r.refine_evaluations == 0);
    }
    SUBCASE("evaluation count is (floor(1/step)+1)^m") {
        GridSpec grid;
        grid.step = 0.01;
        const Dmc c = testsup::random_channel(2, 8, 4000);
        const ExhaustiveResult r = exhaustive_bicm(c, grid);
        CHECK(r.grid_evaluations == 101L * 101L * 101L);  // 1,030,301
    }
    SUBCASE("m > 4 is refused with a cost estimate") {
        const Dmc c = testsup::random_channel(2, 32, 4001);
        GridSpec grid;
        grid.step = 0.01;
        CHECK_THROWS_WITH_AS(exhaustive_bicm(c, grid), doctest::Contains("101"),
                             std::invalid_argument);
    }
    SUBCASE("refinement never loses to the coarse pass") {
        for (int t = 0; t < 5; ++t) {
            const Dmc c = testsup::random_channel(6, 4, 4100 + t);
            GridSpec coarse;
            coarse.step = 0.05;
            GridSpec fine = coarse;
            fine.refinement = 0.1;
            fine.refine_stages = 2;
            const double v0 = exhaustive_bicm(c, coarse).value;
            const ExhaustiveResult r1 = exhaustive_bicm(c, fine);
            CHECK(r1.value >= v0 - 1e-15);
            CHECK(r1.refine_evaluations > 0);
        }
    }
    SUBCASE("cost cap restricts the search") {
        const Constellation con = build_constellation(2, 1.0);
        const Dmc c = discretize_awgn(con, {50, 6.0});
        GridSpec grid;
        grid.step = 0.02;
        const ExhaustiveResult all = exhaustive_bicm(c, grid);
        const ExhaustiveResult capped = exhaustive_bicm(c, grid, 0.0, &con.costs, 2.0);
        CHECK(capped.value <= all.value + 1e-15);
        double cost = 0.0;
        for (std::size_t x = 0; x < 4; ++x) cost += con.costs[x] * kron_prob(capped.bits, x);
        CHECK(cost <= 2.0 * (1.0 + 1e-9));
    }
}

TEST_CASE("uniform_bicm") {
    CHECK(uniform_bicm(testsup::identity_channel(8)) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(uniform_bicm(testsup::bsc_product(2, 0.1)) ==
          doctest::Approx(2.0 * (1.0 - h2(0.1))).epsilon(1e-12));
    // BACM from the uniform start can only improve on the uniform value
    for (int t = 0; t < 10; ++t) {
        const Dmc c = testsup::random_channel(6, 8, 4200 + t);
        CHECK(uniform_bicm(c) <= bacm_solve(c).value + 1e-9);
    }
}

TEST_CASE("cm_capacity") {
    SUBCASE("unconstrained analytic channels") {
        CHECK(cm_capacity(testsup::identity_channel(8)).value ==
              doctest::Approx(3.0).epsilon(1e-9));
        const CmResult r = cm_capacity(testsup::bsc(0.1));
        CHECK(r.value == doctest::Approx(1.0 - h2(0.1)).epsilon(1e-9));
        CHECK(r.upper_bound >= r.value);
    }
    SUBCASE("upper-bounds the BICM value on random channels") {
        for (int t = 0; t < 15; ++t) {
            const Dmc c = testsup::random_channel(7, 8, 4300 + t);
            const CmResult cm = cm_capacity(c);
            const CapacityResult b = bacm_solve(c);
            CHECK(b.value <= cm.upper_bound + 1e-9);
            CHECK(uniform_bicm(c) <= b.value + 1e-9);
        }
    }
    SUBCASE("cost-constrained solve meets the budget") {
        const Constellation con = build_constellation(2, 1.0);
        const Dmc c = discretize_awgn(con, {100, 6.0});
        const CmResult free = cm_capacity(c, &con.costs);
        // a binding budget below the unconstrained cost
        const double budget = 0.6 * free.realized_cost;
        const CmResult tight = cm_capacity(c, &con.costs, budget);
        CHECK(tight.converged);
        CHECK(tight.realized_cost <= budget * (1.0 + 1e-5));
        CHECK(tight.value <= free.value + 1e-12);
        CHECK(tight.lambda > 0.0);
        CHECK(tight.value <= tight.upper_bound + 1e-12);
        // a slack budget reproduces the unconstrained solve
        const CmResult slack = cm_capacity(c, &con.costs, 10.0 * free.realized_cost);
        CHECK(slack.value == doctest::Approx(free.value).epsilon(1e-9));
        CHECK(slack.lambda == 0.0);
    }
}

TEST_CASE("grid_local_maxima") {
    SUBCASE("identity channel has one dominant maximum") {
        const auto maxima = grid_local_maxima(testsup::identity_channel(4), 0.02);
        REQUIRE(!maxima.empty());
        CHECK(maxima[0] == doctest::Approx(2.0).epsilon(1e-12));
        if (maxima.size() > 1) CHECK(maxima[0] - maxima[1] > 1e-2);
    }
    SUBCASE("top value agrees with exhaustive search") {
        for (int t = 0; t < 5; ++t) {
            const Dmc c = testsup::random_channel(6, 4, 4400 + t);
            GridSpec grid;
            grid.step = 0.02;
            const auto maxima = grid_local_maxima(c, 0.02);
            const ExhaustiveResult ex = exhaustive_bicm(c, grid);
            REQUIRE(!maxima.empty());
            CHECK(maxima[0] == doctest::Approx(ex.value).epsilon(1e-12));
        }
    }
}
