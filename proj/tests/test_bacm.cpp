#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bicmcap/bacm.hpp"
#include "bicmcap/baseline.hpp"
#include "test_support.hpp"

using namespace bicmcap;
using testsup::h2;

namespace {

double penalized(const Dmc& c, const BitPmfSet& bits, double lambda,
                 const std::vector<double>* w) {
    double v = bicm_mi(c, bits);
    if (w) {
        double cost = 0.0;
        for (std::size_t x = 0; x < c.inputs(); ++x) cost += (*w)[x] * kron_prob(bits, x);
        v -= lambda * cost;
    }
    return v;
}

}  // namespace

TEST_CASE("taylor_lower_bound_hj") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    SUBCASE("tangent at the expansion point") {
        for (int t = 0; t < 50; ++t) {
            const Dmc c = testsup::random_channel(6, 8, 1300 + t);
            const auto bits = testsup::random_bits(3, rng);
            const auto pair = effective_pair_channel(c, bits, 0, 1);
            const BitPmf pi(uni(rng));
            const double lhs = taylor_lower_bound_hj(pair, bits[0], pi, pi);
            const double rhs = testsup::brute_hj(pair, bits[0], pi);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    SUBCASE("lower bounds the convex term everywhere") {
        for (int t = 0; t < 10; ++t) {
            const Dmc c = testsup::random_channel(6, 8, 1400 + t);
            const auto bits = testsup::random_bits(3, rng);
            const auto pair = effective_pair_channel(c, bits, 2, 0);
            const BitPmf pi_hat(uni(rng));
            for (int s = 0; s < 100; ++s) {
                const BitPmf pi(uni(rng));
                const double lb = taylor_lower_bound_hj(pair, bits[2], pi, pi_hat);
                const double exact = testsup::brute_hj(pair, bits[2], pi);
                CHECK(lb <= exact + 1e-10);
            }
        }
    }
    SUBCASE("constant when all pair columns coincide") {
        EffectivePairChannel pair;
        pair.pos_j = 0;
        pair.pos_i = 1;
        for (auto& col : pair.cols) col = {0.3, 0.7};
        const BitPmf pj(0.4), pi_hat(0.6);
        const double v0 = taylor_lower_bound_hj(pair, pj, BitPmf(0.0), pi_hat);
        const double v1 = taylor_lower_bound_hj(pair, pj, BitPmf(1.0), pi_hat);
        CHECK(v0 == doctest::Approx(v1).epsilon(1e-14));
    }
}

TEST_CASE("surrogate tangency, domination, and m=1 exactness") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    SUBCASE("tangent: f(p_hat, p_hat) equals the objective") {
        for (int t = 0; t < 100; ++t) {
            const int m = 1 + t % 3;
            const Dmc c = testsup::random_channel(6, std::size_t{1} << m, 1500 + t);
            const auto bits = testsup::random_bits(m, rng);
            const int i = t % m;
            BitSurrogate s(c, bits, i, 0.0, nullptr);
            s.set_expansion(bits[i].p0);
            CHECK(s.value(bits[i].p0) ==
                  doctest::Approx(bicm_mi(c, bits)).epsilon(1e-10));
        }
    }
    SUBCASE("dominated by the objective everywhere") {
        for (int t = 0; t < 10; ++t) {
            const int m = 2 + t % 2;
            const Dmc c = testsup::random_channel(6, std::size_t{1} << m, 1600 + t);
            auto bits = testsup::random_bits(m, rng);
            const int i = t % m;
            BitSurrogate s(c, bits, i, 0.0, nullptr);
            for (int k = 0; k < 100; ++k) {
                s.set_expansion(uni(rng));
                const double p0 = uni(rng);
                bits[i] = BitPmf(p0);
                CHECK(s.value(p0) <= bicm_mi(c, bits) + 1e-10);
            }
        }
    }
    SUBCASE("with cost penalty") {
        for (int t = 0; t < 20; ++t) {
            const Dmc c = testsup::random_channel(5, 4, 1700 + t);
            std::vector<double> w{1.0, 2.0, 3.0, 4.0};
            auto bits = testsup::random_bits(2, rng);
            const double lambda = 0.5;
            BitSurrogate s(c, bits, 0, lambda, &w);
            s.set_expansion(bits[0].p0);
            CHECK(s.value(bits[0].p0) ==
                  doctest::Approx(penalized(c, bits, lambda, &w)).epsilon(1e-10));
            const double p0 = uni(rng);
            BitPmfSet moved = bits;
            moved[0] = BitPmf(p0);
            CHECK(s.value(p0) <= penalized(c, moved, lambda, &w) + 1e-10);
        }
    }
    SUBCASE("m=1: surrogate equals the objective for every p0") {
        const Dmc c = testsup::random_channel(5, 2, 1800);
        BitSurrogate s(c, {BitPmf(0.7)}, 0, 0.0, nullptr);
        s.set_expansion(0.7);
        for (int k = 0; k <= 10; ++k) {
            const double p0 = k / 10.0;
            CHECK(s.value(p0) == doctest::Approx(bicm_mi(c, {BitPmf(p0)})).epsilon(1e-12));
        }
    }
}

TEST_CASE("surrogate derivative") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> interior(0.05, 0.95);

    SUBCASE("matches central finite differences") {
        for (int t = 0; t < 20; ++t) {
            const int m = 1 + t % 3;
            const Dmc c = testsup::random_channel(6, std::size_t{1} << m, 1900 + t);
            const auto bits = testsup::random_bits(m, rng, 0.1, 0.9);
            const int i = t % m;
            const std::vector<double> w = [&] {
                std::vector<double> v(c.inputs());
                for (auto& x : v) x = 1.0 + interior(rng);
                return v;
            }();
            BitSurrogate s(c, bits, i, 0.3, &w);
            s.set_expansion(interior(rng));
            const double eps = 1e-6;
            for (int k = 0; k < 100; ++k) {
                const double p0 = interior(rng);
                const double fd = (s.value(p0 + eps) - s.value(p0 - eps)) / (2.0 * eps);
                CHECK(std::abs(s.derivative(p0) - fd) <= 1e-6);
            }
        }
    }
    SUBCASE("zero at the symmetry point of a symmetric instance") {
        const Dmc c = testsup::bsc_product(2, 0.1);
        BitSurrogate s(c, uniform_bits(2), 0, 0.0, nullptr);
        s.set_expansion(0.5);
        CHECK(std::abs(s.derivative(0.5)) <= 1e-12);
    }
    SUBCASE("monotone non-increasing (concavity)") {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int t = 0; t < 20; ++t) {
            const Dmc c = testsup::random_channel(6, 8, 2000 + t);
            const auto bits = testsup::random_bits(3, rng, 0.05, 0.95);
            BitSurrogate s(c, bits, t % 3, 0.0, nullptr);
            s.set_expansion(uni(rng));
            for (int k = 0; k < 50; ++k) {
                double a = uni(rng), b = uni(rng);
                if (a > b) std::swap(a, b);
                CHECK(s.derivative(a) >= s.derivative(b) - 1e-10);
            }
        }
    }
}

TEST_CASE("inner_maximize") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    SUBCASE("interior bisection uses exactly ceil(log2(1/2d)) evaluations") {
        const Dmc c = testsup::random_channel(6, 4, 2100);
        // Skewed pmfs give an interior, asymmetric optimum.
        const BitPmfSet bits{BitPmf(0.55), BitPmf(0.7)};
        BitSurrogate s(c, bits, 0, 0.0, nullptr);
        s.set_expansion(0.4);
        const InnerSolve r = inner_maximize(s, 1e-5);
        CHECK(r.interior);
        CHECK(r.bisection_evals == 16);  // ceil(log2(50000))
        CHECK(r.derivative_evals == 18);

        const InnerSolve r2 = inner_maximize(s, 1e-3);
        CHECK(r2.bisection_evals == 9);  // ceil(log2(500))
    }
    SUBCASE("strictly decreasing surrogate returns the lower boundary") {
        // All channel entries positive, so the entropy derivative stays
        // finite and a strong cost penalty on the labels with bit 0 = 0
        // makes the surrogate strictly decreasing.
        const Dmc c = testsup::bsc_product(2, 0.2);
        const std::vector<double> w{2.0, 2.0, 1.0, 1.0};
        BitSurrogate s(c, uniform_bits(2), 0, 50.0, &w);
        s.set_expansion(0.5);
        const InnerSolve r = inner_maximize(s, 1e-5);
        CHECK(r.p.p0 == 0.0);
        CHECK_FALSE(r.interior);
        CHECK(r.derivative_evals <= 2);
    }
    SUBCASE("matches a dense grid argmax within d") {
        const double d = 1e-3;
        for (int t = 0; t < 25; ++t) {
            const int m = 2 + t % 2;
            const Dmc c = testsup::random_channel(6, std::size_t{1} << m, 2200 + t);
            const auto bits = testsup::random_bits(m, rng, 0.05, 0.95);
            BitSurrogate s(c, bits, t % m, 0.0, nullptr);
            s.set_expansion(uni(rng));
            const InnerSolve r = inner_maximize(s, d);
            double best_p = 0.0, best_v = -1e300;
            for (int k = 0; k <= 10000; ++k) {  // grid step d/10
                const double p0 = k / 10000.0;
                const double v = s.value(p0);
                if (v > best_v) {
                    best_v = v;
                    best_p = p0;
                }
            }
            CHECK(std::abs(r.p.p0 - best_p) <= d + 1e-4 + 1e-12);
        }
    }
}

TEST_CASE("boundary pinning vs underflow") {
    SUBCASE("denormal channel entries do not pin or blow up the derivative") {
        // Gaussian tails near the erfc underflow produce entries around
        // 1e-320 next to exact zeros; mixing them with interior weights
        // underflows to zero, which must read as a vanished term, not as a
        // boundary singularity.
        const double tiny = 5e-324;
        std::vector<double> cols = {
            1.0, tiny, 0.0,   // input 00
            0.0, 1.0,  0.0,   // input 01
            tiny, 0.0, 1.0,   // input 10
            0.0, 0.0,  1.0,   // input 11
        };
        std::vector<double> col_major(12);
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 3; ++k) col_major[j * 3 + k] = cols[j * 3 + k];
        const Dmc c(3, 4, std::move(col_major));
        BitSurrogate s(c, uniform_bits(2), 1, 0.0, nullptr);
        s.set_expansion(0.4);
        CHECK_FALSE(s.pinned().has_value());
        CHECK(std::isfinite(s.derivative(0.5)));
        const InnerSolve r = inner_maximize(s, 1e-5);
        CHECK(r.p.p0 > 0.0);
        CHECK(r.p.p0 < 1.0);
    }
    SUBCASE("a boundary expansion point with live entries pins the solve") {
        const Dmc c = testsup::identity_channel(4);
        BitSurrogate s(c, {BitPmf(0.5), BitPmf(0.0)}, 1, 0.0, nullptr);
        s.set_expansion(0.0);
        REQUIRE(s.pinned().has_value());
        CHECK(*s.pinned() == 0.0);
        const InnerSolve r = inner_maximize(s, 1e-5);
        CHECK(r.p.p0 == 0.0);
        CHECK(r.derivative_evals == 0);
        // tangency still holds at the boundary expansion point
        CHECK(s.value(0.0) ==
              doctest::Approx(bicm_mi(c, {BitPmf(0.5), BitPmf(0.0)})).epsilon(1e-12));
    }
}

TEST_CASE("convex_concave_bit") {
    SUBCASE("m=1 converges in one iteration to the optimum") {
        const Dmc c = Dmc(2, 2, {0.95, 0.05, 0.3, 0.7});  // asymmetric binary channel
        BacmConfig cfg;
        const CcpResult r = convex_concave_bit(c, {BitPmf(0.5)}, 0, 0.0, nullptr, cfg);
        CHECK(r.iterations == 1);
        CHECK(r.converged);
        // grid oracle on the true objective
        double best_p = 0, best_v = -1e300;
        for (int k = 0; k <= 100000; ++k) {
            const double p0 = k / 100000.0;
            const double v = bicm_mi(c, {BitPmf(p0)});
            if (v > best_v) {
                best_v = v;
                best_p = p0;
            }
        }
        CHECK(std::abs(r.p.p0 - best_p) <= cfg.precision_d + 1e-5);
        CHECK(r.objective == doctest::Approx(best_v).epsilon(1e-9));
    }
    SUBCASE("product of BSCs returns uniform from any start") {
        const Dmc c = testsup::bsc_product(2, 0.1);
        BacmConfig cfg;
        for (double start : {0.05, 0.3, 0.5, 0.8, 0.95}) {
            const BitPmfSet bits{BitPmf(start), BitPmf(0.5)};
            const CcpResult r = convex_concave_bit(c, bits, 0, 0.0, nullptr, cfg);
            CHECK(r.converged);
            CHECK(std::abs(r.p.p0 - 0.5) <= 1e-3);
            // Far starts creep geometrically until the step drops below d.
            CHECK(r.iterations <= 30);
        }
    }
    SUBCASE("true objective never decreases across iterations") {
        std::mt19937_64 rng(35);
        for (int t = 0; t < 30; ++t) {
            const int m = 2 + t % 3;
            const Dmc c = testsup::random_channel(8, std::size_t{1} << m, 2300 + t);
            const auto bits = testsup::random_bits(m, rng);
            BacmConfig cfg;
            SolveTelemetry tel;
            const double before = bicm_mi(c, bits);
            const CcpResult r = convex_concave_bit(c, bits, t % m, 0.0, nullptr, cfg, &tel);
            CHECK(r.objective >= before - 1e-12);
            double prev = before;
            for (double v : tel.objective_trace) {
                CHECK(v >= prev - 1e-9);
                prev = v;
            }
        }
    }
}

TEST_CASE("bacm_solve") {
    SUBCASE("identity channel") {
        const CapacityResult r = bacm_solve(testsup::identity_channel(4));
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.bits[0].p0 == doctest::Approx(0.5));
        CHECK(r.bits[1].p0 == doctest::Approx(0.5));
        CHECK(r.telemetry.outer_passes == 1);
        CHECK(r.telemetry.converged);
    }
    SUBCASE("product of BSCs hits the analytic value at uniform") {
        for (double eps : {0.05, 0.1, 0.2}) {
            for (int m : {2, 3}) {
                const Dmc c = testsup::bsc_product(m, eps);
                const CapacityResult r = bacm_solve(c);
                CHECK(r.value == doctest::Approx(m * (1.0 - h2(eps))).epsilon(1e-9));
                for (const auto& b : r.bits) CHECK(std::abs(b.p0 - 0.5) <= 1e-5);
            }
        }
    }
    SUBCASE("value field matches a recomputation from the bits") {
        std::mt19937_64 rng(36);
        for (int t = 0; t < 10; ++t) {
            const Dmc c = testsup::random_channel(8, 8, 2400 + t);
            const CapacityResult r = bacm_solve(c);
            CHECK(r.value == doctest::Approx(bicm_mi(c, r.bits)).epsilon(1e-10));
        }
    }
    SUBCASE("monotone objective trace") {
        for (int t = 0; t < 10; ++t) {
            const Dmc c = testsup::random_channel(8, 8, 2500 + t);
            const CapacityResult r = bacm_solve(c);
            const auto& trace = r.telemetry.objective_trace;
            REQUIRE(!trace.empty());
            for (std::size_t i = 1; i < trace.size(); ++i) {
                CHECK(trace[i] >= trace[i - 1] - 1e-9);
            }
        }
    }
    SUBCASE("stationarity at interior optimum") {
        std::mt19937_64 rng(37);
        for (int t = 0; t < 10; ++t) {
            const Dmc c = testsup::random_channel(8, 4, 2600 + t);
            const CapacityResult r = bacm_solve(c);
            const double eps = 1e-5;
            for (int i = 0; i < 2; ++i) {
                const double p0 = r.bits[i].p0;
                if (p0 < 0.01 || p0 > 0.99) continue;
                BitPmfSet lo = r.bits, hi = r.bits;
                lo[i] = BitPmf(p0 - eps);
                hi[i] = BitPmf(p0 + eps);
                const double fd = (bicm_mi(c, hi) - bicm_mi(c, lo)) / (2 * eps);
                CHECK(std::abs(fd) <= 1e-3);
            }
        }
    }
    SUBCASE("precision contract for a single coordinate: within d + d/10") {
        // Both bisection brackets contain the same argmax, so the midpoints
        // differ by at most the sum of the two precisions.
        std::mt19937_64 rng(38);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int t = 0; t < 30; ++t) {
            const Dmc c = testsup::random_channel(8, 4, 2700 + t);
            const auto bits = testsup::random_bits(2, rng, 0.05, 0.95);
            BitSurrogate s(c, bits, t % 2, 0.0, nullptr);
            s.set_expansion(uni(rng));
            const InnerSolve coarse = inner_maximize(s, 1e-4);
            const InnerSolve fine = inner_maximize(s, 1e-5);
            if (!coarse.interior || !fine.interior) continue;
            CHECK(std::abs(coarse.p.p0 - fine.p.p0) <= 1e-4 + 1e-5 + 1e-15);
        }
    }
    SUBCASE("precision contract across a full solve, coupling allowance") {
        // The alternation couples the coordinates, so per-coordinate
        // differences can exceed d + d' by the contraction factor of the
        // fixed-point map; a small multiple covers it.
        for (int t = 0; t < 8; ++t) {
            const Dmc c = testsup::random_channel(8, 4, 2700 + t);
            BacmConfig coarse, fine;
            coarse.precision_d = 1e-4;
            coarse.outer_tol = 1e-13;
            coarse.inner_tol = 1e-13;
            fine = coarse;
            fine.precision_d = 1e-5;
            const CapacityResult rc = bacm_solve(c, 0.0, nullptr, coarse);
            const CapacityResult rf = bacm_solve(c, 0.0, nullptr, fine);
            for (int i = 0; i < 2; ++i) {
                const double a = rc.bits[i].p0, b = rf.bits[i].p0;
                if (a == 0.0 || a == 1.0 || b == 0.0 || b == 1.0) continue;
                CHECK(std::abs(a - b) <= 4.0 * (coarse.precision_d + fine.precision_d));
            }
        }
    }
    SUBCASE("multi-start keeps the best objective") {
        std::mt19937_64 rng(39);
        for (int t = 0; t < 5; ++t) {
            const Dmc c = testsup::random_channel(6, 4, 2800 + t);
            BacmConfig single;
            BacmConfig multi;
            multi.starts = {uniform_bits(2),
                            {BitPmf(0.9), BitPmf(0.1)},
                            {BitPmf(0.1), BitPmf(0.9)}};
            const double v1 = bacm_solve(c, 0.0, nullptr, single).value;
            const double vn = bacm_solve(c, 0.0, nullptr, multi).value;
            CHECK(vn >= v1 - 1e-12);
        }
    }
    SUBCASE("iteration cap flags non-convergence") {
        const Dmc c = testsup::random_channel(8, 8, 2900);
        BacmConfig cfg;
        cfg.max_outer = 1;
        cfg.max_inner = 1;
        cfg.outer_tol = 1e-15;
        const CapacityResult r = bacm_solve(c, 0.0, nullptr, cfg);
        CHECK_FALSE(r.telemetry.converged);
    }
    SUBCASE("lambda requires a positive cost vector") {
        const Dmc c = testsup::identity_channel(4);
        CHECK_THROWS_AS(bacm_solve(c, 1.0), std::invalid_argument);
        std::vector<double> bad{1.0, 0.0, 1.0, 1.0};
        CHECK_THROWS_AS(bacm_solve(c, 1.0, &bad), std::invalid_argument);
    }
}

TEST_CASE("degenerate fixed pmfs flow through the solver") {
    // Other positions pinned to 0/1 zero out whole label groups; the
    // surrogate and solver must stay total on the closed simplex.
    std::mt19937_64 rng(40);
    for (int t = 0; t < 10; ++t) {
        const Dmc c = testsup::random_channel(6, 8, 3100 + t);
        const BitPmfSet bits{BitPmf(1.0), BitPmf(0.5), BitPmf(t % 2 ? 0.0 : 1.0)};
        // tangency with degenerate partners
        BitSurrogate s(c, bits, 1, 0.0, nullptr);
        s.set_expansion(0.5);
        CHECK(s.value(0.5) == doctest::Approx(bicm_mi(c, bits)).epsilon(1e-10));
        const CcpResult r = convex_concave_bit(c, bits, 1, 0.0, nullptr, BacmConfig{});
        CHECK(r.converged);
        CHECK(std::isfinite(r.objective));
    }
    // a solve started on the simplex boundary stays total and monotone
    const Dmc c = testsup::random_channel(6, 8, 3200);
    BacmConfig cfg;
    cfg.starts = {{BitPmf(0.0), BitPmf(1.0), BitPmf(0.5)}};
    const CapacityResult r = bacm_solve(c, 0.0, nullptr, cfg);
    CHECK(std::isfinite(r.value));
    const auto& trace = r.telemetry.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9);
}

TEST_CASE("bacm_solve agrees with exhaustive search on small channels") {
    // Full-scale oracle corpus lives in the acceptance suite; this is a smoke
    // check on a handful of instances.
    int checked = 0;
    for (int t = 0; t < 40 && checked < 5; ++t) {
        const Dmc c = testsup::random_channel(8, 4, 3000 + t);
        const auto maxima = grid_local_maxima(c, 0.02);
        if (maxima.size() >= 2 && maxima[0] - maxima[1] > 1e-9) continue;  // several basins
        ++checked;
        GridSpec grid;
        grid.step = 1e-2;
        grid.refinement = 0.1;
        grid.refine_stages = 2;
        const ExhaustiveResult ex = exhaustive_bicm(c, grid);
        const CapacityResult r = bacm_solve(c);
        CHECK(std::abs(r.value - ex.value) <= 1e-3);
    }
    CHECK(checked >= 3);
}
