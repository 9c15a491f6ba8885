// Adaptive Gauss-Kronrod behavior on known integrals.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rtg/quadrature.hpp"

TEST_CASE("polynomials are exact") {
    const auto q = rtg::integrate([](double x) { return 3.0 * x * x; }, 0.0, 1.0, 1e-12);
    CHECK(q.value == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(q.evaluations == 15);
}

TEST_CASE("smooth transcendental integrand") {
    const auto q = rtg::integrate([](double x) { return std::exp(-x * x); }, 0.0, 5.0, 1e-12);
    CHECK(q.value == Catch::Approx(0.5 * std::sqrt(M_PI) * std::erf(5.0)).epsilon(1e-13));
}

TEST_CASE("flat-endpoint integrand used by the limit laws") {
    // int_0^1 exp(-1/t) dt: every derivative vanishes at 0
    const auto q = rtg::integrate(
        [](double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); }, 0.0, 1.0, 1e-10);
    CHECK(q.value == Catch::Approx(0.14849550677592205).epsilon(1e-9));
    CHECK(q.error_estimate <= 1e-10);
}

TEST_CASE("tolerance is enforced and reported") {
    const auto f = [](double x) { return std::sqrt(std::abs(x - 0.3)); };
    const auto coarse = rtg::integrate(f, 0.0, 1.0, 1e-4);
    const auto fine = rtg::integrate(f, 0.0, 1.0, 1e-10);
    CHECK(std::abs(coarse.value - fine.value) <= 2e-4);
    CHECK(fine.error_estimate <= 1e-10);
    CHECK(fine.evaluations > coarse.evaluations);
}

TEST_CASE("budget exhaustion raises with partial result") {
    const auto f = [](double x) { return std::sqrt(std::abs(x - 0.3)); };
    try {
        rtg::integrate(f, 0.0, 1.0, 1e-14, 60);
        FAIL("expected numerical_failure");
    } catch (const rtg::numerical_failure& e) {
        CHECK(e.partial_result == Catch::Approx(0.41112441746887399).margin(1e-2));
        CHECK(e.achieved_error > 1e-14);
    }
}

TEST_CASE("empty interval") {
    const auto q = rtg::integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-10);
    CHECK(q.value == 0.0);
}

TEST_CASE("invalid tolerance") {
    CHECK_THROWS_AS(rtg::integrate([](double) { return 1.0; }, 0.0, 1.0, 0.0),
                    rtg::invalid_input);
}
