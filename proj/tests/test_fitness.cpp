// Fitness model behavior: distribution identities, scaling, intensity,
// sampling, and the scaling-assumption checker.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rtg/fitness.hpp"
#include "rtg/rng.hpp"

using rtg::FitnessModel;

TEST_CASE("cdf support and closed forms") {
    const auto exp1 = FitnessModel::exponential(1.0);
    CHECK(exp1.cdf(-1.0) == 0.0);
    CHECK(exp1.cdf(0.0) == 0.0);
    CHECK(exp1.cdf(std::log(2.0)) == Catch::Approx(0.5).epsilon(1e-12));

    const auto par = FitnessModel::pareto(1.0, 2.0);
    CHECK(par.cdf(1.0) == Catch::Approx(0.75).epsilon(1e-12));
    CHECK(par.cdf(-0.5) == 0.0);
}

TEST_CASE("cdf and tail are complementary") {
    const std::vector<FitnessModel> models = {FitnessModel::exponential(0.7),
                                              FitnessModel::exponential(2.5),
                                              FitnessModel::pareto(1.0, 2.0),
                                              FitnessModel::pareto(3.0, 0.5)};
    for (const auto& model : models) {
        for (double x = -1.0; x <= 50.0; x += 0.25) {
            CHECK(std::abs(model.cdf(x) + model.tail(x) - 1.0) <= 1e-12);
            CHECK(model.cdf(x) >= 0.0);
            CHECK(model.cdf(x) <= 1.0);
        }
    }
}

TEST_CASE("quantile inverts the cdf") {
    const std::vector<FitnessModel> models = {FitnessModel::exponential(1.0),
                                              FitnessModel::exponential(3.0),
                                              FitnessModel::pareto(1.0, 1.0),
                                              FitnessModel::pareto(2.0, 4.0)};
    for (const auto& model : models)
        for (double u = 0.001; u < 1.0; u += 0.001)
            CHECK(std::abs(model.cdf(model.quantile(u)) - u) <= 1e-9);
}

TEST_CASE("quantile examples") {
    CHECK(FitnessModel::exponential(1.0).quantile(0.5) ==
          Catch::Approx(-std::log(0.5)).epsilon(1e-12));
    CHECK(FitnessModel::pareto(1.0, 1.0).quantile(0.5) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaling thresholds") {
    const auto exp1 = FitnessModel::exponential(1.0);
    CHECK(exp1.scaling_threshold(1) == 0.0);
    const auto n = static_cast<std::int64_t>(std::ceil(std::exp(2.0)));
    CHECK(exp1.scaling_threshold(n) == Catch::Approx(2.0).margin(0.2));

    CHECK(FitnessModel::pareto(1.0, 2.0).scaling_threshold(100) ==
          Catch::Approx(10.0).epsilon(1e-12));

    // strictly increasing and divergent along a doubling grid
    double previous = exp1.scaling_threshold(2);
    for (std::int64_t k = 4; k <= 1 << 20; k *= 2) {
        const double theta = exp1.scaling_threshold(k);
        CHECK(theta > previous);
        previous = theta;
    }
}

TEST_CASE("intensity values and monotonicity") {
    CHECK(FitnessModel::exponential(2.0).intensity(1.0) ==
          Catch::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(FitnessModel::exponential(5.0).intensity(0.0) == 1.0);
    CHECK(FitnessModel::pareto(2.0, 3.0).intensity(17.0) == 1.0);

    const auto exp2 = FitnessModel::exponential(2.0);
    double previous = exp2.intensity(0.0);
    for (double x = 0.1; x <= 10.0; x += 0.1) {
        const double lam = exp2.intensity(x);
        CHECK(lam >= previous);
        previous = lam;
    }
}

TEST_CASE("sampling is deterministic and unbiased") {
    const auto exp1 = FitnessModel::exponential(1.0);
    rtg::RngStream rng_a(42, 7), rng_b(42, 7);
    const auto draws_a = rtg::sample_fitness(exp1, rng_a, 1000);
    const auto draws_b = rtg::sample_fitness(exp1, rng_b, 1000);
    CHECK(draws_a == draws_b);

    // law of large numbers: mean within 4 sigma / sqrt(n) of 1
    rtg::RngStream rng(123, 0);
    const std::int64_t n = 1'000'000;
    const auto draws = rtg::sample_fitness(exp1, rng, n);
    long double sum = 0.0L;
    for (double v : draws) sum += v;
    const double mean = static_cast<double>(sum / n);
    CHECK(std::abs(mean - 1.0) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("custom model without quantile refuses to sample") {
    rtg::CustomFitnessSpec spec;
    spec.cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); };
    spec.tail = [](double x) { return x <= 0.0 ? 1.0 : std::exp(-x); };
    spec.intensity = [](double x) { return std::exp(x); };
    spec.scaling = [](std::int64_t n) { return std::log(static_cast<double>(n)); };
    const auto model = FitnessModel::custom(spec);

    rtg::RngStream rng(1, 1);
    CHECK_THROWS_AS(rtg::sample_fitness(model, rng, 10), rtg::unsupported_operation);
}

TEST_CASE("invalid model parameters are rejected") {
    CHECK_THROWS_AS(FitnessModel::exponential(0.0), rtg::invalid_input);
    CHECK_THROWS_AS(FitnessModel::pareto(-1.0, 2.0), rtg::invalid_input);
    CHECK_THROWS_AS(FitnessModel::pareto(1.0, 0.0), rtg::invalid_input);
}

TEST_CASE("scaling assumption holds exactly for the exponential family") {
    const auto model = FitnessModel::exponential(1.3);
    const std::vector<double> xs = {0.0, 0.5, 1.0, 2.0};
    const std::vector<std::int64_t> ns = {10, 100, 1000, 10000};
    const auto report = rtg::check_assumption_A(model, xs, ns);

    REQUIRE(report.entries.size() == xs.size() * ns.size());
    for (const auto& entry : report.entries) {
        const double theta = model.scaling_threshold(entry.n);
        if (theta >= entry.x) CHECK(entry.residual <= 1e-9 * entry.intensity);
    }
}

TEST_CASE("scaling assumption converges for the pareto family") {
    const auto model = FitnessModel::pareto(1.0, 2.0);
    const auto report =
        rtg::check_assumption_A(model, {0.0}, {100, 10000, 1000000});
    // n * tail(theta_n - x) -> 1; at n = 1e6 within 0.01
    CHECK(report.entries.back().scaled_tail == Catch::Approx(1.0).margin(0.01));
    // residuals non-increasing along the grid
    CHECK(report.max_residual_per_n[0] >= report.max_residual_per_n[1]);
    CHECK(report.max_residual_per_n[1] >= report.max_residual_per_n[2]);
}

TEST_CASE("assumption report shape") {
    const auto model = FitnessModel::pareto(1.0, 1.0);
    const auto report = rtg::check_assumption_A(model, {0.0}, {10, 100, 1000});
    CHECK(report.entries.size() == 3);
    CHECK(report.n_grid.size() == 3);
}
