#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "hydra/analytics.hpp"
#include "hydra/montecarlo.hpp"

using namespace hydra;
using analytics::AttackParams;

TEST_CASE("no attacker capacity: the estimate is exactly zero") {
    mc::SimConfig cfg{{0.0, 4, 3}, 5000, 7};
    const mc::SimResult res = mc::simulate_attack(cfg);
    CHECK(res.successes == 0);
    CHECK(res.point_estimate == 0.0);
    CHECK(res.std_error == 0.0);
}

TEST_CASE("identical seed and config reproduce the result bit for bit") {
    mc::SimConfig cfg{{0.26, 4, 3}, 20000, 12345};
    const mc::SimResult a = mc::simulate_attack(cfg);
    const mc::SimResult b = mc::simulate_attack(cfg);
    CHECK(a.successes == b.successes);
    CHECK(a.point_estimate == b.point_estimate);
    CHECK(a.trials == cfg.trials);
    CHECK(a.std_error ==
          doctest::Approx(std::sqrt(a.point_estimate * (1 - a.point_estimate) / a.trials)));
}

TEST_CASE("simulation hits the published value at q=0.16, N=32, w=5") {
    mc::SimConfig cfg{{0.16, 32, 5}, 100000, 99};
    const mc::SimResult res = mc::simulate_attack(cfg);
    CHECK(std::abs(res.point_estimate - 0.0785) < 3.0 * res.std_error + 1e-4);
}

TEST_CASE("simulation and analytics validate each other at N=1") {
    const AttackParams params{0.26, 1, 4};
    mc::SimConfig cfg{params, 100000, 4242};
    const mc::SimResult res = mc::simulate_attack(cfg);
    const double analytic = analytics::attack_probability(params).value;
    CHECK(std::abs(res.point_estimate - analytic) < 3.0 * res.std_error);
}

TEST_CASE("raising the walk cutoff moves the estimate less than the tail bound") {
    const AttackParams params{0.26, 1, 2};
    mc::SimConfig small{params, 100000, 31337, 5};
    mc::SimConfig large{params, 100000, 31337, 60};
    const mc::SimResult a = mc::simulate_attack(small);
    const mc::SimResult b = mc::simulate_attack(large);
    const double tail_bound = analytics::catchup_probability(params.q, small.walk_cutoff_deficit);
    CHECK(std::abs(a.point_estimate - b.point_estimate) <
          tail_bound + 3.0 * (a.std_error + b.std_error));
}

TEST_CASE("sampled tipping times match the analytic mean") {
    const AttackParams params{0.16, 4, 3};
    const double lambda = params.lambda();

    // independent sampler: max over chains of w summed exponentials
    std::mt19937_64 rng(555);
    std::exponential_distribution<double> gap(lambda);
    const std::uint64_t trials = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        double x = 0.0;
        for (std::uint32_t i = 0; i < params.n_chains; ++i) {
            double s = 0.0;
            for (std::uint32_t k = 0; k < params.w; ++k) s += gap(rng);
            x = std::max(x, s);
        }
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sumsq / trials - mean * mean) / trials);

    const double hi = analytics::tipping_tail_cutoff(params, 1e-13);
    const double analytic_mean = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double x) { return x * analytics::tipping_density(params, x); }, 0.0, hi, 12, 1e-10);
    CHECK(std::abs(mean - analytic_mean) < 3.0 * se);
}

TEST_CASE("fixed-x estimates stay in range and match the conditionals") {
    const AttackParams params{0.16, 32, 3};

    SUBCASE("x near zero drives the short chain to its starting deficit") {
        const double x = 1e-7 / params.lambda();
        const auto est = mc::simulate_fixed_x(params, x, 200000, 8);
        const double expect = std::pow(params.catchup_ratio(), params.w + 1.0);
        CHECK(std::abs(est.short_chain.point_estimate - expect) <
              3.0 * est.short_chain.std_error + 1e-4);
    }

    SUBCASE("part 2 matches p_takeover_other at x = 1.5 w / lambda") {
        const double x = 1.5 * params.w / params.lambda();
        const auto est = mc::simulate_fixed_x(params, x, 400000, 9);
        CHECK(est.short_chain.point_estimate >= 0.0);
        CHECK(est.short_chain.point_estimate <= 1.0);
        CHECK(est.other_chain.point_estimate >= 0.0);
        CHECK(est.other_chain.point_estimate <= 1.0);
        const auto analytic = analytics::p_takeover_other(params, x);
        REQUIRE(analytic.has_value());
        CHECK(std::abs(est.other_chain.point_estimate - *analytic) <
              3.0 * est.other_chain.std_error + 1e-4);

        const double analytic_short = analytics::p_takeover_short(params, x);
        CHECK(std::abs(est.short_chain.point_estimate - analytic_short) <
              3.0 * est.short_chain.std_error + 1e-4);
    }
}
