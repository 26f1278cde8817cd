#include "hydra/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace hydra::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (trial + 1)));
}

std::uint64_t draw_poisson(std::mt19937_64& rng, double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

// Inverse-CDF draw of Pois(mean) conditioned on >= floor. Probabilities are
// accumulated relative to pmf(floor), which keeps the draw exact even when
// the conditioning event itself underflows (tiny mean, large floor).
std::uint64_t draw_poisson_at_least(std::mt19937_64& rng, double mean, std::uint64_t floor) {
    if (floor == 0) return draw_poisson(rng, mean);
    if (mean <= 0.0) return floor;
    double total = 0.0;
    double rel = 1.0;  // pmf(k) / pmf(floor)
    std::uint64_t k = floor;
    while (true) {
        total += rel;
        rel *= mean / static_cast<double>(k + 1);
        if (rel < total * 1e-18) break;
        ++k;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    rel = 1.0;
    for (std::uint64_t j = floor; j <= k; ++j) {
        if (u <= rel) return j;
        u -= rel;
        rel *= mean / static_cast<double>(j + 1);
    }
    return k;
}

// Race one chain from a non-negative honest lead. Walks the deficit until
// the attacker pulls ahead (-1) or it crosses the cutoff, where the exact
// absorption probability settles the remainder in one Bernoulli draw.
bool race_from_deficit(std::mt19937_64& rng, double q, std::int64_t deficit,
                       std::uint32_t cutoff) {
    std::bernoulli_distribution attacker_block(q);
    while (deficit >= 0 && deficit <= static_cast<std::int64_t>(cutoff))
        deficit += attacker_block(rng) ? -1 : +1;
    if (deficit < 0) return true;
    return std::bernoulli_distribution(
        analytics::catchup_probability(q, static_cast<std::uint64_t>(deficit)))(rng);
}

SimResult summarize(std::uint64_t successes, std::uint64_t trials) {
    const double p = trials > 0 ? static_cast<double>(successes) / trials : 0.0;
    return SimResult{successes, trials, p,
                     trials > 0 ? std::sqrt(p * (1.0 - p) / trials) : 0.0};
}

}  // namespace

SimResult simulate_attack(const SimConfig& cfg) {
    cfg.params.validate();
    const double lambda = cfg.params.lambda();
    const double mu = cfg.params.mu();
    const double q = cfg.params.q;
    const std::uint32_t n = cfg.params.n_chains;
    const std::uint32_t w = cfg.params.w;

    std::uint64_t successes = 0;
    std::vector<double> completion(n);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng = trial_stream(cfg.seed, t);
        std::exponential_distribution<double> honest_gap(lambda);

        // w-th honest arrival per chain; the tipping point is the latest one
        double x = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::uint32_t k = 0; k < w; ++k) s += honest_gap(rng);
            completion[i] = s;
            x = std::max(x, s);
        }

        bool taken_over = false;
        for (std::uint32_t i = 0; i < n && !taken_over; ++i) {
            // honest arrivals continue past the w-th until the tipping point;
            // the short chain picks up none, realizing its exact-w count
            std::uint64_t honest = w;
            for (double s = completion[i] + honest_gap(rng); s <= x; s += honest_gap(rng))
                ++honest;
            const std::uint64_t attacker = draw_poisson(rng, mu * x);
            if (attacker > honest) {
                taken_over = true;
                break;
            }
            taken_over = race_from_deficit(
                rng, q, static_cast<std::int64_t>(honest - attacker),
                cfg.walk_cutoff_deficit);
        }
        if (taken_over) ++successes;
    }
    return summarize(successes, cfg.trials);
}

FixedXEstimate simulate_fixed_x(const analytics::AttackParams& params, double x,
                                std::uint64_t trials, std::uint64_t seed) {
    params.validate();
    const double q = params.q;
    const std::uint32_t w = params.w;
    const std::uint32_t cutoff = 60;

    std::uint64_t short_successes = 0;
    std::uint64_t other_successes = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng = trial_stream(seed, t);

        // short chain: exactly w honest blocks at x
        {
            const std::uint64_t attacker = draw_poisson(rng, params.mu() * x);
            if (attacker > w)
                ++short_successes;
            else if (race_from_deficit(rng, q, static_cast<std::int64_t>(w - attacker),
                                       cutoff))
                ++short_successes;
        }

        // long chain: honest ~ Poisson(x*lambda) conditioned >= w
        {
            const std::uint64_t honest = draw_poisson_at_least(rng, params.lambda() * x, w);
            const std::uint64_t attacker = draw_poisson(rng, params.mu() * x);
            if (attacker > honest)
                ++other_successes;
            else if (race_from_deficit(rng, q,
                                       static_cast<std::int64_t>(honest - attacker), cutoff))
                ++other_successes;
        }
    }
    return FixedXEstimate{summarize(short_successes, trials),
                          summarize(other_successes, trials)};
}

}  // namespace hydra::mc
