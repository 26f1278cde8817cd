#pragma once

#include <cstdint>

#include "hydra/analytics.hpp"

namespace hydra::mc {

// Stochastic oracle for the double-spend model. Deliberately independent of
// the analytic integrals: it simulates the 2N Poisson arrival streams
// event by event, so the "short chain has exactly w blocks at the tipping
// point" conditioning falls out of the sample paths instead of algebra.
struct SimConfig {
    analytics::AttackParams params;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    // Deficits beyond this are settled analytically by one Bernoulli draw
    // with the exact gambler's-ruin probability; the substituted tail is
    // bounded by (q/(1-q))^(cutoff+1).
    std::uint32_t walk_cutoff_deficit = 60;
};

struct SimResult {
    std::uint64_t successes{};
    std::uint64_t trials{};
    double point_estimate{};
    double std_error{};  // sqrt(p(1-p)/trials)
};

// Per trial: realize each chain's honest stream to the tipping point
// X = max of the N Erlang(w) completion times, draw per-chain attacker
// counts at X, then race every chain as a biased random walk. The trial
// succeeds if any chain is taken over. Deterministic for a fixed seed:
// trial t uses an independent substream seeded from splitmix64(seed, t).
SimResult simulate_attack(const SimConfig& cfg);

struct FixedXEstimate {
    SimResult short_chain;  // P[take-over on the short chain | X=x]
    SimResult other_chain;  // P[take-over on one long chain | X=x]
};

// Samples the two conditionals at a pinned tipping time, for testing the
// integrand parts in isolation. The long-chain estimate rejection-samples
// the honest count until it reaches w.
FixedXEstimate simulate_fixed_x(const analytics::AttackParams& params, double x,
                                std::uint64_t trials, std::uint64_t seed);

}  // namespace hydra::mc
