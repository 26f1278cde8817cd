#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace hydra::analytics {

// Double-spend model parameters. An attacker holding mining fraction q races
// the honest network (fraction p = 1-q) on every chain at once; per-chain
// block rates are lambda = p/(t0*N) and mu = q/(t0*N), derived, never stored.
struct AttackParams {
    double q{};
    std::uint32_t n_chains{};
    std::uint32_t w{};    // tipping point: blocks required on every chain
    double t0 = 18.0;     // expected network-wide inter-block time

    double p() const { return 1.0 - q; }
    double lambda() const { return p() / (t0 * n_chains); }
    double mu() const { return q / (t0 * n_chains); }
    double catchup_ratio() const { return q / (1.0 - q); }

    void validate() const;  // throws std::invalid_argument
};

struct NumericsConfig {
    double series_tail_epsilon = 1e-12;  // truncation budget per infinite sum
    double quad_rel_tol = 1e-9;
    double quad_abs_tol = 1e-10;
    double x_max_quantile = 1.0 - 1e-12;  // integration cutoff as an F_X quantile
    unsigned max_quad_depth = 15;         // adaptive bisection budget
};

struct ProbabilityEstimate {
    double value{};
    double error_bound{};
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gambler's-ruin probability that a walk starting `deficit` blocks behind
// ever pulls one ahead: min{(q/(1-q))^(deficit+1), 1}.
double catchup_probability(double q, std::uint64_t deficit);

// P[take-over on the short chain | tipping point at x]. The short chain has
// exactly w honest blocks at x; conditioning is over the attacker's Poisson
// count. The i<=w part is a finite sum, the i>w part a closed-form Poisson
// upper tail, so no truncation error beyond floating point.
double p_takeover_short(const AttackParams& params, double x);

// P[take-over on one particular long chain | tipping point at x]. Honest
// count ~ Poisson(x*lambda) conditioned >= w, attacker ~ Poisson(x*mu).
// Returns nullopt when the conditioning denominator underflows (x so small
// that P[honest >= w] ~ 0); such integrand points are negligible.
std::optional<double> p_takeover_other(const AttackParams& params, double x,
                                       const NumericsConfig& cfg = {});

// Distribution and density of X = max over chains of the Erlang(w, lambda)
// time to the w-th block.
double tipping_cdf(const AttackParams& params, double x);
double tipping_density(const AttackParams& params, double x);

// Smallest x with P[X > x] <= survivor_mass.
double tipping_tail_cutoff(const AttackParams& params, double survivor_mass);

// A(q, N, w): probability of a successful take-over on any chain, by
// adaptive quadrature of the simplified closed-form integrand.
ProbabilityEstimate attack_probability(const AttackParams& params,
                                       const NumericsConfig& cfg = {});

// Same quantity assembled from the unsimplified conditional pieces (explicit
// truncated-Poisson denominator). Exists to cross-validate the printed
// simplification; the two must agree within combined tolerance.
ProbabilityEstimate attack_probability_composed(const AttackParams& params,
                                                const NumericsConfig& cfg = {});

// (block_size/tx_size)/interval, kept rational (no flooring).
double throughput_estimate(double block_size_bytes, double tx_size_bytes,
                           double block_interval_seconds);

}  // namespace hydra::analytics
