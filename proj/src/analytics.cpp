#include "hydra/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace hydra::analytics {

void AttackParams::validate() const {
    if (!(q >= 0.0) || !(q < 0.5))
        throw std::invalid_argument("attacker fraction q must lie in [0, 0.5)");
    if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
    if (w < 1) throw std::invalid_argument("tipping point w must be >= 1");
    if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
}

double catchup_probability(double q, std::uint64_t deficit) {
    const double ratio = q / (1.0 - q);
    if (ratio >= 1.0) return 1.0;
    return std::pow(ratio, static_cast<double>(deficit + 1));
}

namespace {

// P[Pois(mean) >= k], free of the 1-sum cancellation.
double poisson_upper_tail(double mean, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (mean <= 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(k), mean);
}

// pmf table out to cumulative mass >= 1 - eps. Entries beyond the table
// carry total mass <= eps, which is exactly the per-sum truncation budget.
std::vector<double> poisson_pmf_table(double mean, double eps) {
    if (mean <= 0.0) return {1.0};
    std::vector<double> pmf;
    if (mean < 600.0) {
        pmf.push_back(std::exp(-mean));
        double cum = pmf[0];
        std::size_t k = 0;
        while (cum < 1.0 - eps) {
            ++k;
            pmf.push_back(pmf[k - 1] * mean / static_cast<double>(k));
            cum += pmf[k];
        }
    } else {
        // exp(-mean) underflows; build each term in log space instead
        std::size_t k = 0;
        double cum = 0.0;
        while (cum < 1.0 - eps) {
            const double lp = -mean + static_cast<double>(k) * std::log(mean) -
                              std::lgamma(static_cast<double>(k) + 1.0);
            pmf.push_back(std::exp(lp));
            cum += pmf.back();
            ++k;
        }
    }
    return pmf;
}

double poisson_pmf_at(double mean, std::uint64_t k) {
    if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

// The two double sums of the long-chain conditional, WITHOUT the
// conditioning denominator: sum over the block difference z of
//   z >= 0:  (q/p)^{z+1} * sum_{n>=max(w,z)} P[B = n-z] P[H = n]
//   z >= 1:  sum_{n>=w} P[B = n+z] P[H = n]
// with H ~ Pois(x*lambda), B ~ Pois(x*mu). Each infinite sum is cut when the
// closed-form bound on its remainder (geometric in z for the first branch,
// a Poisson tail for everything else) drops below eps.
double other_chain_numerator(const AttackParams& params, double x, double eps) {
    const double r = params.catchup_ratio();
    const double mean_h = x * params.lambda();
    const double mean_b = x * params.mu();
    const std::uint64_t w = params.w;

    const std::vector<double> ph = poisson_pmf_table(mean_h, eps);
    const std::vector<double> pb = poisson_pmf_table(mean_b, eps);
    const std::size_t kh = ph.size() - 1;

    // cumulative attacker mass, for the z >= 1 stopping rule
    std::vector<double> pb_cum(pb.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pb.size(); ++i) {
        acc += pb[i];
        pb_cum[i] = acc;
    }
    const auto attacker_tail = [&](std::uint64_t k) {  // P[B >= k], from the table
        if (k == 0) return 1.0;
        if (k - 1 >= pb_cum.size()) return 0.0;  // beyond table: < eps by construction
        return std::max(0.0, 1.0 - pb_cum[k - 1]);
    };

    double total = 0.0;

    if (r > 0.0) {
        double weight = r;  // r^{z+1}
        for (std::uint64_t z = 0; z <= kh; ++z) {
            double inner = 0.0;
            for (std::size_t n = std::max<std::uint64_t>(w, z); n <= kh; ++n) {
                const std::size_t bi = n - z;
                if (bi < pb.size()) inner += pb[bi] * ph[n];
            }
            total += weight * inner;
            weight *= r;
            // remaining z-terms are bounded by the geometric series tail
            if (weight / (1.0 - r) < eps) break;
        }
    }

    for (std::uint64_t z = 1;; ++z) {
        // everything from this z on is bounded by P[B >= w+z]
        if (attacker_tail(w + z) < eps) break;
        double inner = 0.0;
        for (std::size_t n = w; n <= kh; ++n) {
            const std::size_t bi = n + z;
            if (bi < pb.size()) inner += pb[bi] * ph[n];
        }
        total += inner;
    }

    return total;
}

struct QuadOutcome {
    double value{};
    double error{};
};

template <typename F>
QuadOutcome integrate(F&& f, double a, double b, const NumericsConfig& cfg) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, cfg.max_quad_depth, cfg.quad_rel_tol, &error, &l1);
    if (error > std::max(cfg.quad_abs_tol, cfg.quad_rel_tol * std::max(std::abs(value), l1)))
        throw ConvergenceFailure("quadrature error " + std::to_string(error) +
                                 " above tolerance within the subdivision budget");
    return {value, error};
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Truncation slop carried into the integral by the per-sum budgets: two
// Poisson-tail cuts plus the geometric z-tail, whose bound scales with
// r/(1-r).
double series_slop(const AttackParams& params, double eps) {
    const double r = params.catchup_ratio();
    return eps * (4.0 + (r < 1.0 ? r / (1.0 - r) : 0.0));
}

}  // namespace

double p_takeover_short(const AttackParams& params, double x) {
    const double r = params.catchup_ratio();
    const double mean_b = x * params.mu();
    const std::uint64_t w = params.w;
    double total = poisson_upper_tail(mean_b, w + 1);  // attacker already past w
    double pmf = std::exp(-mean_b);
    for (std::uint64_t i = 0; i <= w; ++i) {
        if (i > 0) pmf *= mean_b / static_cast<double>(i);
        total += std::pow(r, static_cast<double>(w - i + 1)) * pmf;
    }
    return clamp01(total);
}

std::optional<double> p_takeover_other(const AttackParams& params, double x,
                                       const NumericsConfig& cfg) {
    const double denom = poisson_upper_tail(x * params.lambda(), params.w);
    if (denom < 1e-300) return std::nullopt;
    const double num = other_chain_numerator(params, x, cfg.series_tail_epsilon);
    return clamp01(num / denom);
}

double tipping_cdf(const AttackParams& params, double x) {
    if (x <= 0.0) return 0.0;
    const double per_chain = poisson_upper_tail(x * params.lambda(), params.w);
    return std::pow(per_chain, static_cast<double>(params.n_chains));
}

double tipping_density(const AttackParams& params, double x) {
    if (x <= 0.0)  // the CDF power kills the w=1 Erlang mass unless N=1
        return (params.w == 1 && params.n_chains == 1) ? params.lambda() : 0.0;
    const double lam = params.lambda();
    const double erlang = lam * poisson_pmf_at(x * lam, params.w - 1);
    if (params.n_chains == 1) return erlang;
    const double per_chain = poisson_upper_tail(x * lam, params.w);
    return params.n_chains * erlang *
           std::pow(per_chain, static_cast<double>(params.n_chains - 1));
}

double tipping_tail_cutoff(const AttackParams& params, double survivor_mass) {
    // survivor S over the max of N chains -> per-chain survivor s, then the
    // Erlang quantile in closed form.
    const double s = -std::expm1(std::log1p(-survivor_mass) / params.n_chains);
    const double y = boost::math::gamma_q_inv(static_cast<double>(params.w), s);
    return y / params.lambda();
}

ProbabilityEstimate attack_probability(const AttackParams& params, const NumericsConfig& cfg) {
    params.validate();
    const double survivor = std::min(1.0 - cfg.x_max_quantile, cfg.quad_abs_tol);
    const double x_max = tipping_tail_cutoff(params, survivor);
    const double eps = cfg.series_tail_epsilon;
    const std::uint32_t n = params.n_chains;

    const auto integrand = [&](double x) -> double {
        const double r = params.catchup_ratio();
        const double mean_b = x * params.mu();
        // part 1: e^{-x mu} sum_{i=0}^{w} (1 - r^{w-i+1}) (x mu)^i / i!
        double s1 = 0.0;
        double pmf = std::exp(-mean_b);
        for (std::uint64_t i = 0; i <= params.w; ++i) {
            if (i > 0) pmf *= mean_b / static_cast<double>(i);
            s1 += (1.0 - std::pow(r, static_cast<double>(params.w - i + 1))) * pmf;
        }
        // part 2: (per-chain CDF minus the take-over numerator)^{N-1}; the
        // conditioning denominator is absorbed by the density's CDF powers
        double part2 = 1.0;
        if (n > 1) {
            const double cdf1 = poisson_upper_tail(x * params.lambda(), params.w);
            const double s2 =
                std::clamp(cdf1 - other_chain_numerator(params, x, eps), 0.0, 1.0);
            part2 = std::pow(s2, static_cast<double>(n - 1));
        }
        // part 3: N * Erlang(w, lambda) density
        const double f3 =
            n * params.lambda() * poisson_pmf_at(x * params.lambda(), params.w - 1);
        return s1 * part2 * f3;
    };

    const QuadOutcome quad = integrate(integrand, 0.0, x_max, cfg);
    const double value = clamp01(1.0 - quad.value);
    return {value, quad.error + survivor + series_slop(params, eps)};
}

ProbabilityEstimate attack_probability_composed(const AttackParams& params,
                                                const NumericsConfig& cfg) {
    params.validate();
    const double survivor = std::min(1.0 - cfg.x_max_quantile, cfg.quad_abs_tol);
    const double x_max = tipping_tail_cutoff(params, survivor);
    const std::uint32_t n = params.n_chains;

    const auto integrand = [&](double x) -> double {
        const double part1 = 1.0 - p_takeover_short(params, x);
        double part2 = 1.0;
        if (n > 1) {
            const std::optional<double> p_other = p_takeover_other(params, x, cfg);
            if (!p_other) return 0.0;  // degenerate conditioning: negligible point
            part2 = std::pow(1.0 - *p_other, static_cast<double>(n - 1));
        }
        return part1 * part2 * tipping_density(params, x);
    };

    const QuadOutcome quad = integrate(integrand, 0.0, x_max, cfg);
    const double value = clamp01(1.0 - quad.value);
    return {value, quad.error + survivor + series_slop(params, cfg.series_tail_epsilon)};
}

double throughput_estimate(double block_size_bytes, double tx_size_bytes,
                           double block_interval_seconds) {
    if (!(block_size_bytes > 0.0) || !(tx_size_bytes > 0.0) || !(block_interval_seconds > 0.0))
        throw std::invalid_argument("throughput inputs must be positive");
    return (block_size_bytes / tx_size_bytes) / block_interval_seconds;
}

}  // namespace hydra::analytics
