#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hydra/analytics.hpp"
#include "hydra/montecarlo.hpp"
#include "hydra/scenario.hpp"

namespace {

using hydra::analytics::AttackParams;
using hydra::analytics::NumericsConfig;
using hydra::analytics::ProbabilityEstimate;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitScenarioViolation = 3;

// Published take-over probabilities for N=32, q in {6,16,26,46}%, w = 1..9,
// alongside the single-chain Bitcoin reference column they were compared to.
struct ReferenceRow {
    double q;
    std::array<double, 9> bitcoin;
    std::array<double, 9> hydra;
};

constexpr ReferenceRow kReferenceTable[] = {
    {0.06,
     {0.1200, 0.0200, 0.0039, 0.0007, 0.0001, 0.0000, 0.0000, 0.0000, 0.0000},
     {0.1589, 0.3235, 0.0068, 0.0010, 0.0003, 0.0000, 0.0000, 0.0000, 0.0000}},
    {0.16,
     {0.3200, 0.1372, 0.0635, 0.0305, 0.0149, 0.0074, 0.0037, 0.0019, 0.0009},
     {0.7726, 0.4823, 0.2720, 0.1472, 0.0785, 0.0416, 0.0221, 0.0117, 0.0062}},
    {0.26,
     {0.5200, 0.3353, 0.2286, 0.1603, 0.1142, 0.0823, 0.0598, 0.0438, 0.0322},
     {0.9935, 0.9621, 0.8938, 0.7943, 0.6790, 0.5627, 0.4555, 0.3626, 0.2850}},
    {0.46,
     {0.9200, 0.8802, 0.8506, 0.8261, 0.8048, 0.7857, 0.7683, 0.7523, 0.7374},
     {1.0000, 1.0000, 1.0000, 1.0000, 1.0000, 1.0000, 1.0000, 1.0000, 1.0000}},
};

// The published cell for q=6%, w=2 (0.3235) breaks monotonicity in w against
// its neighbours and is almost certainly a misprint of the computed value.
constexpr double kAnomalousQ = 0.06;
constexpr int kAnomalousW = 2;

bool check_q_range(double q, bool allow_zero = false) {
    if (allow_zero ? (q >= 0.0 && q < 0.5) : (q > 0.0 && q < 0.5)) return true;
    std::cerr << "error: q must lie in " << (allow_zero ? "[0, 0.5)" : "(0, 0.5)") << "\n";
    return false;
}

int cmd_analytic(const AttackParams& params, const NumericsConfig& cfg, bool json) {
    const ProbabilityEstimate est = hydra::analytics::attack_probability(params, cfg);
    if (json) {
        nlohmann::json j{{"q", params.q},
                         {"n_chains", params.n_chains},
                         {"w", params.w},
                         {"t0", params.t0},
                         {"probability", est.value},
                         {"error_bound", est.error_bound}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("P[take-over] = %.6f  (error bound %.2e)\n", est.value, est.error_bound);
    }
    return kExitOk;
}

int cmd_table1(double t0, const NumericsConfig& cfg, bool json) {
    nlohmann::json jrows = nlohmann::json::array();
    if (!json) {
        std::printf("Take-over probability by confirmations w, N = 32 chains\n");
        std::printf("%-18s", "");
        for (int w = 1; w <= 9; ++w) std::printf("%9d", w);
        std::printf("\n");
    }
    for (const ReferenceRow& row : kReferenceTable) {
        std::array<double, 9> computed{};
        std::array<double, 9> bounds{};
        for (int w = 1; w <= 9; ++w) {
            AttackParams params{row.q, 32, static_cast<std::uint32_t>(w), t0};
            try {
                const ProbabilityEstimate est = hydra::analytics::attack_probability(params, cfg);
                computed[w - 1] = est.value;
                bounds[w - 1] = est.error_bound;
            } catch (const hydra::analytics::ConvergenceFailure& e) {
                computed[w - 1] = std::nan("");
                std::cerr << "warning: q=" << row.q << " w=" << w << ": " << e.what() << "\n";
            }
        }
        if (json) {
            nlohmann::json cells = nlohmann::json::array();
            for (int w = 1; w <= 9; ++w)
                cells.push_back(
                    {{"w", w},
                     {"computed", computed[w - 1]},
                     {"error_bound", bounds[w - 1]},
                     {"published", row.hydra[w - 1]},
                     {"bitcoin_reference", row.bitcoin[w - 1]},
                     {"suspected_misprint", row.q == kAnomalousQ && w == kAnomalousW}});
            jrows.push_back({{"q", row.q}, {"cells", cells}});
        } else {
            std::printf("q=%2.0f%%  bitcoin   ", row.q * 100);
            for (double v : row.bitcoin) std::printf("%9.4f", v);
            std::printf("\n      published ");
            for (double v : row.hydra) std::printf("%9.4f", v);
            std::printf("\n      computed  ");
            for (int w = 1; w <= 9; ++w) {
                std::printf("%9.4f", computed[w - 1]);
            }
            std::printf("\n");
        }
    }
    if (json) {
        std::cout << nlohmann::json{{"n_chains", 32}, {"rows", jrows}}.dump(2) << "\n";
    } else {
        std::printf(
            "note: the published q=6%%, w=2 value (0.3235) breaks monotonicity in w\n"
            "      and is a suspected misprint; the computed column is authoritative.\n");
    }
    return kExitOk;
}

int cmd_simulate(const std::string& path, bool json, const std::string& export_path,
                 const std::string& balances_path, std::uint32_t delta_override) {
    hydra::scenario::Scenario sc = hydra::scenario::parse_file(path);
    if (delta_override > 0) sc.delta = delta_override;
    hydra::scenario::ReplayOutcome out = hydra::scenario::replay(sc);
    if (json)
        std::cout << out.report.to_json_string() << "\n";
    else
        std::cout << out.report.to_text();
    if (!export_path.empty()) {
        std::ofstream os(export_path);
        if (!os) {
            std::cerr << "error: cannot open " << export_path << " for writing\n";
            return kExitUsage;
        }
        out.chains.export_records(os);
    }
    if (!balances_path.empty()) {
        std::ofstream os(balances_path);
        if (!os) {
            std::cerr << "error: cannot open " << balances_path << " for writing\n";
            return kExitUsage;
        }
        hydra::write_balances_csv(out.tree, os);
    }
    return out.report.ok() ? kExitOk : kExitScenarioViolation;
}

int cmd_montecarlo(const hydra::mc::SimConfig& cfg, bool json) {
    const hydra::mc::SimResult res = hydra::mc::simulate_attack(cfg);
    if (json) {
        nlohmann::json j{{"q", cfg.params.q},
                         {"n_chains", cfg.params.n_chains},
                         {"w", cfg.params.w},
                         {"t0", cfg.params.t0},
                         {"trials", res.trials},
                         {"successes", res.successes},
                         {"estimate", res.point_estimate},
                         {"std_error", res.std_error}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("estimate = %.6f  (std error %.2e, %llu/%llu trials)\n", res.point_estimate,
                    res.std_error, static_cast<unsigned long long>(res.successes),
                    static_cast<unsigned long long>(res.trials));
    }
    return kExitOk;
}

int cmd_sweep(const std::vector<double>& qs, const std::vector<std::uint32_t>& ns,
              const std::vector<std::uint32_t>& ws, const std::string& method, double t0,
              std::uint64_t trials, std::uint64_t seed, const NumericsConfig& cfg, bool json) {
    const bool analytic = method == "analytic" || method == "both";
    const bool montecarlo = method == "montecarlo" || method == "both";
    nlohmann::json jrows = nlohmann::json::array();
    if (!json) {
        std::string header = "q,n_chains,w";
        if (analytic) header += ",probability,error_bound";
        if (montecarlo) header += ",estimate,std_error,successes,trials";
        std::cout << header << "\n";
    }
    for (double q : qs)
        for (std::uint32_t n : ns)
            for (std::uint32_t w : ws) {
                AttackParams params{q, n, w, t0};
                nlohmann::json jrow{{"q", q}, {"n_chains", n}, {"w", w}};
                std::string row = std::to_string(q) + "," + std::to_string(n) + "," +
                                  std::to_string(w);
                if (analytic) {
                    const ProbabilityEstimate est =
                        hydra::analytics::attack_probability(params, cfg);
                    char buf[64];
                    std::snprintf(buf, sizeof buf, ",%.10g,%.3g", est.value, est.error_bound);
                    row += buf;
                    jrow["probability"] = est.value;
                    jrow["error_bound"] = est.error_bound;
                }
                if (montecarlo) {
                    hydra::mc::SimConfig sim{params, trials, seed};
                    const hydra::mc::SimResult res = hydra::mc::simulate_attack(sim);
                    char buf[96];
                    std::snprintf(buf, sizeof buf, ",%.10g,%.3g,%llu,%llu", res.point_estimate,
                                  res.std_error, static_cast<unsigned long long>(res.successes),
                                  static_cast<unsigned long long>(res.trials));
                    row += buf;
                    jrow["estimate"] = res.point_estimate;
                    jrow["std_error"] = res.std_error;
                    jrow["successes"] = res.successes;
                    jrow["trials"] = res.trials;
                }
                if (json)
                    jrows.push_back(std::move(jrow));
                else
                    std::cout << row << "\n";
            }
    if (json) std::cout << nlohmann::json{{"rows", jrows}}.dump(2) << "\n";
    return kExitOk;
}

int cmd_throughput(double block_size, double tx_size, double interval, bool json) {
    const double tps = hydra::analytics::throughput_estimate(block_size, tx_size, interval);
    if (json) {
        nlohmann::json j{{"block_size_bytes", block_size},
                         {"tx_size_bytes", tx_size},
                         {"interval_seconds", interval},
                         {"tps", tps}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%.2f tps\n", tps);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hydra multi-chain protocol simulator and take-over probability engine"};
    app.require_subcommand(1);

    double q = 0.16;
    std::uint32_t n_chains = 32;
    std::uint32_t w = 5;
    double t0 = 18.0;
    NumericsConfig numerics;
    bool json = false;

    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::uint32_t cutoff = 60;

    auto add_common = [&](CLI::App* cmd, bool with_numerics) {
        cmd->add_option("-q", q, "attacker capacity fraction");
        cmd->add_option("-N", n_chains, "number of chains")->check(CLI::PositiveNumber);
        cmd->add_option("-w", w, "blocks to the tipping point")->check(CLI::PositiveNumber);
        cmd->add_option("--t0", t0, "expected network-wide inter-block time");
        cmd->add_flag("--json", json, "machine-readable output");
        if (with_numerics) {
            cmd->add_option("--tol-rel", numerics.quad_rel_tol, "quadrature relative tolerance");
            cmd->add_option("--tol-abs", numerics.quad_abs_tol, "quadrature absolute tolerance");
            cmd->add_option("--series-eps", numerics.series_tail_epsilon,
                            "per-series truncation budget");
        }
    };

    CLI::App* analytic = app.add_subcommand("analytic", "closed-form take-over probability");
    add_common(analytic, true);

    CLI::App* table1 = app.add_subcommand(
        "table1", "reproduce the published N=32 probability grid with reference columns");
    table1->add_option("--t0", t0, "expected network-wide inter-block time");
    table1->add_flag("--json", json, "machine-readable output");
    table1->add_option("--tol-rel", numerics.quad_rel_tol, "quadrature relative tolerance");
    table1->add_option("--tol-abs", numerics.quad_abs_tol, "quadrature absolute tolerance");

    std::string scenario_path;
    std::string export_path;
    std::string balances_path;
    std::uint32_t delta_override = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "replay a scripted protocol scenario");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_flag("--json", json, "machine-readable output");
    simulate->add_option("--export-chains", export_path, "write final chain records here");
    simulate->add_option("--balances-csv", balances_path, "write final balances as CSV");
    simulate->add_option("--delta", delta_override, "override the scenario's account-tree lag")
        ->check(CLI::PositiveNumber);

    CLI::App* montecarlo =
        app.add_subcommand("montecarlo", "stochastic take-over probability estimate");
    add_common(montecarlo, false);
    montecarlo->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    montecarlo->add_option("--seed", seed, "rng seed");
    montecarlo->add_option("--cutoff", cutoff, "deficit beyond which the walk is settled analytically")
        ->check(CLI::PositiveNumber);

    std::vector<double> sweep_q{0.06, 0.16, 0.26};
    std::vector<std::uint32_t> sweep_n{1, 4, 32};
    std::vector<std::uint32_t> sweep_w{1, 3, 5};
    std::string method = "analytic";
    CLI::App* sweep = app.add_subcommand("sweep", "parameter grid, CSV output");
    sweep->add_option("--grid-q", sweep_q, "q values")->delimiter(',');
    sweep->add_option("--grid-n", sweep_n, "chain counts")->delimiter(',');
    sweep->add_option("--grid-w", sweep_w, "tipping points")->delimiter(',');
    sweep->add_option("--method", method, "analytic | montecarlo | both")
        ->check(CLI::IsMember({"analytic", "montecarlo", "both"}));
    sweep->add_option("--t0", t0, "expected network-wide inter-block time");
    sweep->add_option("--trials", trials, "montecarlo trials")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "rng seed");
    sweep->add_flag("--json", json, "machine-readable output");

    double block_size = 1e6;
    double tx_size = 240;
    double interval = 18;
    CLI::App* throughput = app.add_subcommand("throughput", "transactions-per-second arithmetic");
    throughput->add_option("--block-size", block_size, "block size in bytes");
    throughput->add_option("--tx-size", tx_size, "transaction size in bytes");
    throughput->add_option("--interval", interval, "block interval in seconds");
    throughput->add_flag("--json", json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (analytic->parsed()) {
            if (!check_q_range(q)) return kExitUsage;
            return cmd_analytic(AttackParams{q, n_chains, w, t0}, numerics, json);
        }
        if (table1->parsed()) return cmd_table1(t0, numerics, json);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, json, export_path, balances_path, delta_override);
        if (montecarlo->parsed()) {
            if (!check_q_range(q, /*allow_zero=*/true)) return kExitUsage;
            hydra::mc::SimConfig cfg{AttackParams{q, n_chains, w, t0}, trials, seed, cutoff};
            return cmd_montecarlo(cfg, json);
        }
        if (sweep->parsed()) {
            for (double sq : sweep_q)
                if (!check_q_range(sq, method != "analytic")) return kExitUsage;
            return cmd_sweep(sweep_q, sweep_n, sweep_w, method, t0, trials, seed, numerics, json);
        }
        if (throughput->parsed()) {
            if (block_size <= 0 || tx_size <= 0 || interval <= 0) {
                std::cerr << "error: throughput inputs must be positive\n";
                return kExitUsage;
            }
            return cmd_throughput(block_size, tx_size, interval, json);
        }
    } catch (const hydra::analytics::ConvergenceFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const hydra::scenario::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
