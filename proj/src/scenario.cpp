#include "hydra/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hydra::scenario {

namespace {

double event_time(const Event& e) {
    return std::visit([](const auto& ev) { return ev.time; }, e);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw ParseError("scenario line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Scenario parse(std::istream& is) {
    Scenario sc;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::istringstream ss(line);
        std::string kind;
        if (!(ss >> kind)) continue;

        if (kind == "chains") {
            if (!(ss >> sc.n_chains) || sc.n_chains < 1) fail(line_no, "chains needs N >= 1");
        } else if (kind == "delta") {
            if (!(ss >> sc.delta) || sc.delta < 1) fail(line_no, "delta needs D >= 1");
        } else if (kind == "seed") {
            if (!(ss >> sc.seed)) fail(line_no, "seed needs an integer");
        } else if (kind == "max-block-txs") {
            if (!(ss >> sc.max_block_txs) || sc.max_block_txs < 1)
                fail(line_no, "max-block-txs needs n >= 1");
        } else if (kind == "alloc") {
            AccountId account;
            std::uint64_t amount;
            if (!(ss >> account >> amount)) fail(line_no, "alloc needs <account> <balance>");
            sc.allocations[account] += amount;
        } else if (kind == "tx") {
            TxEvent ev;
            if (!(ss >> ev.time >> ev.tx.from >> ev.tx.to >> ev.tx.value >> ev.tx.nonce))
                fail(line_no, "tx needs <time> <from> <to> <value> <nonce>");
            ev.tx.signature = ev.tx.from;  // honest signing unless overridden
            std::string extra;
            if (ss >> extra) {
                if (extra != "sig" || !(ss >> ev.tx.signature))
                    fail(line_no, "trailing tokens; expected 'sig <token>'");
            }
            sc.events.emplace_back(std::move(ev));
        } else if (kind == "mine") {
            MineEvent ev;
            if (!(ss >> ev.time >> ev.name >> ev.miner >> ev.randomizer))
                fail(line_no, "mine needs <time> <name> <miner> <randomizer>");
            std::string extra;
            if (ss >> extra) {
                if (extra == "basis") {
                    double t;
                    if (!(ss >> t)) fail(line_no, "basis needs a time");
                    ev.basis_time = t;
                } else if (extra == "onto") {
                    std::string target;
                    if (!(ss >> target)) fail(line_no, "onto needs a block name");
                    ev.onto = std::move(target);
                } else {
                    fail(line_no, "unknown mine option '" + extra + "'");
                }
            }
            sc.events.emplace_back(std::move(ev));
        } else {
            fail(line_no, "unknown directive '" + kind + "'");
        }
    }
    std::stable_sort(sc.events.begin(), sc.events.end(),
                     [](const Event& a, const Event& b) { return event_time(a) < event_time(b); });
    return sc;
}

Scenario parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open scenario file: " + path);
    return parse(is);
}

namespace {

struct State {
    ChainSet cs;
    AccountTree tree;
    Mempool mp;
};

struct Replayer {
    const Scenario& sc;
    RunReport& report;
    State cur;
    std::vector<std::pair<double, State>> snapshots;
    std::map<std::string, Digest> named_blocks;
    MiningConfig mcfg;

    explicit Replayer(const Scenario& s, RunReport& r)
        : sc(s),
          report(r),
          cur{ChainSet(s.n_chains), AccountTree{0, s.delta, s.allocations}, Mempool(s.n_chains)} {
        mcfg.max_block_txs = s.max_block_txs;
        snapshots.emplace_back(-std::numeric_limits<double>::infinity(), cur);
    }

    void violation(const std::string& msg) { report.violation = msg; }

    void handle(const TxEvent& ev) {
        const AdmitStatus st = cur.mp.add(ev.tx);
        if (st != AdmitStatus::accepted)
            report.rejected.push_back({ev.time, "mempool", ev.tx, std::string(to_string(st))});
    }

    void handle(const MineEvent& ev) {
        if (named_blocks.count(ev.name) != 0) {
            violation("mine " + ev.name + ": duplicate block name");
            return;
        }
        // Choose the miner's view of the world.
        const State* view = &cur;
        if (ev.basis_time) {
            auto it = std::upper_bound(
                snapshots.begin(), snapshots.end(), *ev.basis_time,
                [](double t, const auto& snap) { return t < snap.first; });
            view = &std::prev(it)->second;
        }
        ChainSet view_cs = view->cs;
        if (ev.onto) {
            auto it = named_blocks.find(*ev.onto);
            if (it == named_blocks.end()) {
                violation("mine " + ev.name + ": unknown block '" + *ev.onto + "'");
                return;
            }
            if (!view_cs.contains(it->second)) {
                violation("mine " + ev.name + ": '" + *ev.onto + "' not in the basis view");
                return;
            }
            view_cs.rewind_head(view_cs.label_of(it->second), it->second);
        }

        CandidateBlock cand = build_candidate(view_cs, view->tree, view->mp, mcfg);
        for (const Transaction& tx : cand.excluded)
            report.rejected.push_back({ev.time, ev.name, tx, "strict-validity"});

        MinedBlock mined = mine_simulated(cand, ev.randomizer);
        if (!validate_block_transactions(cur.cs, cur.tree, mined.block)) {
            violation("mine " + ev.name + ": block fails strict validity");
            return;
        }
        const AppendOutcome out = cur.cs.append(mined.block);
        if (!out.ok()) {
            violation("mine " + ev.name + ": append failed (" +
                      std::string(to_string(out.status)) + ")");
            return;
        }
        const ChainLabel lab = label_of_block(mined.block.header, sc.n_chains);
        named_blocks[ev.name] = mined.block.header.hash();
        report.blocks.push_back({ev.time, ev.name, lab, mined.block.header.height,
                                 mined.block.body.size(), mined.block.header.hash()});
        if (out.reorg) {
            if (cur.tree.height > 0 && out.reorg->fork_height <= cur.tree.height) {
                violation("mine " + ev.name + ": fork reaches committed account state");
                return;
            }
            report.reorgs.push_back({ev.time, ev.name, *out.reorg});
        }
        cur.mp.remove(mined.block.body);
        const AdvanceResult adv = advance_tree(cur.cs, cur.tree);
        if (adv.violation) {
            const auto& v = *adv.violation;
            violation("advance at height " + std::to_string(v.height) + ": account " +
                      std::to_string(v.account) + " cannot cover " + std::to_string(v.attempted));
            return;
        }
    }

    void run() {
        for (const Event& e : sc.events) {
            std::visit([&](const auto& ev) { handle(ev); }, e);
            if (report.violation) break;
            snapshots.emplace_back(event_time(e), cur);
        }
    }
};

}  // namespace

ReplayOutcome replay(const Scenario& sc) {
    RunReport report;
    report.n_chains = sc.n_chains;
    report.delta = sc.delta;
    Replayer r(sc, report);
    r.run();
    for (std::uint32_t i = 0; i < sc.n_chains; ++i)
        report.final_heights.push_back(r.cur.cs.height(ChainLabel{i}));
    report.tree_height = r.cur.tree.height;
    report.balances = r.cur.tree.balances;
    return ReplayOutcome{std::move(report), std::move(r.cur.cs), std::move(r.cur.tree)};
}

std::string RunReport::to_text() const {
    std::ostringstream os;
    os << "chains: " << n_chains << "\n";
    os << "delta: " << delta << "\n";
    os << "heights:";
    for (std::uint64_t h : final_heights) os << ' ' << h;
    os << "\n";
    os << "tree-height: " << tree_height << "\n";
    os << "balances:\n";
    for (const auto& [account, amount] : balances)
        os << "  " << account << ": " << amount << "\n";
    os << "blocks:\n";
    for (const BlockRecord& b : blocks)
        os << "  " << b.name << " t=" << b.time << " chain=" << b.chain.value
           << " height=" << b.height << " txs=" << b.tx_count << " digest=" << b.digest.hex()
           << "\n";
    os << "reorgs:\n";
    for (const ReorgRecord& r : reorgs)
        os << "  " << r.block_name << " t=" << r.time << " chain=" << r.event.chain.value
           << " fork-height=" << r.event.fork_height
           << " old-suffix=" << r.event.old_branch_suffix.size()
           << " new-suffix=" << r.event.new_branch_suffix.size() << "\n";
    os << "rejected:\n";
    for (const RejectedTx& r : rejected)
        os << "  t=" << r.time << " ctx=" << r.context << " tx=" << r.tx.from << "->" << r.tx.to
           << " value=" << r.tx.value << " nonce=" << r.tx.nonce << " reason=" << r.reason
           << "\n";
    os << "violation: " << (violation ? *violation : "none") << "\n";
    return os.str();
}

std::string RunReport::to_json_string(int indent) const {
    nlohmann::json j;
    j["chains"] = n_chains;
    j["delta"] = delta;
    j["heights"] = final_heights;
    j["tree_height"] = tree_height;
    auto& bal = j["balances"] = nlohmann::json::object();
    for (const auto& [account, amount] : balances) bal[std::to_string(account)] = amount;
    j["blocks"] = nlohmann::json::array();
    for (const BlockRecord& b : blocks)
        j["blocks"].push_back({{"name", b.name},
                               {"time", b.time},
                               {"chain", b.chain.value},
                               {"height", b.height},
                               {"txs", b.tx_count},
                               {"digest", b.digest.hex()}});
    j["reorgs"] = nlohmann::json::array();
    for (const ReorgRecord& r : reorgs)
        j["reorgs"].push_back({{"block", r.block_name},
                               {"time", r.time},
                               {"chain", r.event.chain.value},
                               {"fork_height", r.event.fork_height},
                               {"old_suffix", r.event.old_branch_suffix.size()},
                               {"new_suffix", r.event.new_branch_suffix.size()}});
    j["rejected"] = nlohmann::json::array();
    for (const RejectedTx& r : rejected)
        j["rejected"].push_back({{"time", r.time},
                                 {"context", r.context},
                                 {"from", r.tx.from},
                                 {"to", r.tx.to},
                                 {"value", r.tx.value},
                                 {"nonce", r.tx.nonce},
                                 {"reason", r.reason}});
    j["violation"] = violation ? nlohmann::json(*violation) : nlohmann::json(nullptr);
    return j.dump(indent);
}

}  // namespace hydra::scenario
