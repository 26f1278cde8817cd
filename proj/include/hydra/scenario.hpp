#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hydra/accounts.hpp"
#include "hydra/ledger.hpp"
#include "hydra/miner.hpp"

namespace hydra::scenario {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TxEvent {
    double time{};
    Transaction tx;
};

// A simulated-pow block found at `time`. The randomizer becomes the header
// nonce, so the label stays hash-derived yet the run replays bit-identically.
// `basis_time` mines against the scripted state as of that earlier time (a
// miner whose view lags); `onto` extends a previously named block even if it
// lost the head race, which is how scenarios stage forks.
struct MineEvent {
    double time{};
    std::string name;
    std::string miner;
    std::uint64_t randomizer{};
    std::optional<double> basis_time;
    std::optional<std::string> onto;
};

using Event = std::variant<TxEvent, MineEvent>;

struct Scenario {
    std::uint32_t n_chains = 1;
    std::uint32_t delta = 5;
    std::uint64_t seed = 0;
    std::size_t max_block_txs = 1024;
    std::map<AccountId, std::uint64_t> allocations;
    std::vector<Event> events;  // stable-sorted by time
};

// Line-oriented text:
//   chains <N> | delta <D> | seed <u64> | max-block-txs <n>
//   alloc <account> <balance>
//   tx <time> <from> <to> <value> <nonce> [sig <token>]
//   mine <time> <name> <miner> <randomizer> [basis <time> | onto <name>]
// '#' starts a comment.
Scenario parse(std::istream& is);
Scenario parse_file(const std::string& path);

struct RejectedTx {
    double time{};
    std::string context;  // "mempool" or the mine event that skipped it
    Transaction tx;
    std::string reason;
};

struct BlockRecord {
    double time{};
    std::string name;
    ChainLabel chain;
    std::uint64_t height{};
    std::size_t tx_count{};
    Digest digest;
};

struct ReorgRecord {
    double time{};
    std::string block_name;
    ReorgEvent event;
};

struct RunReport {
    std::uint32_t n_chains{};
    std::uint32_t delta{};
    std::vector<std::uint64_t> final_heights;
    std::uint64_t tree_height{};
    std::map<AccountId, std::uint64_t> balances;
    std::vector<BlockRecord> blocks;
    std::vector<ReorgRecord> reorgs;
    std::vector<RejectedTx> rejected;
    std::optional<std::string> violation;

    bool ok() const { return !violation.has_value(); }
    std::string to_text() const;
    std::string to_json_string(int indent = 2) const;
};

struct ReplayOutcome {
    RunReport report;
    ChainSet chains;
    AccountTree tree;
};

// Deterministic replay. Protocol violations (unknown parent, fork reaching
// at or below the account-tree height, negative balance) stop the run and
// land in report.violation instead of throwing.
ReplayOutcome replay(const Scenario& sc);

}  // namespace hydra::scenario
