#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "hydra/accounts.hpp"
#include "hydra/ledger.hpp"
#include "hydra/types.hpp"

namespace hydra {

Digest max_target();  // every hash passes: handy for simulated scenarios

struct MiningConfig {
    Digest target = max_target();
    std::size_t max_block_txs = 1024;
    std::uint64_t nonce_bound = 1ull << 24;  // real-pow search budget
};

enum class AdmitStatus { accepted, duplicate, bad_signature, bad_value };

std::string_view to_string(AdmitStatus s);

// Pending transactions, one FIFO queue per label, deduplicated by identity.
class Mempool {
public:
    explicit Mempool(std::uint32_t n_chains);

    AdmitStatus add(const Transaction& tx);
    void remove(std::span<const Transaction> txs);
    bool contains(const Transaction& tx) const;
    std::size_t size() const { return known_.size(); }
    std::uint32_t n_chains() const { return static_cast<std::uint32_t>(queues_.size()); }
    const std::deque<Transaction>& queue(ChainLabel c) const { return queues_.at(c.value); }

private:
    std::vector<std::deque<Transaction>> queues_;
    std::unordered_set<TxId, TxIdHasher> known_;
};

// A header template plus the N retained transaction sets. The nonce and
// height fields are placeholders until proof-of-work fixes the label.
struct CandidateBlock {
    BlockHeader header;
    std::vector<std::vector<Transaction>> sets;
    std::vector<std::uint64_t> parent_heights;
    std::vector<Transaction> excluded;  // failed strict validity at selection time
};

// Select up to max_block_txs strictly-valid transactions per label (FIFO,
// within-set spends accumulated) and commit all N roots and head hashes.
CandidateBlock build_candidate(const ChainSet& cs, const AccountTree& f, const Mempool& mp,
                               const MiningConfig& cfg);

struct MinedBlock {
    Block block;
    std::vector<Transaction> returned_to_mempool;  // the N-1 unselected sets
};

// Simulated proof-of-work: the winning nonce is supplied (or drawn) rather
// than searched; the label still comes from the header hash.
MinedBlock mine_simulated(const CandidateBlock& c, std::uint64_t nonce);
MinedBlock mine_simulated(const CandidateBlock& c, std::mt19937_64& rng);

// Real proof-of-work: scan nonces from 0 until hash(header) < target.
// Returns nullopt when the nonce budget is exhausted.
std::optional<MinedBlock> mine_real(const CandidateBlock& c, const MiningConfig& cfg);

}  // namespace hydra
