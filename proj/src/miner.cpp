#include "hydra/miner.hpp"

#include <algorithm>
#include <cassert>

namespace hydra {

Digest max_target() {
    Digest d;
    d.bytes.fill(0xff);
    return d;
}

std::string_view to_string(AdmitStatus s) {
    switch (s) {
        case AdmitStatus::accepted: return "accepted";
        case AdmitStatus::duplicate: return "duplicate";
        case AdmitStatus::bad_signature: return "bad-signature";
        case AdmitStatus::bad_value: return "bad-value";
    }
    return "unknown";
}

Mempool::Mempool(std::uint32_t n_chains) : queues_(n_chains) { assert(n_chains >= 1); }

AdmitStatus Mempool::add(const Transaction& tx) {
    if (tx.value == 0) return AdmitStatus::bad_value;
    if (!signature_valid(tx)) return AdmitStatus::bad_signature;
    if (!known_.insert(tx_id(tx)).second) return AdmitStatus::duplicate;
    queues_[label_of_tx(tx, n_chains()).value].push_back(tx);
    return AdmitStatus::accepted;
}

void Mempool::remove(std::span<const Transaction> txs) {
    for (const Transaction& tx : txs) {
        if (known_.erase(tx_id(tx)) == 0) continue;
        auto& q = queues_[label_of_tx(tx, n_chains()).value];
        auto it = std::find_if(q.begin(), q.end(),
                               [&](const Transaction& t) { return tx_id(t) == tx_id(tx); });
        if (it != q.end()) q.erase(it);
    }
}

bool Mempool::contains(const Transaction& tx) const { return known_.count(tx_id(tx)) != 0; }

CandidateBlock build_candidate(const ChainSet& cs, const AccountTree& f, const Mempool& mp,
                               const MiningConfig& cfg) {
    const std::uint32_t n = cs.n_chains();
    CandidateBlock c;
    c.sets.resize(n);
    c.parent_heights.resize(n);
    c.header.parent_hashes = cs.head_digests();
    c.header.txset_roots.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const ChainLabel lab{i};
        c.parent_heights[i] = cs.height(lab);
        const Digest tip = cs.head_digest(lab);
        std::map<AccountId, std::uint64_t> chain_pending;  // branch spend, cached per sender
        std::map<AccountId, std::uint64_t> selected_spend;
        for (const Transaction& tx : mp.queue(lab)) {
            if (c.sets[i].size() >= cfg.max_block_txs) break;
            auto [it, fresh] = chain_pending.try_emplace(tx.from, 0);
            if (fresh) it->second = pending_spend_on_branch(cs, tip, f, tx.from);
            const std::uint64_t spent = it->second + selected_spend[tx.from];
            const std::uint64_t bal = balance(f, tx.from);
            if (spent < bal && bal - spent > tx.value) {
                c.sets[i].push_back(tx);
                selected_spend[tx.from] += tx.value;
            } else {
                c.excluded.push_back(tx);
            }
        }
        c.header.txset_roots[i] = merkle_root(c.sets[i]);
    }
    c.header.nonce = 0;
    c.header.height = 0;
    return c;
}

namespace {

MinedBlock finalize(const CandidateBlock& c, std::uint64_t nonce) {
    const auto n = static_cast<std::uint32_t>(c.sets.size());
    MinedBlock m;
    m.block.header = c.header;
    m.block.header.nonce = nonce;
    const ChainLabel lab = label_of_block(m.block.header, n);
    m.block.header.height = c.parent_heights[lab.value] + 1;
    m.block.body = c.sets[lab.value];
    for (std::uint32_t i = 0; i < n; ++i) {
        if (i == lab.value) continue;
        m.returned_to_mempool.insert(m.returned_to_mempool.end(), c.sets[i].begin(),
                                     c.sets[i].end());
    }
    return m;
}

}  // namespace

MinedBlock mine_simulated(const CandidateBlock& c, std::uint64_t nonce) {
    return finalize(c, nonce);
}

MinedBlock mine_simulated(const CandidateBlock& c, std::mt19937_64& rng) {
    return finalize(c, std::uniform_int_distribution<std::uint64_t>{}(rng));
}

std::optional<MinedBlock> mine_real(const CandidateBlock& c, const MiningConfig& cfg) {
    std::vector<std::uint8_t> preimage = c.header.pow_preimage();
    const std::size_t nonce_offset = preimage.size() - 8;  // trailing field
    for (std::uint64_t nonce = 0; nonce < cfg.nonce_bound; ++nonce) {
        for (int i = 0; i < 8; ++i)
            preimage[nonce_offset + i] = static_cast<std::uint8_t>(nonce >> (8 * (7 - i)));
        if (sha256(preimage) < cfg.target) return finalize(c, nonce);
    }
    return std::nullopt;
}

}  // namespace hydra
