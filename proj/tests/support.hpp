#pragma once

// Shared helpers for protocol tests: label-targeted mining and a randomized
// multi-chain world that exercises forks, reorgs, and tree advancement.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "hydra/accounts.hpp"
#include "hydra/ledger.hpp"
#include "hydra/miner.hpp"

namespace hydra::testsupport {

// Scan nonces from `start` until the candidate's hash lands on `want`.
inline MinedBlock mine_with_label(const CandidateBlock& cand, ChainLabel want,
                                  std::uint64_t start = 0) {
    const auto n = static_cast<std::uint32_t>(cand.sets.size());
    BlockHeader probe = cand.header;
    for (std::uint64_t nonce = start; nonce < start + (1ull << 22); ++nonce) {
        probe.nonce = nonce;
        if (label_of_block(probe, n) == want) return mine_simulated(cand, nonce);
    }
    throw std::runtime_error("label search exhausted");
}

// Empty-bodied block extending `view`'s head of the wanted chain.
inline MinedBlock mine_empty_on(const ChainSet& view, ChainLabel want, std::uint64_t start = 0) {
    const AccountTree no_accounts{0, 1, {}};
    const Mempool no_txs(view.n_chains());
    const MiningConfig cfg;
    return mine_with_label(build_candidate(view, no_accounts, no_txs, cfg), want, start);
}

// Block with a hand-picked body on the wanted chain, bypassing mempool
// selection (and therefore strict validity) the way a hostile or pre-rule
// miner could.
inline Block mine_block_with_body(const ChainSet& view, ChainLabel want,
                                  std::vector<Transaction> body, std::uint64_t start = 0) {
    const std::uint32_t n = view.n_chains();
    CandidateBlock c;
    c.header.parent_hashes = view.head_digests();
    c.header.txset_roots.assign(n, merkle_root({}));
    c.header.txset_roots[want.value] = merkle_root(body);
    c.sets.assign(n, {});
    c.sets[want.value] = std::move(body);
    c.parent_heights.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) c.parent_heights[i] = view.height(ChainLabel{i});
    return mine_with_label(c, want, start).block;
}

// Test-side reimplementation of tree advancement with an explicit per-height
// chain order, used as the order-independence oracle.
inline std::optional<std::map<AccountId, std::uint64_t>> advance_permuted(
    const ChainSet& cs, const AccountTree& f, const std::vector<std::uint32_t>& order) {
    auto balances = f.balances;
    std::uint64_t h = f.height;
    while (cs.min_height() > h && cs.min_height() - h > f.lag) {
        for (std::uint32_t i : order) {
            const Block& blk = cs.block_on_active_branch(ChainLabel{i}, h + 1);
            for (const Transaction& tx : blk.body) {
                auto it = balances.find(tx.from);
                if (it == balances.end() || it->second < tx.value) return std::nullopt;
                it->second -= tx.value;
                balances[tx.to] += tx.value;
            }
        }
        ++h;
    }
    return balances;
}

struct WorldChecks {
    std::uint64_t reorgs = 0;
    std::uint64_t blocks = 0;
};

// Randomized protocol run. Every step mines one block (sometimes from a
// deliberately stale view to provoke forks), appends it, advances the tree,
// and asserts the cross-module invariants via the `require` callback.
class RandomWorld {
public:
    RandomWorld(std::uint32_t n_chains, std::uint32_t lag, std::uint64_t seed)
        : cs_(n_chains), tree_{0, lag, {}}, mp_(n_chains), rng_(seed) {
        std::uniform_int_distribution<AccountId> acct(0, 9999);
        for (int i = 0; i < 8; ++i) {
            const AccountId a = acct(rng_);
            tree_.balances[a] += 50 + rng_() % 200;
            accounts_.push_back(a);
        }
        max_height_.assign(n_chains, 0);
    }

    const ChainSet& chains() const { return cs_; }
    const AccountTree& tree() const { return tree_; }
    const WorldChecks& stats() const { return stats_; }

    void admit_random_txs(int count) {
        std::uniform_int_distribution<std::size_t> pick(0, accounts_.size() - 1);
        for (int i = 0; i < count; ++i) {
            Transaction tx;
            tx.from = accounts_[pick(rng_)];
            tx.to = accounts_[pick(rng_)];
            tx.value = 1 + rng_() % 40;
            tx.nonce = next_nonce_++;
            tx.signature = tx.from;
            mp_.add(tx);
        }
    }

    // One mining step. `require` receives (condition, message) and is
    // expected to fail the enclosing test when the condition is false.
    // A stale step stages the competing-miner pattern end to end: rewind one
    // level on a random chain, mine a sibling there, then extend it so the
    // side branch overtakes; a normal step mines on the heads with a
    // hash-random label.
    template <typename Require>
    void step(double stale_prob, Require&& require) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng_) < stale_prob) {
            const ChainLabel c{static_cast<std::uint32_t>(rng_() % cs_.n_chains())};
            const std::uint64_t head_h = cs_.height(c);
            if (head_h >= tree_.height + 2) {
                ChainSet view = cs_;
                const Block& anchor = cs_.block_on_active_branch(c, head_h - 1);
                view.rewind_head(c, anchor.header.hash());
                apply(mine_with_label(build_candidate(view, tree_, mp_, cfg_), c,
                                      rng_() & 0xffffffff),
                      require);
                if (cs_.height(c) == head_h) {  // sibling lost the tie: overtake it
                    ChainSet extend = cs_;
                    extend.rewind_head(c, recent_.back());
                    apply(mine_with_label(build_candidate(extend, tree_, mp_, cfg_), c,
                                          rng_() & 0xffffffff),
                          require);
                }
                return;
            }
        }
        apply(mine_simulated(build_candidate(cs_, tree_, mp_, cfg_), rng_), require);
    }

private:
    template <typename Require>
    void apply(MinedBlock mined, Require&& require) {
        require(validate_block_transactions(cs_, tree_, mined.block),
                "mined block passes strict validity");
        const auto heads_before = cs_.head_digests();
        const auto balances_before = tree_.balances;
        const AppendOutcome out = cs_.append(mined.block);
        require(out.ok(), "append accepted a freshly mined block");
        recent_.push_back(mined.block.header.hash());
        ++stats_.blocks;

        const ChainLabel lab = label_of_block(mined.block.header, cs_.n_chains());
        max_height_[lab.value] = std::max(max_height_[lab.value], mined.block.header.height);
        for (std::uint32_t i = 0; i < cs_.n_chains(); ++i)
            require(cs_.height(ChainLabel{i}) == max_height_[i],
                    "head follows the longest branch");

        if (out.reorg) {
            ++stats_.reorgs;
            require(out.reorg->fork_height > tree_.height,
                    "reorg stays above the committed tree height");
            require(tree_.balances == balances_before, "reorg alone never moves balances");
            for (std::uint32_t i = 0; i < cs_.n_chains(); ++i)
                if (i != out.reorg->chain.value)
                    require(cs_.head_digest(ChainLabel{i}) == heads_before[i],
                            "reorg is local to its chain");
        }

        mp_.remove(mined.block.body);

        // order-independence oracle, checked before the canonical advance
        std::vector<std::uint32_t> order(cs_.n_chains());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng_);
        const auto permuted = advance_permuted(cs_, tree_, order);

        const AdvanceResult adv = advance_tree(cs_, tree_);
        require(!adv.violation.has_value(), "advance never hits a negative balance");
        require(permuted.has_value(), "permuted advance never hits a negative balance");
        require(*permuted == tree_.balances, "advance order does not change balances");

        const std::uint64_t min_h = cs_.min_height();
        require(min_h - tree_.height <= tree_.lag, "tree advanced as far as the lag allows");
        if (tree_.height > 0)
            require(min_h - tree_.height == tree_.lag, "tree trails the shortest chain by the lag");
    }

private:
    ChainSet cs_;
    AccountTree tree_;
    Mempool mp_;
    MiningConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<AccountId> accounts_;
    std::vector<std::uint64_t> max_height_;
    std::vector<Digest> recent_;
    std::uint64_t next_nonce_ = 1;
    WorldChecks stats_;
};

}  // namespace hydra::testsupport
