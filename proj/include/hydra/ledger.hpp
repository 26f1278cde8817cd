#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hydra/types.hpp"

namespace hydra {

enum class AppendStatus {
    ok,
    unknown_parent,    // parent hash absent from the block's own chain
    label_mismatch,    // a body transaction carries a different label
    merkle_mismatch,   // body does not match the committed tx-set root
    height_mismatch,   // height != parent height + 1
    malformed_header,  // wrong number of parent hashes or roots
    duplicate_block,
};

std::string_view to_string(AppendStatus s);

// Head moved to a different branch: both suffixes descend from the common
// ancestor at fork_height - 1, listed in ascending height order.
struct ReorgEvent {
    ChainLabel chain;
    std::uint64_t fork_height{};
    std::vector<Block> old_branch_suffix;
    std::vector<Block> new_branch_suffix;
};

struct AppendOutcome {
    AppendStatus status{AppendStatus::ok};
    std::optional<ReorgEvent> reorg;
    bool ok() const { return status == AppendStatus::ok; }
};

struct ImportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// N block trees with one forced-label genesis per chain. Heads follow the
// longest-branch rule; equal-length branches keep the first-seen head.
// Single writer per instance; copies are independent snapshots.
class ChainSet {
public:
    explicit ChainSet(std::uint32_t n_chains);

    std::uint32_t n_chains() const { return n_chains_; }

    AppendOutcome append(const Block& b);

    std::uint64_t height(ChainLabel c) const;
    std::uint64_t min_height() const;
    const Block& head(ChainLabel c) const;
    Digest head_digest(ChainLabel c) const;
    std::vector<Digest> head_digests() const;

    bool contains(const Digest& d) const;
    const Block& block(const Digest& d) const;
    ChainLabel label_of(const Digest& d) const;

    // Genesis..head path of chain c, ascending height.
    std::vector<Block> active_branch(ChainLabel c) const;
    const Block& block_on_active_branch(ChainLabel c, std::uint64_t h) const;

    // Visit blocks on the branch ending at tip, head side first, stopping
    // once height <= floor. Never visits genesis.
    template <typename Fn>
    void walk_branch_above(const Digest& tip, std::uint64_t floor, Fn&& fn) const {
        const Entry* e = find(tip);
        while (e != nullptr && e->block.header.height > floor) {
            fn(e->block);
            e = find(e->parent());
        }
    }

    // Re-point a head at an older block of the same chain. Models a miner
    // whose local view has not caught up; scenario replay uses it on private
    // copies to stage forks. The longest-branch invariant is suspended until
    // the next append.
    void rewind_head(ChainLabel c, const Digest& d);

    std::size_t block_count() const { return order_.size(); }  // incl. genesis

    // Line-delimited record file: a version line, then one hex-encoded block
    // per line in append order (genesis blocks are implied by n_chains).
    void export_records(std::ostream& os) const;
    static ChainSet import_records(std::istream& is);  // throws ImportError

private:
    struct Entry {
        Block block;
        ChainLabel label;
        Digest digest;
        const Digest& parent() const { return block.header.parent_hashes[label.value]; }
    };

    const Entry* find(const Digest& d) const;
    const Entry& entry_of(const Digest& d) const;
    std::optional<ReorgEvent> move_head(ChainLabel c, const Entry& to);

    std::uint32_t n_chains_;
    std::unordered_map<Digest, Entry, DigestHasher> entries_;
    std::vector<Digest> order_;
    std::vector<Digest> heads_;
};

// Deterministic per-chain genesis: forced label, height 0, empty body.
Block make_genesis(std::uint32_t n_chains, std::uint32_t chain);

std::vector<std::uint8_t> serialize_block(const Block& b);
Block deserialize_block(std::span<const std::uint8_t> bytes, std::uint32_t n_chains);

}  // namespace hydra
