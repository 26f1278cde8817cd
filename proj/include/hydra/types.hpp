#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "hydra/hash.hpp"

namespace hydra {

// Account numbers stand in for the hash of a public key; no key material is
// modeled.
using AccountId = std::uint64_t;

// Chain index in {0, ..., N-1}.
struct ChainLabel {
    std::uint32_t value{};
    auto operator<=>(const ChainLabel&) const = default;
};

// Value transfer between two accounts. The signature is an opaque token
// accepted iff it equals the sender account id.
struct Transaction {
    AccountId from{};
    AccountId to{};
    std::uint64_t value{};  // smallest currency unit, must be > 0
    std::uint64_t nonce{};  // uniqueness discriminator
    std::uint64_t signature{};

    auto operator<=>(const Transaction&) const = default;
};

// (from, to, value, nonce) identifies a transaction; the signature does not
// contribute to identity.
struct TxId {
    AccountId from{};
    AccountId to{};
    std::uint64_t value{};
    std::uint64_t nonce{};
    auto operator<=>(const TxId&) const = default;
};

TxId tx_id(const Transaction& tx);

struct TxIdHasher {
    std::size_t operator()(const TxId& id) const noexcept;
};

bool signature_valid(const Transaction& tx);

struct BlockHeader {
    std::vector<Digest> parent_hashes;  // heads of all N chains at mining time
    std::vector<Digest> txset_roots;    // Merkle roots of the N per-label tx sets
    std::uint64_t nonce{};
    std::uint64_t height{};

    // Proof-of-work preimage: parent hashes, tx-set roots, nonce. The height
    // depends on the label, which is only known after hashing, so it is
    // stamped afterwards and never enters the preimage.
    std::vector<std::uint8_t> pow_preimage() const;
    Digest hash() const;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> body;  // transactions of exactly one label
};

ChainLabel label_of_account(AccountId a, std::uint32_t n_chains);
ChainLabel label_of_tx(const Transaction& tx, std::uint32_t n_chains);
ChainLabel label_of_block(const BlockHeader& header, std::uint32_t n_chains);

// Canonical serialization: fixed-width big-endian fields concatenated in
// declaration order. A transaction is 40 bytes:
//   from(8) | to(8) | value(8) | nonce(8) | signature(8)
std::vector<std::uint8_t> canonical_bytes(const Transaction& tx);
Digest tx_digest(const Transaction& tx);

// Binary Merkle tree over canonical transaction bytes. A level with an odd
// node count duplicates its last node; the empty set hashes to sha256("").
Digest merkle_root(std::span<const Transaction> txs);

// Serialization helpers shared by the header preimage and the ledger export
// format.
class ByteWriter {
public:
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_digest(const Digest& d);
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    const std::vector<std::uint8_t>& bytes() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}
    std::uint32_t u32();  // all readers throw std::out_of_range on truncation
    std::uint64_t u64();
    Digest digest();
    bool done() const { return pos_ == data_.size(); }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace hydra
