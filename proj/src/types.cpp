#include "hydra/types.hpp"

#include <cassert>
#include <stdexcept>

namespace hydra {

TxId tx_id(const Transaction& tx) { return TxId{tx.from, tx.to, tx.value, tx.nonce}; }

std::size_t TxIdHasher::operator()(const TxId& id) const noexcept {
    // splitmix64-style finalization over the mixed fields
    std::uint64_t x = id.from * 0x9e3779b97f4a7c15ULL;
    x ^= id.to + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
    x ^= id.value + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
    x ^= id.nonce + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<std::size_t>(x);
}

bool signature_valid(const Transaction& tx) { return tx.signature == tx.from; }

void ByteWriter::put_u32(std::uint32_t v) {
    for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
    for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_digest(const Digest& d) {
    buf_.insert(buf_.end(), d.bytes.begin(), d.bytes.end());
}

std::uint32_t ByteReader::u32() {
    if (data_.size() - pos_ < 4) throw std::out_of_range("truncated record");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64() {
    if (data_.size() - pos_ < 8) throw std::out_of_range("truncated record");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
}

Digest ByteReader::digest() {
    if (data_.size() - pos_ < 32) throw std::out_of_range("truncated record");
    Digest d;
    for (auto& b : d.bytes) b = data_[pos_++];
    return d;
}

std::vector<std::uint8_t> BlockHeader::pow_preimage() const {
    ByteWriter w;
    for (const Digest& d : parent_hashes) w.put_digest(d);
    for (const Digest& d : txset_roots) w.put_digest(d);
    w.put_u64(nonce);
    return w.take();
}

Digest BlockHeader::hash() const {
    const auto bytes = pow_preimage();
    return sha256(bytes);
}

ChainLabel label_of_account(AccountId a, std::uint32_t n_chains) {
    assert(n_chains >= 1);
    return ChainLabel{static_cast<std::uint32_t>(a % n_chains)};
}

ChainLabel label_of_tx(const Transaction& tx, std::uint32_t n_chains) {
    return label_of_account(tx.from, n_chains);
}

ChainLabel label_of_block(const BlockHeader& header, std::uint32_t n_chains) {
    assert(n_chains >= 1);
    return ChainLabel{digest_mod(header.hash(), n_chains)};
}

std::vector<std::uint8_t> canonical_bytes(const Transaction& tx) {
    ByteWriter w;
    w.put_u64(tx.from);
    w.put_u64(tx.to);
    w.put_u64(tx.value);
    w.put_u64(tx.nonce);
    w.put_u64(tx.signature);
    return w.take();
}

Digest tx_digest(const Transaction& tx) {
    const auto bytes = canonical_bytes(tx);
    return sha256(bytes);
}

namespace {

Digest hash_pair(const Digest& a, const Digest& b) {
    std::array<std::uint8_t, 64> buf;
    std::copy(a.bytes.begin(), a.bytes.end(), buf.begin());
    std::copy(b.bytes.begin(), b.bytes.end(), buf.begin() + 32);
    return sha256(buf);
}

}  // namespace

Digest merkle_root(std::span<const Transaction> txs) {
    if (txs.empty()) return sha256({});
    std::vector<Digest> level;
    level.reserve(txs.size());
    for (const Transaction& tx : txs) level.push_back(tx_digest(tx));
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            const Digest& left = level[i];
            const Digest& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(hash_pair(left, right));
        }
        level = std::move(next);
    }
    return level.front();
}

}  // namespace hydra
