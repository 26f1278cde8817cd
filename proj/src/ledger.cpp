#include "hydra/ledger.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>
#include <sstream>

namespace hydra {

std::string_view to_string(AppendStatus s) {
    switch (s) {
        case AppendStatus::ok: return "ok";
        case AppendStatus::unknown_parent: return "unknown-parent";
        case AppendStatus::label_mismatch: return "label-mismatch";
        case AppendStatus::merkle_mismatch: return "merkle-mismatch";
        case AppendStatus::height_mismatch: return "height-mismatch";
        case AppendStatus::malformed_header: return "malformed-header";
        case AppendStatus::duplicate_block: return "duplicate-block";
    }
    return "unknown";
}

Block make_genesis(std::uint32_t n_chains, std::uint32_t chain) {
    Block g;
    g.header.parent_hashes.assign(n_chains, Digest{});
    g.header.txset_roots.assign(n_chains, merkle_root({}));
    g.header.nonce = chain;  // distinct digest per chain
    g.header.height = 0;
    return g;
}

ChainSet::ChainSet(std::uint32_t n_chains) : n_chains_(n_chains) {
    assert(n_chains >= 1);
    for (std::uint32_t i = 0; i < n_chains; ++i) {
        Block g = make_genesis(n_chains, i);
        Entry e{std::move(g), ChainLabel{i}, Digest{}};
        e.digest = e.block.header.hash();
        const Digest d = e.digest;
        entries_.emplace(d, std::move(e));
        order_.push_back(d);
        heads_.push_back(d);
    }
}

const ChainSet::Entry* ChainSet::find(const Digest& d) const {
    auto it = entries_.find(d);
    return it == entries_.end() ? nullptr : &it->second;
}

const ChainSet::Entry& ChainSet::entry_of(const Digest& d) const {
    const Entry* e = find(d);
    if (e == nullptr) throw std::out_of_range("unknown block digest");
    return *e;
}

std::uint64_t ChainSet::height(ChainLabel c) const {
    return entry_of(heads_.at(c.value)).block.header.height;
}

std::uint64_t ChainSet::min_height() const {
    std::uint64_t m = height(ChainLabel{0});
    for (std::uint32_t i = 1; i < n_chains_; ++i) m = std::min(m, height(ChainLabel{i}));
    return m;
}

const Block& ChainSet::head(ChainLabel c) const { return entry_of(heads_.at(c.value)).block; }

Digest ChainSet::head_digest(ChainLabel c) const { return heads_.at(c.value); }

std::vector<Digest> ChainSet::head_digests() const { return heads_; }

bool ChainSet::contains(const Digest& d) const { return entries_.count(d) != 0; }

const Block& ChainSet::block(const Digest& d) const { return entry_of(d).block; }

ChainLabel ChainSet::label_of(const Digest& d) const { return entry_of(d).label; }

std::vector<Block> ChainSet::active_branch(ChainLabel c) const {
    std::vector<Block> out;
    const Entry* e = find(heads_.at(c.value));
    while (e != nullptr) {
        out.push_back(e->block);
        if (e->block.header.height == 0) break;
        e = find(e->parent());
    }
    std::reverse(out.begin(), out.end());
    return out;
}

const Block& ChainSet::block_on_active_branch(ChainLabel c, std::uint64_t h) const {
    const Entry* e = find(heads_.at(c.value));
    if (e == nullptr || h > e->block.header.height)
        throw std::out_of_range("height beyond head");
    while (e->block.header.height > h) e = &entry_of(e->parent());
    return e->block;
}

AppendOutcome ChainSet::append(const Block& b) {
    if (b.header.parent_hashes.size() != n_chains_ || b.header.txset_roots.size() != n_chains_)
        return {AppendStatus::malformed_header, std::nullopt};
    const ChainLabel lab = label_of_block(b.header, n_chains_);
    for (const Transaction& tx : b.body)
        if (label_of_tx(tx, n_chains_) != lab) return {AppendStatus::label_mismatch, std::nullopt};
    if (merkle_root(b.body) != b.header.txset_roots[lab.value])
        return {AppendStatus::merkle_mismatch, std::nullopt};
    const Entry* parent = find(b.header.parent_hashes[lab.value]);
    if (parent == nullptr || parent->label != lab)
        return {AppendStatus::unknown_parent, std::nullopt};
    if (b.header.height != parent->block.header.height + 1)
        return {AppendStatus::height_mismatch, std::nullopt};

    Entry e{b, lab, b.header.hash()};
    const Digest d = e.digest;
    if (entries_.count(d) != 0) return {AppendStatus::duplicate_block, std::nullopt};
    auto [it, inserted] = entries_.emplace(d, std::move(e));
    assert(inserted);
    order_.push_back(d);

    std::optional<ReorgEvent> reorg;
    const Entry& head_entry = entry_of(heads_[lab.value]);
    if (it->second.block.header.height > head_entry.block.header.height)
        reorg = move_head(lab, it->second);
    return {AppendStatus::ok, std::move(reorg)};
}

std::optional<ReorgEvent> ChainSet::move_head(ChainLabel c, const Entry& to) {
    const Entry* old_head = &entry_of(heads_[c.value]);
    heads_[c.value] = to.digest;

    // Climb the new branch down to the old head's height.
    std::vector<Block> new_suffix;
    const Entry* x = &to;
    while (x->block.header.height > old_head->block.header.height) {
        new_suffix.push_back(x->block);
        x = &entry_of(x->parent());
    }
    if (x == old_head) return std::nullopt;  // plain extension

    // Distinct branches: walk both down in lockstep to the fork ancestor.
    std::vector<Block> old_suffix;
    const Entry* y = old_head;
    while (x->digest != y->digest) {
        new_suffix.push_back(x->block);
        old_suffix.push_back(y->block);
        x = &entry_of(x->parent());
        y = &entry_of(y->parent());
    }
    ReorgEvent ev;
    ev.chain = c;
    ev.fork_height = x->block.header.height + 1;
    std::reverse(new_suffix.begin(), new_suffix.end());
    std::reverse(old_suffix.begin(), old_suffix.end());
    ev.new_branch_suffix = std::move(new_suffix);
    ev.old_branch_suffix = std::move(old_suffix);
    return ev;
}

void ChainSet::rewind_head(ChainLabel c, const Digest& d) {
    const Entry& e = entry_of(d);
    if (e.label != c) throw std::invalid_argument("block not on that chain");
    heads_.at(c.value) = d;
}

std::vector<std::uint8_t> serialize_block(const Block& b) {
    ByteWriter w;
    for (const Digest& d : b.header.parent_hashes) w.put_digest(d);
    for (const Digest& d : b.header.txset_roots) w.put_digest(d);
    w.put_u64(b.header.nonce);
    w.put_u64(b.header.height);
    w.put_u32(static_cast<std::uint32_t>(b.body.size()));
    for (const Transaction& tx : b.body) {
        w.put_u64(tx.from);
        w.put_u64(tx.to);
        w.put_u64(tx.value);
        w.put_u64(tx.nonce);
        w.put_u64(tx.signature);
    }
    return w.take();
}

Block deserialize_block(std::span<const std::uint8_t> bytes, std::uint32_t n_chains) {
    ByteReader r(bytes);
    Block b;
    b.header.parent_hashes.resize(n_chains);
    b.header.txset_roots.resize(n_chains);
    for (auto& d : b.header.parent_hashes) d = r.digest();
    for (auto& d : b.header.txset_roots) d = r.digest();
    b.header.nonce = r.u64();
    b.header.height = r.u64();
    const std::uint32_t count = r.u32();
    b.body.resize(count);
    for (auto& tx : b.body) {
        tx.from = r.u64();
        tx.to = r.u64();
        tx.value = r.u64();
        tx.nonce = r.u64();
        tx.signature = r.u64();
    }
    if (!r.done()) throw std::out_of_range("trailing bytes in block record");
    return b;
}

namespace {

constexpr std::string_view kExportMagic = "hydra-chainset v1";

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

std::vector<std::uint8_t> from_hex_line(const std::string& line) {
    if (line.size() % 2 != 0) throw ImportError("odd-length hex record");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out(line.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nib(line[2 * i]);
        const int lo = nib(line[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ImportError("bad hex digit in record");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

}  // namespace

void ChainSet::export_records(std::ostream& os) const {
    os << kExportMagic << ' ' << n_chains_ << '\n';
    for (std::size_t i = n_chains_; i < order_.size(); ++i) {
        const Entry& e = entry_of(order_[i]);
        os << to_hex(serialize_block(e.block)) << '\n';
    }
}

ChainSet ChainSet::import_records(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ImportError("empty chainset file");
    std::istringstream header(line);
    std::string magic, version;
    std::uint32_t n = 0;
    header >> magic >> version >> n;
    if (magic + " " + version != kExportMagic || n < 1)
        throw ImportError("not a hydra chainset record file");
    ChainSet cs(n);
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        Block b;
        try {
            b = deserialize_block(from_hex_line(line), n);
        } catch (const std::out_of_range& e) {
            throw ImportError("line " + std::to_string(line_no) + ": " + e.what());
        }
        const AppendOutcome out = cs.append(b);
        if (!out.ok())
            throw ImportError("line " + std::to_string(line_no) + ": " +
                              std::string(to_string(out.status)));
    }
    return cs;
}

}  // namespace hydra
