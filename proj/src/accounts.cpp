#include "hydra/accounts.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hydra {

std::uint64_t balance(const AccountTree& f, AccountId a) {
    auto it = f.balances.find(a);
    return it == f.balances.end() ? 0 : it->second;
}

std::uint64_t pending_spend_on_branch(const ChainSet& cs, const Digest& tip,
                                      const AccountTree& f, AccountId a) {
    std::uint64_t total = 0;
    cs.walk_branch_above(tip, f.height, [&](const Block& b) {
        for (const Transaction& tx : b.body)
            if (tx.from == a) total += tx.value;
    });
    return total;
}

std::uint64_t pending_spend(const ChainSet& cs, const AccountTree& f, AccountId a) {
    const ChainLabel c = label_of_account(a, cs.n_chains());
    return pending_spend_on_branch(cs, cs.head_digest(c), f, a);
}

namespace {

bool strictly_covers(std::uint64_t bal, std::uint64_t spent, std::uint64_t value) {
    if (spent >= bal) return false;
    return bal - spent > value;
}

}  // namespace

bool is_strictly_valid(const ChainSet& cs, const AccountTree& f, const Transaction& tx) {
    return strictly_covers(balance(f, tx.from), pending_spend(cs, f, tx.from), tx.value);
}

bool validate_block_transactions(const ChainSet& cs, const AccountTree& f, const Block& b) {
    const ChainLabel lab = label_of_block(b.header, cs.n_chains());
    const Digest& parent = b.header.parent_hashes[lab.value];
    std::map<AccountId, std::uint64_t> in_block;
    for (const Transaction& tx : b.body) {
        const std::uint64_t prior =
            pending_spend_on_branch(cs, parent, f, tx.from) + in_block[tx.from];
        if (!strictly_covers(balance(f, tx.from), prior, tx.value)) return false;
        in_block[tx.from] += tx.value;
    }
    return true;
}

AdvanceResult advance_tree(const ChainSet& cs, AccountTree& f) {
    AdvanceResult res;
    auto work = f.balances;
    std::uint64_t h = f.height;
    const std::uint64_t min_h = cs.min_height();
    while (min_h > h && min_h - h > f.lag) {
        const std::uint64_t target = h + 1;
        for (std::uint32_t i = 0; i < cs.n_chains(); ++i) {
            const Block& blk = cs.block_on_active_branch(ChainLabel{i}, target);
            for (const Transaction& tx : blk.body) {
                auto& from_bal = work[tx.from];
                if (from_bal < tx.value) {
                    res.heights_applied = 0;
                    res.violation = BalanceViolation{tx.from, tx.value, from_bal,
                                                     ChainLabel{i}, target};
                    return res;
                }
                from_bal -= tx.value;
                work[tx.to] += tx.value;
            }
        }
        ++h;
        ++res.heights_applied;
    }
    f.balances = std::move(work);
    f.height = h;
    return res;
}

std::map<AccountId, std::uint64_t> load_allocations(std::istream& is) {
    std::map<AccountId, std::uint64_t> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::istringstream ss(line);
        AccountId account;
        std::uint64_t amount;
        if (!(ss >> account)) continue;  // blank or comment-only line
        if (!(ss >> amount))
            throw std::runtime_error("allocation line " + std::to_string(line_no) +
                                     ": expected '<account> <balance>'");
        out[account] += amount;
    }
    return out;
}

void write_balances_csv(const AccountTree& f, std::ostream& os) {
    os << "account,balance\n";
    for (const auto& [account, amount] : f.balances) os << account << ',' << amount << '\n';
}

}  // namespace hydra
