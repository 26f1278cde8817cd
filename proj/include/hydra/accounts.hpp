#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>

#include "hydra/ledger.hpp"
#include "hydra/types.hpp"

namespace hydra {

// Lagged account state. Balances reflect every transaction in blocks up to
// and including `height` on the active branches of all chains; the tree
// trails the shortest chain by at least `lag` blocks so that a fork on one
// chain cannot cascade into the others.
struct AccountTree {
    std::uint64_t height{0};
    std::uint32_t lag{5};
    std::map<AccountId, std::uint64_t> balances;
};

std::uint64_t balance(const AccountTree& f, AccountId a);

// Sum of values sent from `a` in blocks above the tree height on the branch
// ending at `tip`. The tip must sit on chain label(a) for the result to
// mean anything, since all of a's transactions carry that label.
std::uint64_t pending_spend_on_branch(const ChainSet& cs, const Digest& tip,
                                      const AccountTree& f, AccountId a);

// S(a): pending spend on the active branch of a's own chain.
std::uint64_t pending_spend(const ChainSet& cs, const AccountTree& f, AccountId a);

// Strict validity: F[a] - S(a) > v. The active branch may never spend more
// from an account than the tree records for it.
bool is_strictly_valid(const ChainSet& cs, const AccountTree& f, const Transaction& tx);

struct BalanceViolation {
    AccountId account{};
    std::uint64_t attempted{};
    std::uint64_t available{};
    ChainLabel chain{};
    std::uint64_t height{};
};

struct AdvanceResult {
    std::uint64_t heights_applied{0};
    // Unreachable when every applied block passed strict validity; when set,
    // the tree was left untouched.
    std::optional<BalanceViolation> violation;
};

// While every chain exceeds the tree height by more than the lag, apply the
// blocks of the next height on all active branches (chain 0..N-1; the order
// does not affect the result for strictly valid blocks) and bump the height.
AdvanceResult advance_tree(const ChainSet& cs, AccountTree& f);

// True iff the block's transactions, applied in order with within-block
// spends accumulated, all satisfy strict validity against the branch the
// block extends (which may not be the active one).
bool validate_block_transactions(const ChainSet& cs, const AccountTree& f, const Block& b);

// Genesis allocation file: one "<account> <balance>" pair per line,
// '#' comments and blank lines ignored.
std::map<AccountId, std::uint64_t> load_allocations(std::istream& is);

// "account,balance" rows in ascending account order.
void write_balances_csv(const AccountTree& f, std::ostream& os);

}  // namespace hydra
