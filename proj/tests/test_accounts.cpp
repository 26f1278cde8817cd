#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "hydra/accounts.hpp"
#include "support.hpp"

using namespace hydra;
using testsupport::mine_block_with_body;
using testsupport::mine_empty_on;

namespace {

// The worked two-chain example: accounts a=0 (chain 0), c=1 (chain 1),
// d=2 (chain 0), b=3 (chain 1), with F[a]=10 and F[c]=20.
constexpr AccountId kA = 0, kC = 1, kD = 2, kB = 3;

AccountTree example_tree() {
    return AccountTree{0, 5, {{kA, 10}, {kC, 20}}};
}

Transaction tx(AccountId from, AccountId to, std::uint64_t value, std::uint64_t nonce = 1) {
    return Transaction{from, to, value, nonce, from};
}

}  // namespace

TEST_CASE("pending spend sums sender transactions above the tree height") {
    ChainSet cs(2);
    AccountTree f = example_tree();
    CHECK(pending_spend(cs, f, kA) == 0);

    REQUIRE(cs.append(mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 5)})).ok());
    CHECK(pending_spend(cs, f, kA) == 5);
    CHECK(pending_spend(cs, f, kC) == 0);

    // the cascade transfer, forced into a block the way a pre-strict-rule
    // chain would have carried it
    REQUIRE(cs.append(mine_block_with_body(cs, ChainLabel{1}, {tx(kC, kB, 25)})).ok());
    CHECK(pending_spend(cs, f, kC) == 25);

    // blocks at or below the tree height do not count
    f.height = 1;
    CHECK(pending_spend(cs, f, kA) == 0);
    CHECK(pending_spend(cs, f, kC) == 0);
}

TEST_CASE("strict validity requires F[a] - S(a) > v") {
    ChainSet cs(2);
    AccountTree f = example_tree();
    CHECK(is_strictly_valid(cs, f, tx(kA, kC, 5)));        // 10 - 0 > 5
    CHECK_FALSE(is_strictly_valid(cs, f, tx(kC, kB, 25)));  // 20 - 0 > 25 fails
    CHECK_FALSE(is_strictly_valid(cs, f, tx(kA, kD, 10)));  // strict: 10 - 0 > 10 fails
    CHECK_FALSE(is_strictly_valid(cs, f, tx(kB, kA, 1)));   // empty account

    REQUIRE(cs.append(mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 5)})).ok());
    CHECK_FALSE(is_strictly_valid(cs, f, tx(kA, kD, 5)));  // 10 - 5 > 5 fails
    CHECK(is_strictly_valid(cs, f, tx(kA, kD, 4)));
}

TEST_CASE("pending spend follows the active branch across a reorg") {
    ChainSet cs(2);
    AccountTree f = example_tree();
    const Block spend = mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 5)});
    REQUIRE(cs.append(spend).ok());
    CHECK(pending_spend(cs, f, kA) == 5);

    // sibling branch without the spend overtakes
    ChainSet stale(2);
    const Block alt1 = mine_empty_on(stale, ChainLabel{0}, spend.header.nonce + 1).block;
    REQUIRE(stale.append(alt1).ok());
    const Block alt2 = mine_empty_on(stale, ChainLabel{0}).block;
    REQUIRE(cs.append(alt1).ok());
    const AppendOutcome out = cs.append(alt2);
    REQUIRE(out.ok());
    REQUIRE(out.reorg.has_value());
    CHECK(pending_spend(cs, f, kA) == 0);
}

TEST_CASE("block validation applies within-block spends incrementally") {
    ChainSet cs(2);
    AccountTree f = example_tree();

    const Block empty = mine_block_with_body(cs, ChainLabel{0}, {});
    CHECK(validate_block_transactions(cs, f, empty));

    const Block over =
        mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 6), tx(kA, kD, 5, 2)});
    CHECK_FALSE(validate_block_transactions(cs, f, over));  // 6 + 5 overruns 10

    const Block under =
        mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 4), tx(kA, kD, 5, 2)});
    CHECK(validate_block_transactions(cs, f, under));  // 4 + 5 < 10 strictly
}

TEST_CASE("advancement waits for the lag and consumes one height per round") {
    ChainSet cs(2);
    AccountTree f = example_tree();
    f.lag = 5;

    // put the worked-example spend at height 1 on chain 0
    REQUIRE(cs.append(mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kC, 5)})).ok());
    for (int k = 0; k < 4; ++k)
        REQUIRE(cs.append(mine_empty_on(cs, ChainLabel{0}).block).ok());
    for (int k = 0; k < 5; ++k)
        REQUIRE(cs.append(mine_empty_on(cs, ChainLabel{1}).block).ok());

    // min height equals the lag: no advancement yet
    REQUIRE(cs.min_height() == 5);
    AdvanceResult res = advance_tree(cs, f);
    CHECK(res.heights_applied == 0);
    CHECK(f.height == 0);
    CHECK(balance(f, kA) == 10);

    // one more block on each chain lifts min height to 6: height 1 applies
    REQUIRE(cs.append(mine_empty_on(cs, ChainLabel{0}).block).ok());
    REQUIRE(cs.append(mine_empty_on(cs, ChainLabel{1}).block).ok());
    res = advance_tree(cs, f);
    CHECK(res.heights_applied == 1);
    CHECK(f.height == 1);
    CHECK(balance(f, kA) == 5);
    CHECK(balance(f, kC) == 25);
}

TEST_CASE("a protocol-violating block surfaces as NegativeBalance, tree untouched") {
    ChainSet cs(1);
    AccountTree f{0, 1, {{kA, 10}}};
    // structurally fine, strictly invalid: never passed validation
    REQUIRE(cs.append(mine_block_with_body(cs, ChainLabel{0}, {tx(kA, kB, 15)})).ok());
    for (int k = 0; k < 2; ++k)
        REQUIRE(cs.append(mine_empty_on(cs, ChainLabel{0}).block).ok());

    const AdvanceResult res = advance_tree(cs, f);
    REQUIRE(res.violation.has_value());
    CHECK(res.heights_applied == 0);
    CHECK(res.violation->account == kA);
    CHECK(res.violation->attempted == 15);
    CHECK(res.violation->available == 10);
    CHECK(res.violation->height == 1);
    CHECK(f.height == 0);
    CHECK(balance(f, kA) == 10);
}

TEST_CASE("randomized runs: overdraft impossibility, fork isolation, lag, order independence") {
    std::mt19937_64 seeds(4242);
    std::uint64_t total_reorgs = 0;
    for (int run = 0; run < 30; ++run) {
        const std::uint32_t n = (run % 2 == 0) ? 2 : 4;
        const std::uint32_t lag = (run % 3 == 0) ? 2 : 5;
        testsupport::RandomWorld world(n, lag, seeds());
        for (int step = 0; step < 40; ++step) {
            world.admit_random_txs(2);
            world.step(0.3, [&](bool cond, const char* what) {
                if (!cond) FAIL(what << " (run " << run << ", step " << step << ")");
            });
        }
        total_reorgs += world.stats().reorgs;
    }
    CHECK(total_reorgs > 10);  // the suite actually exercised forks
}

TEST_CASE("allocation files and balance dumps") {
    std::istringstream alloc("# genesis\n7 100\n9 50\n\n7 25\n");
    const auto m = load_allocations(alloc);
    REQUIRE(m.size() == 2);
    CHECK(m.at(7) == 125);
    CHECK(m.at(9) == 50);

    AccountTree f{0, 5, m};
    std::ostringstream csv;
    write_balances_csv(f, csv);
    CHECK(csv.str() == "account,balance\n7,125\n9,50\n");

    std::istringstream bad("7 x\n");
    CHECK_THROWS(load_allocations(bad));
}
