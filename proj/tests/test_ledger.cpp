#include "pom/crypto.hpp"
#include "pom/ledger.hpp"

#include <doctest.h>

#include <cstdint>
#include <vector>

using namespace pom::ledger;
using pom::crypto::HashProfile;
using pom::crypto::KeyPair;

namespace {

// Fixed key pairs so accounts (and their sort order) are stable across runs.
KeyPair test_key(std::uint8_t tag) {
    std::vector<std::uint8_t> seed(32, tag);
    return pom::crypto::keypair_from_seed(seed);
}

Account account_of(const KeyPair& kp) { return Account(kp.public_key); }

Block empty_block(const Account& miner, const HashValue& prev, std::uint64_t nonce = 0) {
    Block b;
    b.prev_hash = prev;
    b.miner = miner;
    b.nonce = nonce;
    return b;
}

}  // namespace

TEST_CASE("transaction mass sums the amounts") {
    const Account a = account_of(test_key(1));
    const Account b = account_of(test_key(2));
    const Account c = account_of(test_key(3));

    CHECK(tx_mass(Transaction{{{a, -5}, {b, 5}}}) == 0);
    CHECK(tx_mass(Transaction{{{a, -5}, {b, 3}, {c, 2}}}) == 0);
    CHECK(tx_mass(Transaction{{{a, -5}, {b, 4}}}) == -1);
}

TEST_CASE("block reward goes to the miner alone") {
    const Account a = account_of(test_key(1));
    const Account b = account_of(test_key(2));
    const Block block = empty_block(a, 0);

    CHECK(block_reward(a, block) == 1);
    CHECK(block_reward(b, block) == 0);
    CHECK(block_reward(a, block) + block_reward(b, block) == 1);
}

TEST_CASE("balance in one block: transactions plus reward") {
    const KeyPair ka = test_key(1), kb = test_key(2), kc = test_key(3);
    const Account a = account_of(ka), b = account_of(kb), c = account_of(kc);

    SUBCASE("miner spends in its own block") {
        Block block = empty_block(a, 0);
        block.txs = {sign_transaction(Transaction{{{a, -5}, {b, 5}}}, {ka})};
        CHECK(balance_in_block(a, block) == -4);
        CHECK(balance_in_block(b, block) == 5);
    }
    SUBCASE("empty block pays the reward only") {
        const Block block = empty_block(a, 0);
        CHECK(balance_in_block(a, block) == 1);
        CHECK(balance_in_block(b, block) == 0);
    }
    SUBCASE("two transactions accumulate") {
        Block block = empty_block(c, 0);
        block.txs = {sign_transaction(Transaction{{{a, -2}, {b, 2}}}, {ka}),
                     sign_transaction(Transaction{{{a, -3}, {c, 3}}}, {ka})};
        CHECK(balance_in_block(a, block) == -5);
        CHECK(balance_in_block(c, block) == 4);
    }
}

TEST_CASE("balance over a chain prefix") {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a = account_of(ka), b = account_of(kb);
    const HashProfile profile = HashProfile::test_profile();

    CHECK(balance_in_chain(a, {}) == 0);

    std::vector<Block> blocks;
    blocks.push_back(empty_block(a, 0));
    blocks.push_back(empty_block(a, block_hash(blocks[0], profile)));
    blocks.push_back(empty_block(a, block_hash(blocks[1], profile)));
    CHECK(balance_in_chain(a, blocks) == 3);

    Block spend = empty_block(b, block_hash(blocks[2], profile));
    spend.txs = {sign_transaction(Transaction{{{a, -1}, {b, 1}}}, {ka})};
    blocks.push_back(spend);
    CHECK(balance_in_chain(a, blocks) == 2);
    CHECK(balance_in_chain(b, blocks) == 2);  // 1 received + 1 reward
}

TEST_CASE("conservation: each block mints exactly one unit") {
    const KeyPair ka = test_key(1), kb = test_key(2), kc = test_key(3);
    const Account a = account_of(ka), b = account_of(kb), c = account_of(kc);

    Block block = empty_block(b, 0);
    block.txs = {sign_transaction(Transaction{{{a, -7}, {b, 4}, {c, 3}}}, {ka})};
    CHECK(balance_in_block(a, block) + balance_in_block(b, block) +
              balance_in_block(c, block) ==
          1);
}

TEST_CASE("canonical bytes are deterministic and order-insensitive") {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a = account_of(ka), b = account_of(kb);

    Transaction t1;
    t1.entries.insert({a, -5});
    t1.entries.insert({b, 5});
    Transaction t2;
    t2.entries.insert({b, 5});
    t2.entries.insert({a, -5});
    CHECK(canonical_bytes(t1) == canonical_bytes(t2));
    CHECK(canonical_bytes(t1) == canonical_bytes(t1));

    Block blk = empty_block(a, 0, 7);
    Block blk2 = blk;
    blk2.nonce = 8;
    CHECK(canonical_bytes(blk) != canonical_bytes(blk2));
}

TEST_CASE("structural validation accepts a well-formed chain") {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a = account_of(ka), b = account_of(kb);
    const HashProfile profile = HashProfile::test_profile();

    Chain chain;
    chain.params.difficulty = {1};
    chain.params.period = 8;
    chain.blocks.push_back(empty_block(a, 0));
    chain.blocks.push_back(
        empty_block(a, block_hash(chain.blocks[0], profile)));
    Block third = empty_block(b, block_hash(chain.blocks[1], profile));
    third.txs = {sign_transaction(Transaction{{{a, -2}, {b, 2}}}, {ka})};
    chain.blocks.push_back(third);

    CHECK(validate_structure(chain, profile).ok());

    SUBCASE("corrupted hash link is pinpointed") {
        chain.blocks[2].prev_hash += 1;
        const auto report = validate_structure(chain, profile);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].block_index == 2);
        CHECK(report.violations[0].rule == "hash-link");
    }
    SUBCASE("overdraft on a prefix is rejected") {
        Block spend = empty_block(b, block_hash(chain.blocks[2], profile));
        // a holds 2 - 2 = 0 after block 2; any further debit overdraws
        spend.txs = {sign_transaction(Transaction{{{a, -1}, {b, 1}}}, {ka})};
        chain.blocks.push_back(spend);
        const auto report = validate_structure(chain, profile);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].block_index == 3);
        CHECK(report.violations[0].rule == "nonnegative-balance");
    }
    SUBCASE("nonzero transaction mass is rejected") {
        Block bad = empty_block(a, block_hash(chain.blocks[2], profile));
        SignedTransaction stx =
            sign_transaction(Transaction{{{a, -2}, {b, 2}}}, {ka});
        stx.tx.entries[b] = 3;  // break mass after signing
        bad.txs = {stx};
        chain.blocks.push_back(bad);
        CHECK_FALSE(validate_structure(chain, profile).ok());
    }
    SUBCASE("missing debit signature is rejected") {
        Block bad = empty_block(a, block_hash(chain.blocks[2], profile));
        SignedTransaction stx;
        stx.tx = Transaction{{{a, -1}, {b, 1}}};  // no signature for a
        bad.txs = {stx};
        chain.blocks.push_back(bad);
        CHECK_FALSE(validate_structure(chain, profile).ok());
    }
    SUBCASE("corrupted signature bytes are rejected") {
        Block bad = empty_block(a, block_hash(chain.blocks[2], profile));
        SignedTransaction stx =
            sign_transaction(Transaction{{{a, -1}, {b, 1}}}, {ka});
        stx.signatures[a].bytes[0] ^= 1;
        bad.txs = {stx};
        chain.blocks.push_back(bad);
        CHECK_FALSE(validate_structure(chain, profile).ok());
    }
}

TEST_CASE("a block's own reward may fund its transactions") {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a = account_of(ka), b = account_of(kb);
    const HashProfile profile = HashProfile::test_profile();

    Chain chain;
    chain.params.difficulty = {1};
    Block genesis = empty_block(a, 0);
    // a has nothing before this block; the reward of the very block carrying
    // the transaction covers the debit.
    genesis.txs = {sign_transaction(Transaction{{{a, -1}, {b, 1}}}, {ka})};
    chain.blocks.push_back(genesis);
    CHECK(validate_structure(chain, profile).ok());
}

TEST_CASE("sum of chain balances equals the block count") {
    const KeyPair ka = test_key(1), kb = test_key(2), kc = test_key(3);
    const std::vector<KeyPair> keys = {ka, kb, kc};
    const HashProfile profile = HashProfile::test_profile();

    std::vector<Block> blocks;
    HashValue prev = 0;
    for (int i = 0; i < 6; ++i) {
        Block b = empty_block(account_of(keys[i % 3]), prev);
        blocks.push_back(b);
        prev = block_hash(b, profile);
    }
    std::int64_t total = 0;
    for (const auto& k : keys) total += balance_in_chain(account_of(k), blocks);
    CHECK(total == 6);
}
