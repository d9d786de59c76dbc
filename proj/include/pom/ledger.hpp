#pragma once

#include "pom/crypto.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pom::ledger {

using crypto::HashProfile;
using crypto::HashValue;
using crypto::Rational;

/// A public key identity; the unit of mining and balances.
struct Account {
    std::vector<std::uint8_t> bytes;

    Account() = default;
    explicit Account(std::vector<std::uint8_t> b) : bytes(std::move(b)) {}

    auto operator<=>(const Account&) const = default;

    std::string hex() const { return crypto::to_hex(bytes); }
    static Account from_hex(std::string_view hex);
};

struct Signature {
    std::vector<std::uint8_t> bytes;
    auto operator<=>(const Signature&) const = default;
};

/// A finite map from accounts to nonzero amounts summing to zero.
/// Entries are kept sorted by account bytes, which is also the canonical
/// serialization order.
struct Transaction {
    std::map<Account, std::int64_t> entries;
    auto operator<=>(const Transaction&) const = default;
};

/// A transaction plus one signature per account the transaction debits.
struct SignedTransaction {
    Transaction tx;
    std::map<Account, Signature> signatures;
    auto operator<=>(const SignedTransaction&) const = default;
};

struct Block {
    HashValue prev_hash;  // zero for the genesis block
    Account miner;
    std::vector<SignedTransaction> txs;
    std::uint64_t nonce = 0;
    bool operator==(const Block&) const = default;
};

enum class Mode { pow, pom };

struct ChainParams {
    Mode mode = Mode::pow;
    std::uint64_t period = 1;           // window length in blocks
    Rational discrimination = 0;        // blend weight in [0,1]; 0 egalitarian, 1 proportional
    std::vector<Rational> difficulty;   // one positive entry per window

    bool operator==(const ChainParams&) const = default;
};

struct Chain {
    ChainParams params;
    std::vector<Block> blocks;
    bool operator==(const Chain&) const = default;
};

struct Violation {
    std::uint64_t block_index = 0;
    std::string rule;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Sum of the transaction's amounts; 0 for a well-formed transaction.
/// Throws std::overflow_error if the sum leaves the 64-bit range.
std::int64_t tx_mass(const Transaction& tx);

/// 1 if `account` mined `block`, else 0.
std::int64_t block_reward(const Account& account, const Block& block);

/// Sum of the account's amounts over the block's transactions plus the
/// mining reward.
std::int64_t balance_in_block(const Account& account, const Block& block);

/// Sum of balance_in_block over a chain prefix.
std::int64_t balance_in_chain(const Account& account, std::span<const Block> blocks);

/// Canonical, injective byte encodings. Transaction entries appear in
/// ascending account order; block fields in the order prev_hash, miner,
/// transactions (with their signatures), nonce. These bytes are the hashing
/// and signing preimages, so they are normative.
std::vector<std::uint8_t> canonical_bytes(const Transaction& tx);
std::vector<std::uint8_t> canonical_bytes(const SignedTransaction& stx);
std::vector<std::uint8_t> canonical_bytes(const Block& block);

HashValue block_hash(const Block& block, const HashProfile& profile);

/// Minimal lowercase hex of a hash value ("0" for zero), and its inverse.
std::string hash_hex(const HashValue& value);
bool hash_from_hex(std::string_view hex, HashValue& out);

/// Build the signature map for `tx`: one signature per debited account.
/// `keys` must contain a key pair for every account with a negative amount.
SignedTransaction sign_transaction(const Transaction& tx,
                                   const std::vector<crypto::KeyPair>& keys);

/// Structural validation: hash links, transaction shape (nonzero amounts,
/// at least two entries, mass 0), signature domains and verification, and
/// nonnegative balances on every block prefix. The report carries the first
/// violation found, in block order.
ValidationReport validate_structure(const Chain& chain, const HashProfile& profile);

}  // namespace pom::ledger
