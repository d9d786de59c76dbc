#include "pom/ledger.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace pom::ledger {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) {
        throw std::overflow_error("64-bit amount overflow");
    }
    return out;
}

void append(std::vector<std::uint8_t>& buf, std::string_view s) {
    buf.insert(buf.end(), s.begin(), s.end());
}

void append_tx_body(std::vector<std::uint8_t>& buf, const Transaction& tx) {
    append(buf, "{\"entries\":{");
    bool first = true;
    for (const auto& [account, amount] : tx.entries) {
        if (!first) append(buf, ",");
        first = false;
        append(buf, "\"");
        append(buf, account.hex());
        append(buf, "\":\"");
        append(buf, std::to_string(amount));
        append(buf, "\"");
    }
    append(buf, "}}");
}

void append_signed_tx(std::vector<std::uint8_t>& buf, const SignedTransaction& stx) {
    append(buf, "{\"entries\":{");
    bool first = true;
    for (const auto& [account, amount] : stx.tx.entries) {
        if (!first) append(buf, ",");
        first = false;
        append(buf, "\"");
        append(buf, account.hex());
        append(buf, "\":\"");
        append(buf, std::to_string(amount));
        append(buf, "\"");
    }
    append(buf, "},\"sigs\":{");
    first = true;
    for (const auto& [account, sig] : stx.signatures) {
        if (!first) append(buf, ",");
        first = false;
        append(buf, "\"");
        append(buf, account.hex());
        append(buf, "\":\"");
        append(buf, crypto::to_hex(sig.bytes));
        append(buf, "\"");
    }
    append(buf, "}}");
}

}  // namespace

Account Account::from_hex(std::string_view hex) {
    Account a;
    if (!crypto::from_hex(hex, a.bytes)) {
        throw std::invalid_argument("invalid account hex");
    }
    return a;
}

std::string ValidationReport::to_string() const {
    if (ok()) {
        return "valid";
    }
    std::ostringstream os;
    for (const auto& v : violations) {
        os << v.block_index << ", " << v.rule << ", " << v.detail << "\n";
    }
    return os.str();
}

std::int64_t tx_mass(const Transaction& tx) {
    std::int64_t sum = 0;
    for (const auto& [account, amount] : tx.entries) {
        sum = checked_add(sum, amount);
    }
    return sum;
}

std::int64_t block_reward(const Account& account, const Block& block) {
    return account == block.miner ? 1 : 0;
}

std::int64_t balance_in_block(const Account& account, const Block& block) {
    std::int64_t sum = block_reward(account, block);
    for (const auto& stx : block.txs) {
        auto it = stx.tx.entries.find(account);
        if (it != stx.tx.entries.end()) {
            sum = checked_add(sum, it->second);
        }
    }
    return sum;
}

std::int64_t balance_in_chain(const Account& account, std::span<const Block> blocks) {
    std::int64_t sum = 0;
    for (const auto& block : blocks) {
        sum = checked_add(sum, balance_in_block(account, block));
    }
    return sum;
}

std::vector<std::uint8_t> canonical_bytes(const Transaction& tx) {
    std::vector<std::uint8_t> buf;
    append_tx_body(buf, tx);
    return buf;
}

std::vector<std::uint8_t> canonical_bytes(const SignedTransaction& stx) {
    std::vector<std::uint8_t> buf;
    append_signed_tx(buf, stx);
    return buf;
}

std::vector<std::uint8_t> canonical_bytes(const Block& block) {
    std::vector<std::uint8_t> buf;
    append(buf, "{\"prev_hash\":\"");
    append(buf, hash_hex(block.prev_hash));
    append(buf, "\",\"miner\":\"");
    append(buf, block.miner.hex());
    append(buf, "\",\"txs\":[");
    bool first = true;
    for (const auto& stx : block.txs) {
        if (!first) append(buf, ",");
        first = false;
        append_signed_tx(buf, stx);
    }
    append(buf, "],\"nonce\":\"");
    append(buf, std::to_string(block.nonce));
    append(buf, "\"}");
    return buf;
}

HashValue block_hash(const Block& block, const HashProfile& profile) {
    return profile.hash(canonical_bytes(block));
}

std::string hash_hex(const HashValue& value) {
    if (value == 0) {
        return "0";
    }
    std::string s = value.str(0, std::ios_base::hex);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool hash_from_hex(std::string_view hex, HashValue& out) {
    if (hex.empty() || (hex.size() > 1 && hex.front() == '0')) {
        return false;  // no leading zeros in the canonical form
    }
    HashValue v = 0;
    for (char c : hex) {
        int d;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            d = c - 'a' + 10;
        } else {
            return false;
        }
        v <<= 4;
        v += d;
    }
    out = v;
    return true;
}

SignedTransaction sign_transaction(const Transaction& tx,
                                   const std::vector<crypto::KeyPair>& keys) {
    SignedTransaction stx;
    stx.tx = tx;
    const auto message = canonical_bytes(tx);
    for (const auto& [account, amount] : tx.entries) {
        if (amount >= 0) {
            continue;
        }
        auto key = std::find_if(keys.begin(), keys.end(), [&](const crypto::KeyPair& kp) {
            return kp.public_key == account.bytes;
        });
        if (key == keys.end()) {
            throw std::invalid_argument("missing key for debited account " + account.hex());
        }
        stx.signatures[account] = Signature{crypto::sign(key->secret_key, message)};
    }
    return stx;
}

ValidationReport validate_structure(const Chain& chain, const HashProfile& profile) {
    ValidationReport report;
    auto reject = [&](std::uint64_t index, std::string rule, std::string detail) {
        report.violations.push_back({index, std::move(rule), std::move(detail)});
    };

    std::map<Account, std::int64_t> balances;
    for (std::uint64_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& block = chain.blocks[i];

        if (i == 0) {
            if (block.prev_hash != 0) {
                reject(i, "hash-link", "genesis prev_hash must be zero");
                return report;
            }
        } else {
            const HashValue expected = block_hash(chain.blocks[i - 1], profile);
            if (block.prev_hash != expected) {
                reject(i, "hash-link",
                       "prev_hash " + hash_hex(block.prev_hash) + " != hash of block " +
                           std::to_string(i - 1) + " (" + hash_hex(expected) + ")");
                return report;
            }
        }

        for (std::size_t t = 0; t < block.txs.size(); ++t) {
            const SignedTransaction& stx = block.txs[t];
            const std::string where = "tx " + std::to_string(t);
            if (stx.tx.entries.size() < 2) {
                reject(i, "tx-shape", where + " has fewer than two entries");
                return report;
            }
            for (const auto& [account, amount] : stx.tx.entries) {
                if (amount == 0) {
                    reject(i, "tx-shape", where + " has a zero amount for " + account.hex());
                    return report;
                }
            }
            try {
                if (std::int64_t mass = tx_mass(stx.tx); mass != 0) {
                    reject(i, "tx-mass", where + " has mass " + std::to_string(mass));
                    return report;
                }
            } catch (const std::overflow_error&) {
                reject(i, "amount-overflow", where + " amounts overflow 64 bits");
                return report;
            }

            // Exactly the debited accounts sign, and every signature verifies.
            const auto message = canonical_bytes(stx.tx);
            for (const auto& [account, amount] : stx.tx.entries) {
                if (amount < 0 && !stx.signatures.contains(account)) {
                    reject(i, "signature-domain",
                           where + " missing signature for " + account.hex());
                    return report;
                }
            }
            for (const auto& [account, sig] : stx.signatures) {
                auto it = stx.tx.entries.find(account);
                if (it == stx.tx.entries.end() || it->second >= 0) {
                    reject(i, "signature-domain",
                           where + " has a signature from non-debited " + account.hex());
                    return report;
                }
                if (!crypto::verify(account.bytes, message, sig.bytes)) {
                    reject(i, "tx-signature",
                           where + " signature of " + account.hex() + " does not verify");
                    return report;
                }
            }
        }

        // Apply the block to the running balances, then insist every account
        // touched so far is nonnegative on this prefix. The reward counts
        // toward the miner's balance within the same block.
        try {
            for (const auto& stx : block.txs) {
                for (const auto& [account, amount] : stx.tx.entries) {
                    auto [it, inserted] = balances.try_emplace(account, 0);
                    it->second = checked_add(it->second, amount);
                }
            }
            auto [mit, inserted] = balances.try_emplace(block.miner, 0);
            mit->second = checked_add(mit->second, 1);
        } catch (const std::overflow_error&) {
            reject(i, "amount-overflow", "balance accumulation overflows 64 bits");
            return report;
        }
        for (const auto& [account, balance] : balances) {
            if (balance < 0) {
                reject(i, "nonnegative-balance",
                       account.hex() + " has balance " + std::to_string(balance) +
                           " after block " + std::to_string(i));
                return report;
            }
        }
    }
    return report;
}

}  // namespace pom::ledger
