#pragma once

#include "pom/consensus.hpp"
#include "pom/ledger.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pom::miner {

using ledger::Account;
using ledger::Chain;
using ledger::HashProfile;
using ledger::Rational;

/// A job is structurally illegal (e.g. its transactions overdraw an account
/// no matter which nonce wins).
class JobError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MiningJob {
    Chain parent_chain;
    Account miner;
    std::vector<ledger::SignedTransaction> txs;
    Rational target;  // threshold the block hash must meet
    std::uint64_t nonce_start = 0;
    std::uint64_t nonce_limit = std::numeric_limits<std::uint64_t>::max();
};

struct MineResult {
    std::optional<ledger::Block> block;  // empty when the nonce range is exhausted
    std::uint64_t attempts = 0;          // hashes evaluated, successful or not
};

/// Scans nonces ascending in [nonce_start, nonce_limit) and returns the
/// first block whose hash meets the target. Deterministic: identical jobs
/// yield identical blocks. A target <= 0 exhausts immediately without
/// hashing. Throws JobError when the job could never produce a block that
/// extends parent_chain legally, whatever the nonce.
MineResult mine(const MiningJob& job, const HashProfile& profile);

/// Builds the block `mine` would hash at a given nonce, without hashing.
ledger::Block candidate_block(const MiningJob& job, const HashProfile& profile,
                              std::uint64_t nonce);

struct AttemptsSummary {
    std::uint64_t trials = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
};

/// Repeatedly mines empty blocks in the test profile at threshold
/// (M/difficulty)*stake, varying block content across trials by deriving a
/// fresh miner account from `seed`, and reports attempt-count statistics.
/// At unit hash rate the mean attempt count estimates difficulty/stake.
AttemptsSummary attempts_distribution_check(std::uint64_t trials, const Rational& difficulty,
                                            const Rational& stake, const HashProfile& profile,
                                            std::uint64_t seed);

}  // namespace pom::miner
