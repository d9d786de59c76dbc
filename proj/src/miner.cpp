#include "pom/miner.hpp"

#include "pom/crypto.hpp"

#include <cmath>
#include <cstring>

namespace pom::miner {

ledger::Block candidate_block(const MiningJob& job, const HashProfile& profile,
                              std::uint64_t nonce) {
    ledger::Block block;
    block.prev_hash = job.parent_chain.blocks.empty()
                          ? ledger::HashValue(0)
                          : ledger::block_hash(job.parent_chain.blocks.back(), profile);
    block.miner = job.miner;
    block.txs = job.txs;
    block.nonce = nonce;
    return block;
}

MineResult mine(const MiningJob& job, const HashProfile& profile) {
    if (job.nonce_start > job.nonce_limit)
        throw std::invalid_argument("nonce_start must not exceed nonce_limit");

    // The nonce never affects structural legality, so one probe settles it
    // for the whole range.
    {
        Chain extended = job.parent_chain;
        extended.blocks.push_back(candidate_block(job, profile, job.nonce_start));
        const auto report = ledger::validate_structure(extended, profile);
        if (!report.ok()) throw JobError("illegal mining job: " + report.to_string());
    }

    MineResult result;
    if (job.target <= 0) return result;  // a zero threshold admits no block

    ledger::Block block = candidate_block(job, profile, job.nonce_start);
    for (std::uint64_t nonce = job.nonce_start; nonce < job.nonce_limit; ++nonce) {
        block.nonce = nonce;
        const ledger::HashValue hash = ledger::block_hash(block, profile);
        ++result.attempts;
        if (consensus::hash_meets_threshold(hash, job.target)) {
            result.block = std::move(block);
            return result;
        }
    }
    return result;
}

AttemptsSummary attempts_distribution_check(std::uint64_t trials, const Rational& difficulty,
                                            const Rational& stake, const HashProfile& profile,
                                            std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    const Rational target = consensus::pom_threshold(difficulty, stake, profile.max_value());

    MiningJob job;
    job.parent_chain.params.mode = ledger::Mode::pow;
    job.parent_chain.params.period = 1;
    job.parent_chain.params.difficulty = {difficulty};
    job.target = target;

    AttemptsSummary summary;
    summary.trials = trials;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        // Fresh miner identity per trial so each job hashes different bytes.
        std::array<std::uint8_t, 16> tag{};
        for (int b = 0; b < 8; ++b) {
            tag[b] = static_cast<std::uint8_t>(seed >> (56 - 8 * b));
            tag[8 + b] = static_cast<std::uint8_t>(t >> (56 - 8 * b));
        }
        const auto digest = crypto::sha256(tag);
        job.miner.bytes.assign(digest.begin(), digest.end());

        const MineResult result = mine(job, profile);
        const double attempts = static_cast<double>(result.attempts);
        sum += attempts;
        sum_sq += attempts * attempts;
    }
    summary.mean = sum / static_cast<double>(trials);
    if (trials > 1) {
        summary.variance = (sum_sq - sum * sum / static_cast<double>(trials)) /
                           static_cast<double>(trials - 1);
    }
    return summary;
}

}  // namespace pom::miner
