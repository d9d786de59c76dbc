#pragma once

#include "pom/ledger.hpp"

#include <map>
#include <set>
#include <span>

namespace pom::consensus {

using ledger::Account;
using ledger::Chain;
using ledger::HashProfile;
using ledger::HashValue;
using ledger::Rational;

/// Mining statistics of one complete window: how many blocks each account
/// mined, and how many distinct miners appeared.
struct WindowStats {
    std::uint64_t window_index = 0;
    std::map<Account, std::uint64_t> blocks_mined;  // only accounts with a positive count

    std::uint64_t miner_count() const { return blocks_mined.size(); }
    std::uint64_t blocks_mined_by(const Account& account) const;
};

/// Blocks nL .. min(nL+L-1, last) of the chain. Throws std::out_of_range if
/// the window start lies beyond the chain.
std::span<const ledger::Block> window(const Chain& chain, std::uint64_t n);

/// Statistics of window n, which must be complete (exactly L blocks);
/// throws std::out_of_range otherwise. Partial windows never feed stakes.
WindowStats window_stats(const Chain& chain, std::uint64_t n);

/// Statistics over an explicit complete window of miner identities, for
/// callers that track miner sequences without materializing blocks.
WindowStats window_stats_from_miners(std::span<const Account> miners,
                                     std::uint64_t window_index);

/// Mining stake of one account: a convex blend of an egalitarian share and a
/// proportional-work share,
///     (1 - a) / miner_count  +  a * blocks_mined / period.
/// `discrimination` is the blend weight a in [0,1]. Accounts that mined
/// nothing still receive the egalitarian base term. Throws std::domain_error
/// if the window has no miners.
Rational mining_stake(const Account& account, const WindowStats& stats,
                      const Rational& discrimination, std::uint64_t period);

/// Stake of a set of accounts: the sum of the members' stakes.
Rational mining_stake(const std::set<Account>& accounts, const WindowStats& stats,
                      const Rational& discrimination, std::uint64_t period);

/// A block is valid when hash(block) <= threshold. The proof-of-work
/// threshold is M/D; the proof-of-mining threshold scales that by the
/// miner's stake from the previous window. Thresholds are exact rationals;
/// comparisons never touch floats. Throws std::invalid_argument on D <= 0
/// or stake outside [0,1].
Rational pow_threshold(const Rational& difficulty, const HashValue& max_hash);
Rational pom_threshold(const Rational& difficulty, const Rational& stake,
                       const HashValue& max_hash);

/// Non-strict comparison, except that a zero threshold admits no block at
/// all (a zero-stake miner cannot mine).
bool hash_meets_threshold(const HashValue& hash, const Rational& threshold);

/// Per-window cache of window statistics for one chain, used to price the
/// blocks of the following window.
class StakeTable {
public:
    explicit StakeTable(const Chain& chain) : chain_(&chain) {}
    const WindowStats& stats(std::uint64_t n);

private:
    const Chain* chain_;
    std::map<std::uint64_t, WindowStats> cache_;
};

/// Threshold validation for every block. In PoW mode block i must satisfy
/// hash <= M/D_w with w = i/L. In PoM mode the threshold is additionally
/// scaled by the miner's stake computed from window w-1; blocks of window 0
/// use stake 1 (pure proof-of-work bootstrap). The report carries the first
/// violation found.
ledger::ValidationReport validate_consensus(const Chain& chain, const HashProfile& profile);

/// Structural validation followed by consensus validation.
ledger::ValidationReport validate_chain(const Chain& chain, const HashProfile& profile);

/// The threshold a new block by `miner` must meet if appended to `chain`
/// now. Throws std::out_of_range if the chain's difficulty vector does not
/// cover the next block's window.
Rational next_block_threshold(const Chain& chain, const Account& miner,
                              const HashProfile& profile);

/// Sum of per-block difficulty values over block indices [first, last].
/// Throws std::out_of_range unless first <= last < chain length.
Rational segment_difficulty(const Chain& chain, std::uint64_t first, std::uint64_t last);

/// Difficulty of the whole chain (0 for an empty chain).
Rational total_difficulty(const Chain& chain);

/// The candidate with the largest total difficulty. Ties break toward the
/// smaller tip hash, then lexicographically smaller tip bytes, then smaller
/// whole-chain encoding, so the result is a total order over distinct
/// chains and independent of argument order. Candidates are assumed valid
/// and sharing params. Throws std::invalid_argument on an empty set.
const Chain& fork_choice(std::span<const Chain> candidates, const HashProfile& profile);

/// True when `a` is strictly preferred over `b` under the fork-choice order.
bool preferred(const Chain& a, const Chain& b, const HashProfile& profile);

}  // namespace pom::consensus
