#include "pom/consensus.hpp"
#include "pom/crypto.hpp"
#include "pom/ledger.hpp"
#include "pom/miner.hpp"
#include "pom/sim/rng.hpp"

#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

using namespace pom::consensus;
using pom::crypto::HashProfile;
using pom::ledger::Block;
using pom::ledger::ChainParams;
using pom::ledger::Mode;

namespace {

Account acct(std::uint8_t tag) { return Account({tag}); }

// A chain of empty blocks with correct hash links, mined at the stated
// difficulty so every block really meets its threshold.
Chain mined_chain(const ChainParams& params, const std::vector<Account>& miners,
                  const HashProfile& profile) {
    Chain chain;
    chain.params = params;
    for (const Account& m : miners) {
        pom::miner::MiningJob job;
        job.parent_chain = chain;
        job.miner = m;
        job.target = next_block_threshold(chain, m, profile);
        const auto result = pom::miner::mine(job, profile);
        REQUIRE(result.block.has_value());
        chain.blocks.push_back(*result.block);
    }
    return chain;
}

ChainParams pow_params(std::uint64_t period, std::vector<Rational> difficulty) {
    ChainParams p;
    p.mode = Mode::pow;
    p.period = period;
    p.difficulty = std::move(difficulty);
    return p;
}

}  // namespace

TEST_CASE("window slicing follows the period arithmetic") {
    const HashProfile profile(16);
    const auto params = pow_params(4, {1, 1, 1});
    std::vector<Account> miners(10, acct(1));
    const Chain chain = mined_chain(params, miners, profile);

    CHECK(window(chain, 0).size() == 4);
    CHECK(&window(chain, 0).front() == &chain.blocks[0]);
    CHECK(&window(chain, 1).front() == &chain.blocks[4]);
    CHECK(window(chain, 1).size() == 4);
    CHECK(window(chain, 2).size() == 2);  // partial tail, blocks 8..9
    CHECK_THROWS_AS(window(chain, 3), std::out_of_range);
}

TEST_CASE("window statistics count miners exactly") {
    const HashProfile profile(16);
    const Account a = acct(1), b = acct(2), c = acct(3);

    SUBCASE("mixed window") {
        const Chain chain =
            mined_chain(pow_params(4, {1}), {a, a, b, c}, profile);
        const WindowStats stats = window_stats(chain, 0);
        CHECK(stats.miner_count() == 3);
        CHECK(stats.blocks_mined_by(a) == 2);
        CHECK(stats.blocks_mined_by(b) == 1);
        CHECK(stats.blocks_mined_by(c) == 1);
        CHECK(stats.blocks_mined_by(acct(9)) == 0);
    }
    SUBCASE("monopoly window") {
        const Chain chain =
            mined_chain(pow_params(4, {1}), {a, a, a, a}, profile);
        const WindowStats stats = window_stats(chain, 0);
        CHECK(stats.miner_count() == 1);
        CHECK(stats.blocks_mined_by(a) == 4);
    }
    SUBCASE("all distinct") {
        const Chain chain =
            mined_chain(pow_params(4, {1}), {a, b, c, acct(4)}, profile);
        CHECK(window_stats(chain, 0).miner_count() == 4);
    }
    SUBCASE("partial windows are refused") {
        const Chain chain =
            mined_chain(pow_params(4, {1, 1}), {a, b, c, a, b}, profile);
        CHECK_NOTHROW(window_stats(chain, 0));
        CHECK_THROWS_AS(window_stats(chain, 1), std::out_of_range);
    }
}

TEST_CASE("mining stake blends the egalitarian and proportional shares") {
    std::vector<Account> miners;
    // 4 miners over 10 blocks: 3 + 3 + 2 + 2
    for (int i = 0; i < 3; ++i) miners.push_back(acct(1));
    for (int i = 0; i < 3; ++i) miners.push_back(acct(2));
    for (int i = 0; i < 2; ++i) miners.push_back(acct(3));
    for (int i = 0; i < 2; ++i) miners.push_back(acct(4));
    const WindowStats stats = window_stats_from_miners(miners, 0);
    REQUIRE(stats.miner_count() == 4);

    SUBCASE("weight 0 collapses to the uniform share") {
        CHECK(mining_stake(acct(1), stats, 0, 10) == Rational(1, 4));
        CHECK(mining_stake(acct(9), stats, 0, 10) == Rational(1, 4));
    }
    SUBCASE("weight 1 collapses to the proportional share") {
        CHECK(mining_stake(acct(1), stats, 1, 10) == Rational(3, 10));
        CHECK(mining_stake(acct(9), stats, 1, 10) == 0);
    }
    SUBCASE("the blend is the weighted average") {
        // (1/2)(1/4) + (1/2)(3/10) = 0.275
        CHECK(mining_stake(acct(1), stats, Rational(1, 2), 10) ==
              Rational(11, 40));
    }
    SUBCASE("bad parameters are refused") {
        CHECK_THROWS_AS(mining_stake(acct(1), stats, Rational(3, 2), 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(mining_stake(acct(1), stats, Rational(-1, 2), 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(mining_stake(acct(1), stats, Rational(1, 2), 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(mining_stake(acct(1), WindowStats{}, Rational(1, 2), 10),
                        std::domain_error);
    }
}

TEST_CASE("set stake sums the member stakes") {
    SUBCASE("all miners of a complete window hold stake 1") {
        std::vector<Account> miners = {acct(1), acct(1), acct(2), acct(3)};
        const WindowStats stats = window_stats_from_miners(miners, 0);
        const std::set<Account> everyone = {acct(1), acct(2), acct(3)};
        CHECK(mining_stake(everyone, stats, Rational(1, 3), 4) == 1);
    }
    SUBCASE("the empty set holds nothing") {
        std::vector<Account> miners = {acct(1), acct(2)};
        const WindowStats stats = window_stats_from_miners(miners, 0);
        CHECK(mining_stake(std::set<Account>{}, stats, Rational(1, 2), 2) == 0);
    }
    SUBCASE("two members, ten miners, thirty of a hundred blocks") {
        std::vector<Account> miners;
        for (int i = 0; i < 20; ++i) miners.push_back(acct(1));
        for (int i = 0; i < 10; ++i) miners.push_back(acct(2));
        for (int m = 3; m <= 10; ++m)
            for (int i = 0; i < (m == 10 ? 14 : 8); ++i)
                miners.push_back(acct(static_cast<std::uint8_t>(m)));
        const WindowStats stats = window_stats_from_miners(miners, 0);
        REQUIRE(stats.miner_count() == 10);
        REQUIRE(miners.size() == 100);
        // (1/2)(2/10) + (1/2)(30/100) = 1/4
        CHECK(mining_stake({acct(1), acct(2)}, stats, Rational(1, 2), 100) ==
              Rational(1, 4));
    }
}

TEST_CASE("stakes of a window's miners always sum to one") {
    pom::sim::SplitMix64 rng(2024);
    for (int round = 0; round < 1000; ++round) {
        const std::uint64_t period = 1 + rng.next() % 40;
        std::vector<Account> miners;
        for (std::uint64_t i = 0; i < period; ++i)
            miners.push_back(acct(static_cast<std::uint8_t>(rng.next() % 12)));
        const WindowStats stats = window_stats_from_miners(miners, 0);
        const Rational a(rng.next() % 101, 100);

        Rational sum = 0;
        double sum_d = 0;
        for (const auto& [account, count] : stats.blocks_mined) {
            const Rational stake = mining_stake(account, stats, a, period);
            sum += stake;
            sum_d += stake.convert_to<double>();
        }
        REQUIRE(sum == 1);
        REQUIRE(std::abs(sum_d - 1.0) < 1e-12);
    }
}

TEST_CASE("proof-of-work threshold is the hash ceiling over difficulty") {
    const HashValue m = HashProfile(16).max_value();
    CHECK(pow_threshold(1, m) == Rational(m));
    CHECK(pow_threshold(Rational(m), m) == 1);
    CHECK(pow_threshold(2, m) == Rational(m) / 2);
    CHECK_THROWS_AS(pow_threshold(0, m), std::invalid_argument);
    CHECK_THROWS_AS(pow_threshold(-3, m), std::invalid_argument);
}

TEST_CASE("halving the hash space passes about half of real hashes") {
    const HashProfile profile(16);
    const Rational threshold = pow_threshold(2, profile.max_value());
    int passed = 0;
    const int n = 100000;
    std::vector<std::uint8_t> input(8);
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < 8; ++b)
            input[b] = static_cast<std::uint8_t>(i >> (8 * b));
        if (hash_meets_threshold(profile.hash(input), threshold)) ++passed;
    }
    CHECK(static_cast<double>(passed) / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("proof-of-mining threshold scales by stake") {
    const HashValue m = HashProfile(16).max_value();
    for (const Rational& d : {Rational(1), Rational(7), Rational(100)}) {
        CHECK(pom_threshold(d, 1, m) == pow_threshold(d, m));
    }
    CHECK(pom_threshold(100, Rational(1, 4), m) == Rational(m) / 400);
    CHECK(pom_threshold(3, 0, m) == 0);
    CHECK_THROWS_AS(pom_threshold(3, Rational(5, 4), m), std::invalid_argument);
    CHECK_THROWS_AS(pom_threshold(3, Rational(-1, 4), m), std::invalid_argument);

    SUBCASE("a zero threshold admits nothing, even the zero hash") {
        CHECK_FALSE(hash_meets_threshold(0, 0));
        CHECK(hash_meets_threshold(0, Rational(1, 1000)));
        CHECK(hash_meets_threshold(5, 5));  // boundary is inclusive
        CHECK_FALSE(hash_meets_threshold(6, Rational(11, 2)));
    }
}

TEST_CASE("consensus validation enforces the per-window thresholds") {
    const HashProfile profile(16);
    const Account a = acct(1), b = acct(2);

    SUBCASE("difficulty 1 accepts any mined chain") {
        const Chain chain =
            mined_chain(pow_params(4, {1, 1}), {a, b, a, b, a}, profile);
        CHECK(validate_consensus(chain, profile).ok());
        CHECK(validate_chain(chain, profile).ok());
    }
    SUBCASE("raising the difficulty after the fact rejects the genesis block") {
        Chain chain = mined_chain(pow_params(4, {1}), {a}, profile);
        REQUIRE(pom::ledger::block_hash(chain.blocks[0], profile) != 0);
        chain.params.difficulty[0] = HashValue(1) << 64;  // threshold below 1
        const auto report = validate_consensus(chain, profile);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].block_index == 0);
        CHECK(report.violations[0].rule == "pow-threshold");
    }
    SUBCASE("a chain outgrowing its difficulty vector is rejected") {
        Chain chain = mined_chain(pow_params(2, {1}), {a, b}, profile);
        Block stray;
        stray.prev_hash = pom::ledger::block_hash(chain.blocks[1], profile);
        stray.miner = a;
        chain.blocks.push_back(stray);
        const auto report = validate_consensus(chain, profile);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].block_index == 2);
        CHECK(report.violations[0].rule == "difficulty-coverage");
    }
    SUBCASE("every prefix of a valid chain is valid") {
        ChainParams params = pow_params(3, {1, 2, 1});
        params.mode = Mode::pom;
        params.discrimination = Rational(1, 2);
        const Chain chain =
            mined_chain(params, {a, b, a, b, a, b, a, b}, profile);
        REQUIRE(validate_chain(chain, profile).ok());
        Chain prefix;
        prefix.params = chain.params;
        for (const Block& blk : chain.blocks) {
            prefix.blocks.push_back(blk);
            CHECK(validate_chain(prefix, profile).ok());
        }
    }
}

TEST_CASE("proof-of-mining blocks are priced by the previous window's stake") {
    const HashProfile profile(16);
    const Account a = acct(1), b = acct(2);
    ChainParams params;
    params.mode = Mode::pom;
    params.period = 2;
    params.discrimination = Rational(1, 2);
    params.difficulty = {1, 1};

    // window 0: one block each, so both hold stake 1/2 in window 1
    Chain chain = mined_chain(params, {a, b}, profile);
    const Rational stake =
        mining_stake(a, window_stats(chain, 0), params.discrimination, 2);
    REQUIRE(stake == Rational(1, 2));

    const Rational threshold =
        pom_threshold(1, stake, profile.max_value());

    // find a nonce whose hash lands strictly above the stake-scaled
    // threshold; with threshold M/2 that takes a couple of tries
    pom::miner::MiningJob job;
    job.parent_chain = chain;
    job.miner = a;
    for (std::uint64_t nonce = 0;; ++nonce) {
        const Block candidate =
            pom::miner::candidate_block(job, profile, nonce);
        if (Rational(pom::ledger::block_hash(candidate, profile)) > threshold) {
            chain.blocks.push_back(candidate);
            break;
        }
    }
    const auto report = validate_consensus(chain, profile);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].block_index == 2);
    CHECK(report.violations[0].rule == "pom-threshold");

    // the same block passes once mined properly
    chain.blocks.pop_back();
    job.target = next_block_threshold(chain, a, profile);
    CHECK(job.target == threshold);
    const auto mined = pom::miner::mine(job, profile);
    REQUIRE(mined.block.has_value());
    chain.blocks.push_back(*mined.block);
    CHECK(validate_consensus(chain, profile).ok());
}

TEST_CASE("segment difficulty sums the per-block difficulty values") {
    const HashProfile profile(16);
    const Account a = acct(1);
    const Chain chain =
        mined_chain(pow_params(2, {1, 3}), {a, a, a, a}, profile);

    CHECK(segment_difficulty(chain, 0, 0) == 1);
    CHECK(segment_difficulty(chain, 2, 2) == 3);
    CHECK(segment_difficulty(chain, 0, 1) == 2);   // full first window
    CHECK(segment_difficulty(chain, 0, 3) == 8);   // 1+1+3+3
    CHECK(total_difficulty(chain) == 8);
    CHECK(total_difficulty(Chain{}) == 0);
    CHECK_THROWS_AS(segment_difficulty(chain, 2, 1), std::out_of_range);
    CHECK_THROWS_AS(segment_difficulty(chain, 0, 4), std::out_of_range);
}

TEST_CASE("fork choice prefers the heaviest chain, with total tie-breaking") {
    const HashProfile profile(16);
    const Account a = acct(1), b = acct(2);
    const auto params = pow_params(4, {1, 1, 1});

    SUBCASE("a single candidate is returned unchanged") {
        const Chain only = mined_chain(params, {a, a}, profile);
        std::vector<Chain> candidates = {only};
        CHECK(&fork_choice(candidates, profile) == &candidates[0]);
    }
    SUBCASE("at constant difficulty, more blocks win") {
        const Chain ten = mined_chain(params, std::vector<Account>(10, a), profile);
        const Chain twelve =
            mined_chain(params, std::vector<Account>(12, b), profile);
        std::vector<Chain> candidates = {ten, twelve};
        CHECK(fork_choice(candidates, profile) == twelve);
        std::vector<Chain> reversed = {twelve, ten};
        CHECK(fork_choice(reversed, profile) == twelve);
    }
    SUBCASE("equal difficulty resolves by the smaller tip hash, any order") {
        const Chain one = mined_chain(params, {a, a, a}, profile);
        const Chain two = mined_chain(params, {a, a, b}, profile);
        REQUIRE(total_difficulty(one) == total_difficulty(two));

        std::vector<Chain> forward = {one, two};
        std::vector<Chain> backward = {two, one};
        const Chain& winner = fork_choice(forward, profile);
        CHECK(fork_choice(backward, profile) == winner);

        const HashValue tip_one =
            pom::ledger::block_hash(one.blocks.back(), profile);
        const HashValue tip_two =
            pom::ledger::block_hash(two.blocks.back(), profile);
        if (tip_one != tip_two) {
            CHECK(pom::ledger::block_hash(winner.blocks.back(), profile) ==
                  std::min(tip_one, tip_two));
        }
    }
    SUBCASE("preference is a strict total order") {
        std::vector<Chain> chains;
        chains.push_back(mined_chain(params, {a}, profile));
        chains.push_back(mined_chain(params, {b}, profile));
        chains.push_back(mined_chain(params, {a, b}, profile));
        chains.push_back(mined_chain(params, {b, a}, profile));
        for (const Chain& x : chains) {
            CHECK_FALSE(preferred(x, x, profile));
            for (const Chain& y : chains) {
                if (x == y) continue;
                CHECK(preferred(x, y, profile) != preferred(y, x, profile));
            }
        }
        CHECK_THROWS_AS(fork_choice(std::span<const Chain>{}, profile),
                        std::invalid_argument);
    }
}
