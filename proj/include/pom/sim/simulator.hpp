#pragma once

#include "pom/consensus.hpp"
#include "pom/sim/rng.hpp"
#include "pom/sim/scenario.hpp"

#include <optional>
#include <set>
#include <vector>

namespace pom::sim {

struct BlockRecord {
    double time = 0;
    Account miner;
    std::uint64_t index = 0;   // chain position of the block
    std::uint64_t window = 0;  // index / period
    double difficulty = 0;
    double stake = 0;          // stake that priced this block (1 under proof-of-work)
    bool attacker_branch = false;
};

struct WindowRecord {
    std::uint64_t window_index = 0;
    std::uint64_t miner_count = 0;
    double duration = 0;    // time between the closing blocks of adjacent windows
    double difficulty = 0;  // difficulty in force during this window
};

struct AttackOutcome {
    bool caught_up = false;
    double final_deficit = 0;  // public minus private total difficulty at stop
    std::uint64_t honest_blocks = 0;    // mined during the run, pre-seeded lag excluded
    std::uint64_t attacker_blocks = 0;
};

struct SimResult {
    std::vector<BlockRecord> blocks;    // time-ordered, both branches; empty if not recorded
    std::vector<WindowRecord> windows;  // completed windows of the public branch
    std::vector<Rational> difficulty_schedule;  // public branch, one entry per window started
    std::optional<AttackOutcome> attack;
    double final_time = 0;
    std::uint64_t chain_length = 0;     // public branch, pre-seeded blocks included
};

/// One exponential inter-arrival sample. A miner with power P attempting
/// hashes against a threshold that a fraction f of hash values meets
/// produces blocks as a Poisson process with rate P*f; under proof-of-work
/// f = 1/D, under proof-of-mining f = stake/D. Throws std::invalid_argument
/// on rate <= 0.
double block_time_sample(double rate, SplitMix64& rng);

/// Discrete-event run: every miner holds an exponential next-block time at
/// its current rate, the earliest event appends a block to its branch, and
/// window boundaries recompute stats, stakes and rates (with the new window
/// priced by the one just completed). Honest and sybil miners extend the
/// public chain; attacker miners extend a private fork that starts `lag`
/// blocks behind. Stops at the block or time horizon, or when the attack
/// resolves (fork caught up, or fell `deficit_cutoff` blocks behind).
SimResult run_scenario(const Scenario& s);

struct Lemma2Stat {
    std::uint64_t trials = 0;
    Rational set_stake;      // exact stake of the set under the seed window
    double mean_time = 0;    // empirical mean time for the set to mine one block
    double predicted = 0;    // difficulty / stake
    double relative_error = 0;
};

/// Mean time for `members` to produce one block on top of the scenario's
/// seed window, against the prediction difficulty/stake. Each trial is an
/// independent run_scenario seeded by derive_seed(s.seed, trial). Members
/// must be unit-power scenario miners and the seed window must be present.
/// When `samples` is given, it receives every trial's time.
Lemma2Stat verify_lemma2(const Scenario& s, const std::set<Account>& members,
                         std::uint64_t trials, std::vector<double>* samples = nullptr);

struct CompletionStat {
    std::uint64_t blocks = 0;
    Rational set_stake;
    double total_time = 0;
    double predicted = 0;  // blocks * difficulty / stake
    double relative_error = 0;
};

/// Time for the scenario's miners to produce `blocks` blocks within the
/// window after the seed window (so stakes stay fixed for the whole
/// measurement). Requires blocks <= period. When `block_times` is given,
/// it receives the completion time of every block.
CompletionStat measure_completion(const Scenario& s, std::uint64_t blocks,
                                  std::vector<double>* block_times = nullptr);

struct CatchupEstimate {
    std::uint64_t trials = 0;
    std::uint64_t caught = 0;
    double probability = 0;   // caught / trials
    double attacker_share = 0;  // q, the attacker's share of total power
    double formula = 0;       // (q/p)^lag, the random-walk ruin probability
    std::vector<std::uint8_t> trial_caught;  // one flag per trial
};

/// Monte Carlo estimate of the probability that the private fork ever
/// matches the public chain's total difficulty, starting `lag` blocks
/// behind. Trials are independent run_scenario calls.
CatchupEstimate attack_catchup(const Scenario& s, std::uint64_t lag, std::uint64_t trials);

struct SybilWindowRow {
    std::uint64_t window_index = 0;
    std::uint64_t miner_count = 0;   // NOM of this window
    std::uint64_t sybil_miners = 0;  // sybil identities among them
    std::uint64_t sybil_blocks = 0;  // blocks the sybil set mined in this window
    double sybil_stake = 0;          // set stake from this window (prices the next one)
    double sybil_rate_share = 0;     // share of next-window block production
    bool majority = false;           // sybil_stake > 1/2
};

struct SybilReport {
    std::vector<SybilWindowRow> rows;
    double identity_share_needed = 0;   // 1/(2(1-a)); +inf when a = 1
    double single_identity_stake = 0;   // expected stake had the same power run one account
    std::uint64_t majority_windows = 0; // windows whose stake crossed 1/2
};

/// Runs the scenario with the sybil identities mining honestly and reports,
/// window by window, how identity splitting inflates the set's stake via
/// the egalitarian base term.
SybilReport sybil_experiment(const Scenario& s);

/// Proportional difficulty controller: the next window's difficulty is
/// current * (target_interval * period / observed_duration), clamped to
/// [current/4, current*4]. Exact rational arithmetic; the observed duration
/// converts exactly from its double value.
Rational retarget(double observed_duration, const Rational& target_interval,
                  std::uint64_t period, const Rational& current_difficulty);

}  // namespace pom::sim
