#pragma once

#include "pom/sim/simulator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pom::sim {

/// Tabular experiment output. Cells are preformatted strings (numbers via
/// the shortest round-trip form), so serialization is byte-stable under a
/// fixed seed.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    std::string csv() const;
    bool empty() const { return rows.empty(); }
};

/// Optional overrides for the named recipes; anything unset keeps the
/// recipe's built-in value.
struct ExperimentConfig {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<Rational> difficulty;
    std::optional<Rational> alpha;
    std::optional<std::uint64_t> period;
    std::optional<Rational> retarget_interval;
};

struct ExperimentOutput {
    std::string name;
    bool pass = false;
    std::string note;   // one human-readable line per check
    Table summary;      // one row per sub-configuration, with pass/fail column
    Table detail;       // finer-grained rows (per trial, window, or case)
};

// Single-miner block times against the difficulty/power prediction.
struct Lemma1Row {
    double power = 0;
    double mean_time = 0;
    double predicted = 0;
    double relative_error = 0;
};
struct Lemma1Result {
    std::vector<Lemma1Row> rows;
    double max_relative_error = 0;
};
Lemma1Result run_lemma1(const Rational& difficulty, const std::vector<double>& powers,
                        std::uint64_t trials, std::uint64_t seed);

// k-block completion times and the 1/sqrt(k) concentration trend.
struct Theorem1Row {
    std::uint64_t blocks = 0;
    double total_time = 0;        // first repeat, the headline run
    double predicted = 0;
    double relative_error = 0;    // first repeat
    double mean_abs_deviation = 0;  // across repeats
};
struct Theorem1Result {
    std::vector<Theorem1Row> rows;  // ordered by ascending k
    double trend_ratio = 0;  // mean abs deviation at smallest k over largest k
};
Theorem1Result run_theorem1(const Rational& difficulty, double power,
                            const std::vector<std::uint64_t>& block_counts,
                            std::uint64_t repeats, std::uint64_t seed);

// Set block times under fixed window stats, at pinned exact stakes.
struct Lemma2Case {
    std::string label;
    Rational stake;
    Lemma2Stat stat;
};
struct Lemma2Result {
    std::vector<Lemma2Case> cases;
    double max_relative_error = 0;
};
Lemma2Result run_lemma2(const Rational& difficulty, std::uint64_t trials, std::uint64_t seed);

struct Theorem2Result {
    CompletionStat stat;
    std::vector<double> block_times;  // completion time after each block
};
Theorem2Result run_theorem2(const Rational& difficulty, std::uint64_t blocks,
                            std::uint64_t seed);

// Exhaustive stake-majority grid: direct comparison of the set stake
// against 1/2 versus the mined-share inequality that is supposed to be
// equivalent to it, plus the sufficient identity-share condition.
struct GridCase {
    Rational alpha;
    std::uint64_t period = 0;
    std::uint64_t miner_count = 0;  // distinct miners in the window
    std::uint64_t set_size = 0;     // accounts in the set
    std::uint64_t set_blocks = 0;   // blocks the set mined
};
struct Lemma3GridResult {
    std::uint64_t cases = 0;
    std::uint64_t disagreements = 0;
    std::vector<GridCase> first_disagreements;  // at most 10, for diagnosis
    std::uint64_t cross_checked = 0;   // cases re-derived through WindowStats
    std::uint64_t corollary_cases = 0;
    std::uint64_t corollary_failures = 0;
    std::uint64_t corollary_edge_cases = 0;  // share exactly at threshold, no blocks
    std::uint64_t corollary_edge_exact_half = 0;  // of those, stake == 1/2 exactly
};
Lemma3GridResult run_lemma3_grid();

struct CatchupRow {
    std::uint64_t lag = 0;
    CatchupEstimate estimate;
    double abs_diff = 0;  // |probability - formula|
};
struct CatchupResult {
    std::vector<CatchupRow> rows;
    double max_abs_diff = 0;
};
CatchupResult run_catchup(double attacker_share, const std::vector<std::uint64_t>& lags,
                          std::uint64_t trials, std::uint64_t seed);

struct SybilResult {
    SybilReport report;
    std::uint64_t honest = 0;
    std::uint64_t sybils = 0;
    Rational alpha;
};
SybilResult run_sybil(std::uint64_t honest, std::uint64_t sybils, const Rational& alpha,
                      std::uint64_t period, std::uint64_t windows,
                      const Rational& difficulty, std::uint64_t seed);

struct RetargetDemoRow {
    std::uint64_t window_index = 0;
    double difficulty = 0;
    double duration = 0;
    double mean_interval = 0;
};
struct RetargetDemoResult {
    std::vector<RetargetDemoRow> rows;
    double fixed_point = 0;  // target_interval * total power
    double final_difficulty = 0;
};
RetargetDemoResult run_retarget_demo(const Rational& start_difficulty,
                                     const Rational& target_interval, std::uint64_t period,
                                     std::uint64_t windows, std::uint64_t miners,
                                     std::uint64_t seed);

/// The eight named recipes behind the CLI: lemma1, theorem1, lemma2,
/// theorem2, lemma3-grid, catchup, sybil, retarget-demo. Applies config
/// overrides, runs the experiment, formats tables, and evaluates the
/// recipe's pinned tolerance. Throws std::invalid_argument for an unknown
/// name.
ExperimentOutput run_named_experiment(const std::string& name, const ExperimentConfig& config);

std::vector<std::string> experiment_names();

}  // namespace pom::sim
