#include "pom/sim/experiments.hpp"

#include "pom/codec.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pom::sim {

namespace {

std::string fd(double value) { return codec::encode_double(value); }
std::string fu(std::uint64_t value) { return std::to_string(value); }
std::string fr(const Rational& value) { return codec::encode_rational(value); }
std::string fb(bool value) { return value ? "pass" : "fail"; }

Account tagged_account(std::uint8_t group, std::uint8_t index) {
    return Account({group, index});
}

Scenario single_miner_scenario(const Rational& difficulty, double power,
                               std::uint64_t horizon) {
    Scenario s;
    s.params.mode = ledger::Mode::pow;
    // Keep the horizon inside window 0 so no pointless stat recomputation
    // happens; under proof-of-work the rate is constant anyway.
    s.params.period = std::max<std::uint64_t>(horizon + 1, 2);
    s.params.difficulty = {difficulty};
    s.miners.push_back({tagged_account(0x01, 0), power, Strategy::honest});
    s.horizon_blocks = horizon;
    s.record_blocks = false;
    return s;
}

}  // namespace

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw std::logic_error("table row width does not match its header");
    rows.push_back(std::move(cells));
}

std::string Table::csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) os << ',';
        os << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) os << ',';
            os << row[i];
        }
        os << '\n';
    }
    return os.str();
}

Lemma1Result run_lemma1(const Rational& difficulty, const std::vector<double>& powers,
                        std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (powers.empty()) throw std::invalid_argument("no powers given");
    Lemma1Result result;
    for (std::size_t pi = 0; pi < powers.size(); ++pi) {
        Scenario s = single_miner_scenario(difficulty, powers[pi], 1);
        const std::uint64_t stream = derive_seed(seed, pi);
        double sum = 0;
        for (std::uint64_t trial = 0; trial < trials; ++trial) {
            s.seed = derive_seed(stream, trial);
            sum += run_scenario(s).final_time;
        }
        Lemma1Row row;
        row.power = powers[pi];
        row.mean_time = sum / static_cast<double>(trials);
        row.predicted = (difficulty / Rational(powers[pi])).convert_to<double>();
        row.relative_error = std::abs(row.mean_time - row.predicted) / row.predicted;
        result.max_relative_error = std::max(result.max_relative_error, row.relative_error);
        result.rows.push_back(row);
    }
    return result;
}

Theorem1Result run_theorem1(const Rational& difficulty, double power,
                            const std::vector<std::uint64_t>& block_counts,
                            std::uint64_t repeats, std::uint64_t seed) {
    if (repeats == 0) throw std::invalid_argument("repeats must be positive");
    Theorem1Result result;
    for (std::size_t ki = 0; ki < block_counts.size(); ++ki) {
        const std::uint64_t k = block_counts[ki];
        Scenario s = single_miner_scenario(difficulty, power, k);
        const std::uint64_t stream = derive_seed(seed, ki);
        Theorem1Row row;
        row.blocks = k;
        row.predicted =
            (Rational(k) * difficulty / Rational(power)).convert_to<double>();
        double abs_sum = 0;
        for (std::uint64_t repeat = 0; repeat < repeats; ++repeat) {
            s.seed = derive_seed(stream, repeat);
            const double time = run_scenario(s).final_time;
            const double deviation = (time - row.predicted) / row.predicted;
            if (repeat == 0) {
                row.total_time = time;
                row.relative_error = std::abs(deviation);
            }
            abs_sum += std::abs(deviation);
        }
        row.mean_abs_deviation = abs_sum / static_cast<double>(repeats);
        result.rows.push_back(row);
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const Theorem1Row& a, const Theorem1Row& b) { return a.blocks < b.blocks; });
    if (result.rows.size() >= 2 && result.rows.back().mean_abs_deviation > 0) {
        result.trend_ratio =
            result.rows.front().mean_abs_deviation / result.rows.back().mean_abs_deviation;
    }
    return result;
}

namespace {

// One timing-law configuration: the composition of the window that prices
// the measured blocks, and which of its accounts form the measured set.
struct StakeRecipe {
    std::uint64_t period;
    // parallel vectors: account index 0x01.. mines counts[i] blocks
    std::vector<std::uint64_t> counts;
    std::size_t set_size;  // the first set_size accounts form the set
};

Scenario stake_scenario(const StakeRecipe& recipe, const Rational& alpha,
                        const Rational& difficulty, std::uint64_t seed,
                        std::set<Account>* members) {
    Scenario s;
    s.params.mode = ledger::Mode::pom;
    s.params.period = recipe.period;
    s.params.discrimination = alpha;
    s.params.difficulty = {difficulty};
    s.seed = seed;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < recipe.counts.size(); ++i) {
        const Account account = tagged_account(0x01, static_cast<std::uint8_t>(i));
        for (std::uint64_t b = 0; b < recipe.counts[i]; ++b) s.seed_window.push_back(account);
        total += recipe.counts[i];
        if (i < recipe.set_size) {
            s.miners.push_back({account, 1.0, Strategy::honest});
            members->insert(account);
        }
    }
    if (total != recipe.period) throw std::logic_error("recipe does not fill its window");
    return s;
}

}  // namespace

Lemma2Result run_lemma2(const Rational& difficulty, std::uint64_t trials,
                        std::uint64_t seed) {
    // Window compositions with set stakes exactly 1/10, 1/4 and 1/2 at
    // blend weight 1/2: stake = (1/2)(set size / miner count)
    //                          + (1/2)(set blocks / period).
    const Rational alpha(1, 2);
    const std::vector<StakeRecipe> recipes = {
        {10, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 1},  // 1 of 10 miners with 1 of 10 blocks
        {16, {4, 4, 4, 4}, 1},                    // 1/4 of 4 miners with 4 of 16 blocks
        {16, {4, 4, 4, 4}, 2},                    // 2/4 of the miners with 8 of 16 blocks
    };

    Lemma2Result result;
    for (std::size_t ri = 0; ri < recipes.size(); ++ri) {
        std::set<Account> members;
        Scenario s = stake_scenario(recipes[ri], alpha, difficulty,
                                    derive_seed(seed, ri), &members);
        Lemma2Case c;
        c.stat = verify_lemma2(s, members, trials);
        c.stake = c.stat.set_stake;
        c.label = fr(c.stake);
        result.max_relative_error =
            std::max(result.max_relative_error, c.stat.relative_error);
        result.cases.push_back(std::move(c));
    }
    return result;
}

Theorem2Result run_theorem2(const Rational& difficulty, std::uint64_t blocks,
                            std::uint64_t seed) {
    // Window of 2048 blocks split evenly over four miners; the first two
    // form the set: stake = (1/2)(2/4) + (1/2)(1024/2048) = 1/2, and the
    // whole measurement fits inside the following window.
    StakeRecipe recipe{2048, {512, 512, 512, 512}, 2};
    if (blocks > recipe.period)
        throw std::invalid_argument("block count exceeds the measuring window");
    std::set<Account> members;
    Scenario s = stake_scenario(recipe, Rational(1, 2), difficulty, seed, &members);
    Theorem2Result result;
    result.stat = measure_completion(s, blocks, &result.block_times);
    return result;
}

namespace {

// Builds a window whose aggregate shape matches one grid point, or returns
// nothing when no real window can have that shape (e.g. more miners than
// blocks). Set members use group 0x01, outside miners group 0x02; members
// beyond the mining ones simply never appear in the sequence.
std::optional<consensus::WindowStats> synthesize_window(std::uint64_t period, std::uint64_t nom,
                                             std::uint64_t set_size,
                                             std::uint64_t set_blocks) {
    const std::uint64_t mining_members = std::min(set_size, set_blocks);
    if (set_blocks > 0 && set_size == 0) return std::nullopt;
    if (nom < mining_members) return std::nullopt;
    const std::uint64_t outsiders = nom - mining_members;
    const std::uint64_t outside_blocks = period - set_blocks;
    if (outsiders > outside_blocks) return std::nullopt;  // someone would mine nothing
    if (outsiders == 0 && outside_blocks > 0) return std::nullopt;  // orphan blocks

    std::vector<Account> sequence;
    sequence.reserve(period);
    for (std::uint64_t i = 0; i < mining_members; ++i) {
        const std::uint64_t count =
            i == 0 ? set_blocks - (mining_members - 1) : 1;
        for (std::uint64_t b = 0; b < count; ++b)
            sequence.push_back(tagged_account(0x01, static_cast<std::uint8_t>(i)));
    }
    for (std::uint64_t i = 0; i < outsiders; ++i) {
        const std::uint64_t count = i == 0 ? outside_blocks - (outsiders - 1) : 1;
        for (std::uint64_t b = 0; b < count; ++b)
            sequence.push_back(tagged_account(0x02, static_cast<std::uint8_t>(i)));
    }
    return consensus::window_stats_from_miners(sequence, 0);
}

}  // namespace

Lemma3GridResult run_lemma3_grid() {
    Lemma3GridResult result;
    const Rational half(1, 2);
    std::vector<Rational> alphas;
    for (int ai = 1; ai <= 20; ++ai) alphas.emplace_back(ai, 20);

    for (const std::uint64_t period : {std::uint64_t{10}, std::uint64_t{100}}) {
        for (std::uint64_t nom = 1; nom <= 20; ++nom) {
            for (std::uint64_t set_size = 0; set_size <= nom; ++set_size) {
                std::set<Account> members;
                for (std::uint64_t i = 0; i < set_size; ++i)
                    members.insert(tagged_account(0x01, static_cast<std::uint8_t>(i)));
                for (std::uint64_t set_blocks = 0; set_blocks <= period; ++set_blocks) {
                    const std::optional<consensus::WindowStats> stats =
                        synthesize_window(period, nom, set_size, set_blocks);
                    const Rational mined_share =
                        Rational(set_blocks) / Rational(period);
                    for (const Rational& a : alphas) {
                        ++result.cases;
                        const Rational base = 1 - a;  // egalitarian weight
                        const Rational base_term =
                            base * Rational(set_size) / Rational(nom);
                        const Rational stake = base_term + a * mined_share;
                        // Threshold the mined share must exceed for majority,
                        // rearranged so it stays defined at full blend weight:
                        // (1-a)/a * (1/(2(1-a)) - |S|/NOM)
                        //   = 1/(2a) - (1-a)|S|/(a NOM).
                        const Rational rhs = Rational(1) / (2 * a) - base_term / a;
                        const bool direct = stake > half;
                        const bool via_inequality = mined_share > rhs;
                        bool agree = direct == via_inequality;
                        if (stats) {
                            ++result.cross_checked;
                            const Rational api_stake =
                                consensus::mining_stake(members, *stats, a, period);
                            if (api_stake != stake) agree = false;
                        }
                        if (!agree) {
                            ++result.disagreements;
                            if (result.first_disagreements.size() < 10)
                                result.first_disagreements.push_back(
                                    {a, period, nom, set_size, set_blocks});
                        }
                        const Rational share_gap =
                            2 * base * Rational(set_size) - Rational(nom);
                        if (share_gap >= 0 && set_blocks >= 1) {
                            ++result.corollary_cases;
                            if (!(stake > half)) ++result.corollary_failures;
                        }
                        if (share_gap == 0 && set_blocks == 0) {
                            ++result.corollary_edge_cases;
                            if (stake == half) ++result.corollary_edge_exact_half;
                        }
                    }
                }
            }
        }
    }
    return result;
}

CatchupResult run_catchup(double attacker_share, const std::vector<std::uint64_t>& lags,
                          std::uint64_t trials, std::uint64_t seed) {
    if (!(attacker_share > 0) || !(attacker_share < 0.5))
        throw std::invalid_argument("attacker share must lie in (0, 1/2)");
    Scenario s;
    s.params.mode = ledger::Mode::pow;
    s.params.period = std::uint64_t{1} << 30;  // the race never crosses a window
    s.params.difficulty = {1};
    s.miners.push_back({tagged_account(0x01, 0), 1.0 - attacker_share, Strategy::honest});
    s.miners.push_back(
        {tagged_account(0x02, 0), attacker_share, Strategy::attacker_private_fork});
    s.attack.emplace();
    s.record_blocks = false;

    CatchupResult result;
    for (std::size_t li = 0; li < lags.size(); ++li) {
        s.seed = derive_seed(seed, li);
        CatchupRow row;
        row.lag = lags[li];
        row.estimate = attack_catchup(s, lags[li], trials);
        row.abs_diff = std::abs(row.estimate.probability - row.estimate.formula);
        result.max_abs_diff = std::max(result.max_abs_diff, row.abs_diff);
        result.rows.push_back(std::move(row));
    }
    return result;
}

SybilResult run_sybil(std::uint64_t honest, std::uint64_t sybils, const Rational& alpha,
                      std::uint64_t period, std::uint64_t windows,
                      const Rational& difficulty, std::uint64_t seed) {
    if (honest == 0 || sybils == 0)
        throw std::invalid_argument("need honest and sybil miners");
    if (honest + sybils > 255) throw std::invalid_argument("too many miners");
    Scenario s;
    s.params.mode = ledger::Mode::pom;
    s.params.period = period;
    s.params.discrimination = alpha;
    s.params.difficulty = {difficulty};
    for (std::uint64_t i = 0; i < honest; ++i)
        s.miners.push_back(
            {tagged_account(0x10, static_cast<std::uint8_t>(i)), 1.0, Strategy::honest});
    for (std::uint64_t i = 0; i < sybils; ++i)
        s.miners.push_back({tagged_account(0x20, static_cast<std::uint8_t>(i)), 1.0,
                            Strategy::sybil_spawner});
    s.horizon_blocks = windows * period;
    s.seed = seed;

    SybilResult result;
    result.report = sybil_experiment(s);
    result.honest = honest;
    result.sybils = sybils;
    result.alpha = alpha;
    return result;
}

RetargetDemoResult run_retarget_demo(const Rational& start_difficulty,
                                     const Rational& target_interval, std::uint64_t period,
                                     std::uint64_t windows, std::uint64_t miners,
                                     std::uint64_t seed) {
    if (miners == 0 || miners > 255) throw std::invalid_argument("bad miner count");
    if (windows == 0) throw std::invalid_argument("windows must be positive");
    Scenario s;
    s.params.mode = ledger::Mode::pow;
    s.params.period = period;
    s.params.difficulty = {start_difficulty};
    s.retarget = RetargetRule{target_interval};
    for (std::uint64_t i = 0; i < miners; ++i)
        s.miners.push_back(
            {tagged_account(0x01, static_cast<std::uint8_t>(i)), 1.0, Strategy::honest});
    s.horizon_blocks = windows * period;
    s.seed = seed;

    const SimResult sim = run_scenario(s);
    RetargetDemoResult result;
    result.fixed_point =
        (target_interval * Rational(miners)).convert_to<double>();
    for (const auto& w : sim.windows) {
        RetargetDemoRow row;
        row.window_index = w.window_index;
        row.difficulty = w.difficulty;
        row.duration = w.duration;
        row.mean_interval = w.duration / static_cast<double>(period);
        result.rows.push_back(row);
    }
    if (!result.rows.empty()) result.final_difficulty = result.rows.back().difficulty;
    return result;
}

namespace {

struct Overrides {
    std::uint64_t trials;
    std::uint64_t seed;
    Rational difficulty;
    Rational alpha;
    std::uint64_t period;
    Rational retarget_interval;
};

Overrides resolve(const ExperimentConfig& c, std::uint64_t trials, std::uint64_t seed,
                  Rational difficulty, Rational alpha, std::uint64_t period,
                  Rational interval) {
    Overrides o{trials, seed, difficulty, alpha, period, interval};
    if (c.trials) o.trials = *c.trials;
    if (c.seed) o.seed = *c.seed;
    if (c.difficulty) o.difficulty = *c.difficulty;
    if (c.alpha) o.alpha = *c.alpha;
    if (c.period) o.period = *c.period;
    if (c.retarget_interval) o.retarget_interval = *c.retarget_interval;
    return o;
}

ExperimentOutput named_lemma1(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 10000, 101, 100, 0, 0, 0);
    const std::vector<double> powers = {1, 2, 5};
    ExperimentOutput out;
    out.name = "lemma1";
    const double tolerance = 0.03;

    // Rebuild with per-trial capture for the detail table.
    out.summary.columns = {"power", "difficulty", "trials", "mean_time",
                           "predicted", "relative_error", "tolerance", "result"};
    out.detail.columns = {"power", "trial", "block_time"};
    Lemma1Result result;
    for (std::size_t pi = 0; pi < powers.size(); ++pi) {
        Scenario s = single_miner_scenario(o.difficulty, powers[pi], 1);
        const std::uint64_t stream = derive_seed(o.seed, pi);
        double sum = 0;
        for (std::uint64_t trial = 0; trial < o.trials; ++trial) {
            s.seed = derive_seed(stream, trial);
            const double time = run_scenario(s).final_time;
            out.detail.add_row({fd(powers[pi]), fu(trial), fd(time)});
            sum += time;
        }
        Lemma1Row row;
        row.power = powers[pi];
        row.mean_time = sum / static_cast<double>(o.trials);
        row.predicted = (o.difficulty / Rational(powers[pi])).convert_to<double>();
        row.relative_error = std::abs(row.mean_time - row.predicted) / row.predicted;
        result.max_relative_error =
            std::max(result.max_relative_error, row.relative_error);
        result.rows.push_back(row);
        out.summary.add_row({fd(row.power), fr(o.difficulty), fu(o.trials),
                             fd(row.mean_time), fd(row.predicted), fd(row.relative_error),
                             fd(tolerance), fb(row.relative_error <= tolerance)});
    }
    out.pass = result.max_relative_error <= tolerance;
    out.note = "mean block time vs difficulty/power; max relative error " +
               fd(result.max_relative_error) + " (tolerance " + fd(tolerance) + ")";
    return out;
}

ExperimentOutput named_theorem1(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 25, 102, 100, 0, 0, 0);
    ExperimentOutput out;
    out.name = "theorem1";
    const double tolerance = 0.03;
    const Theorem1Result result =
        run_theorem1(o.difficulty, 1.0, {100, 10000}, o.trials, o.seed);

    out.summary.columns = {"blocks", "repeats", "total_time", "predicted",
                           "relative_error", "mean_abs_deviation", "tolerance", "result"};
    for (const auto& row : result.rows) {
        const bool headline = row.blocks == 10000;
        out.summary.add_row({fu(row.blocks), fu(o.trials), fd(row.total_time),
                             fd(row.predicted), fd(row.relative_error),
                             fd(row.mean_abs_deviation), headline ? fd(tolerance) : "",
                             headline ? fb(row.relative_error <= tolerance) : ""});
    }
    out.detail.columns = {"blocks", "note"};
    out.detail.add_row({"", "deviation ratio k=100 over k=10000: " + fd(result.trend_ratio)});
    const bool concentration =
        result.rows.front().mean_abs_deviation > result.rows.back().mean_abs_deviation;
    out.pass = result.rows.back().relative_error <= tolerance && concentration;
    out.note = "k-block completion time; k=10000 relative error " +
               fd(result.rows.back().relative_error) + ", deviation shrinks with k (ratio " +
               fd(result.trend_ratio) + ", expected near sqrt(100)=10)";
    return out;
}

ExperimentOutput named_lemma2(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 10000, 103, 100, 0, 0, 0);
    ExperimentOutput out;
    out.name = "lemma2";
    const double tolerance = 0.03;
    const Rational alpha(1, 2);
    const std::vector<StakeRecipe> recipes = {
        {10, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 1},
        {16, {4, 4, 4, 4}, 1},
        {16, {4, 4, 4, 4}, 2},
    };

    out.summary.columns = {"set_stake", "trials", "mean_time", "predicted",
                           "relative_error", "tolerance", "result"};
    out.detail.columns = {"set_stake", "trial", "block_time"};
    double max_err = 0;
    for (std::size_t ri = 0; ri < recipes.size(); ++ri) {
        std::set<Account> members;
        Scenario s = stake_scenario(recipes[ri], alpha, o.difficulty,
                                    derive_seed(o.seed, ri), &members);
        std::vector<double> samples;
        const Lemma2Stat stat = verify_lemma2(s, members, o.trials, &samples);
        for (std::uint64_t trial = 0; trial < samples.size(); ++trial)
            out.detail.add_row({fr(stat.set_stake), fu(trial), fd(samples[trial])});
        max_err = std::max(max_err, stat.relative_error);
        out.summary.add_row({fr(stat.set_stake), fu(o.trials), fd(stat.mean_time),
                             fd(stat.predicted), fd(stat.relative_error), fd(tolerance),
                             fb(stat.relative_error <= tolerance)});
    }
    out.pass = max_err <= tolerance;
    out.note = "set block time vs difficulty/stake at stakes 1/10, 1/4, 1/2; "
               "max relative error " + fd(max_err);
    return out;
}

ExperimentOutput named_theorem2(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 1000, 104, 100, 0, 0, 0);
    ExperimentOutput out;
    out.name = "theorem2";
    const double tolerance = 0.05;
    const Theorem2Result result = run_theorem2(o.difficulty, o.trials, o.seed);

    out.summary.columns = {"blocks", "set_stake", "total_time", "predicted",
                           "relative_error", "tolerance", "result"};
    out.summary.add_row({fu(result.stat.blocks), fr(result.stat.set_stake),
                         fd(result.stat.total_time), fd(result.stat.predicted),
                         fd(result.stat.relative_error), fd(tolerance),
                         fb(result.stat.relative_error <= tolerance)});
    out.detail.columns = {"block", "completion_time"};
    for (std::size_t i = 0; i < result.block_times.size(); ++i)
        out.detail.add_row({fu(i + 1), fd(result.block_times[i])});
    out.pass = result.stat.relative_error <= tolerance;
    out.note = "time for the set to mine " + fu(result.stat.blocks) +
               " blocks in one window; relative error " + fd(result.stat.relative_error);
    return out;
}

ExperimentOutput named_lemma3_grid(const ExperimentConfig&) {
    ExperimentOutput out;
    out.name = "lemma3-grid";
    const Lemma3GridResult result = run_lemma3_grid();

    out.summary.columns = {"cases",           "disagreements",
                           "cross_checked",   "corollary_cases",
                           "corollary_failures", "edge_cases",
                           "edge_exact_half", "result"};
    out.summary.add_row({fu(result.cases), fu(result.disagreements),
                         fu(result.cross_checked), fu(result.corollary_cases),
                         fu(result.corollary_failures), fu(result.corollary_edge_cases),
                         fu(result.corollary_edge_exact_half),
                         fb(result.disagreements == 0 && result.corollary_failures == 0)});
    out.detail.columns = {"alpha", "period", "miner_count", "set_size", "set_blocks"};
    for (const auto& c : result.first_disagreements)
        out.detail.add_row(
            {fr(c.alpha), fu(c.period), fu(c.miner_count), fu(c.set_size), fu(c.set_blocks)});
    out.pass = result.disagreements == 0 && result.corollary_failures == 0;
    out.note = "violations: " + fu(result.disagreements) + " over " + fu(result.cases) +
               " cases; sufficient-condition failures: " + fu(result.corollary_failures) +
               "; boundary cases with stake exactly 1/2 (no blocks mined): " +
               fu(result.corollary_edge_cases);
    return out;
}

ExperimentOutput named_catchup(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 10000, 108, 0, 0, 0, 0);
    ExperimentOutput out;
    out.name = "catchup";
    const double tolerance = 0.01;
    std::vector<std::uint64_t> lags;
    for (std::uint64_t z = 1; z <= 10; ++z) lags.push_back(z);
    const CatchupResult result = run_catchup(0.3, lags, o.trials, o.seed);

    out.summary.columns = {"lag", "trials", "caught", "probability", "formula",
                           "abs_diff", "tolerance", "result"};
    out.detail.columns = {"lag", "trial", "caught_up"};
    for (const auto& row : result.rows) {
        out.summary.add_row({fu(row.lag), fu(row.estimate.trials), fu(row.estimate.caught),
                             fd(row.estimate.probability), fd(row.estimate.formula),
                             fd(row.abs_diff), fd(tolerance),
                             fb(row.abs_diff <= tolerance)});
        for (std::uint64_t trial = 0; trial < row.estimate.trial_caught.size(); ++trial)
            out.detail.add_row(
                {fu(row.lag), fu(trial), row.estimate.trial_caught[trial] ? "1" : "0"});
    }
    out.pass = result.max_abs_diff <= tolerance;
    out.note = "private-fork catch-up probability vs (q/p)^lag at q=0.3; max abs "
               "difference " + fd(result.max_abs_diff);
    return out;
}

ExperimentOutput named_sybil(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 0, 106, 50, Rational(1, 5), 128, 0);
    ExperimentOutput out;
    out.name = "sybil";
    const SybilResult result = run_sybil(6, 10, o.alpha, o.period, 6, o.difficulty, o.seed);

    out.summary.columns = {"window", "miner_count", "sybil_miners", "sybil_blocks",
                           "sybil_stake", "sybil_rate_share", "majority"};
    for (const auto& row : result.report.rows)
        out.summary.add_row({fu(row.window_index), fu(row.miner_count),
                             fu(row.sybil_miners), fu(row.sybil_blocks),
                             fd(row.sybil_stake), fd(row.sybil_rate_share),
                             row.majority ? "1" : "0"});
    out.detail.columns = {"metric", "value"};
    out.detail.add_row({"identity_share_needed", fd(result.report.identity_share_needed)});
    out.detail.add_row({"single_identity_stake", fd(result.report.single_identity_stake)});
    out.detail.add_row({"majority_windows", fu(result.report.majority_windows)});

    const bool crossed = !result.report.rows.empty() && result.report.rows.back().majority;
    out.pass = crossed;
    out.note = "10 sybil identities vs 6 honest miners at blend weight " + fr(o.alpha) +
               ": set stake crosses 1/2 in " + fu(result.report.majority_windows) + " of " +
               fu(result.report.rows.size()) + " windows; one merged identity would hold " +
               fd(result.report.single_identity_stake);
    return out;
}

ExperimentOutput named_retarget_demo(const ExperimentConfig& config) {
    const Overrides o = resolve(config, 0, 107, 32, 0, 32, 1);
    ExperimentOutput out;
    out.name = "retarget-demo";
    const RetargetDemoResult result =
        run_retarget_demo(o.difficulty, o.retarget_interval, o.period, 24, 4, o.seed);

    out.summary.columns = {"window", "difficulty", "duration", "mean_interval"};
    for (const auto& row : result.rows)
        out.summary.add_row(
            {fu(row.window_index), fd(row.difficulty), fd(row.duration),
             fd(row.mean_interval)});
    out.detail.columns = {"metric", "value"};
    out.detail.add_row({"fixed_point_difficulty", fd(result.fixed_point)});
    out.detail.add_row({"final_difficulty", fd(result.final_difficulty)});

    out.pass = result.final_difficulty > result.fixed_point / 2 &&
               result.final_difficulty < result.fixed_point * 2;
    out.note = "difficulty controller from " + fr(o.difficulty) + " toward fixed point " +
               fd(result.fixed_point) + "; final difficulty " + fd(result.final_difficulty);
    return out;
}

}  // namespace

ExperimentOutput run_named_experiment(const std::string& name,
                                      const ExperimentConfig& config) {
    if (name == "lemma1") return named_lemma1(config);
    if (name == "theorem1") return named_theorem1(config);
    if (name == "lemma2") return named_lemma2(config);
    if (name == "theorem2") return named_theorem2(config);
    if (name == "lemma3-grid") return named_lemma3_grid(config);
    if (name == "catchup") return named_catchup(config);
    if (name == "sybil") return named_sybil(config);
    if (name == "retarget-demo") return named_retarget_demo(config);
    throw std::invalid_argument("unknown experiment: " + name);
}

std::vector<std::string> experiment_names() {
    return {"lemma1", "theorem1",    "lemma2", "theorem2",
            "lemma3-grid", "catchup", "sybil",  "retarget-demo"};
}

}  // namespace pom::sim
