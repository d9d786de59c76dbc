#include "pom/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pom::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_double(const Rational& r) { return r.convert_to<double>(); }

void validate_scenario(const Scenario& s) {
    if (s.params.period == 0) throw std::invalid_argument("period must be positive");
    if (s.params.discrimination < 0 || s.params.discrimination > 1)
        throw std::invalid_argument("discrimination index must lie in [0,1]");
    if (s.params.difficulty.empty()) throw std::invalid_argument("difficulty vector is empty");
    for (const auto& d : s.params.difficulty)
        if (d <= 0) throw std::invalid_argument("difficulty values must be positive");
    if (s.retarget) {
        if (s.params.difficulty.size() != 1)
            throw std::invalid_argument(
                "retargeting and an explicit difficulty vector are exclusive; "
                "give exactly the starting difficulty");
        if (s.retarget->target_interval <= 0)
            throw std::invalid_argument("target interval must be positive");
    }
    if (s.miners.empty()) throw std::invalid_argument("scenario has no miners");
    bool honest = false;
    bool attacker = false;
    for (const auto& m : s.miners) {
        if (!(m.power > 0)) throw std::invalid_argument("miner power must be positive");
        if (m.strategy == Strategy::attacker_private_fork)
            attacker = true;
        else
            honest = true;
    }
    if (!honest) throw std::invalid_argument("scenario needs at least one honest miner");
    if (attacker != s.attack.has_value())
        throw std::invalid_argument(
            "attacker miners and an attack config must come together");
    if (s.attack && s.attack->lag == 0)
        throw std::invalid_argument("attack lag must be at least one block");
    if (s.attack && !s.seed_window.empty())
        throw std::invalid_argument("seed window and attack lag cannot be combined");
    if (!s.seed_window.empty() && s.seed_window.size() != s.params.period)
        throw std::invalid_argument("seed window must hold exactly one account per block");
    if (s.horizon_blocks == 0 && s.horizon_time <= 0 && !s.attack)
        throw std::invalid_argument("scenario needs a horizon");
    for (std::size_t i = 0; i < s.miners.size(); ++i)
        for (std::size_t j = i + 1; j < s.miners.size(); ++j)
            if (s.miners[i].account == s.miners[j].account)
                throw std::invalid_argument("duplicate miner account");
}

struct BranchMiner {
    const SimMiner* def = nullptr;
    double rate = 0;
    double stake = 1.0;  // stake behind the current rate, recorded per block
    double next_time = kInf;
};

struct Branch {
    bool attacker = false;
    std::vector<BranchMiner> miners;
    std::vector<Account> mined;  // full miner sequence, pre-seeded blocks included
    Rational difficulty_total = 0;
    Rational current_difficulty;
    std::uint64_t current_window = 0;
    std::optional<consensus::WindowStats> prev_stats;  // stats of current_window - 1
    double last_boundary_time = 0;
    std::vector<Rational> schedule;  // difficulty of every window started so far
};

class Run {
public:
    Run(const Scenario& s) : s_(s), rng_(derive_seed(s.seed, 0)) { setup(); }

    SimResult execute();

private:
    void setup();
    Rational lookup_difficulty(const Branch& b, std::uint64_t window) const;
    void refresh_rates(Branch& b, double now);
    void start_branch_window(Branch& b, std::uint64_t window, double now);

    const Scenario& s_;
    SplitMix64 rng_;
    std::vector<Branch> branches_;  // [0] = public, [1] = private fork (if any)
    SimResult result_;
};

Rational Run::lookup_difficulty(const Branch& b, std::uint64_t window) const {
    if (s_.retarget) {
        // Dynamic schedule: whatever this branch retargeted to so far.
        if (window < b.schedule.size()) return b.schedule[window];
        return b.schedule.empty() ? s_.params.difficulty[0] : b.schedule.back();
    }
    const auto& d = s_.params.difficulty;
    // Runs longer than the configured vector keep the last difficulty.
    return d[std::min<std::uint64_t>(window, d.size() - 1)];
}

void Run::refresh_rates(Branch& b, double now) {
    const bool priced_by_stats =
        s_.params.mode == ledger::Mode::pom && b.current_window >= 1;
    const double difficulty = to_double(b.current_difficulty);
    for (auto& m : b.miners) {
        double stake = 1.0;
        if (priced_by_stats)
            stake = to_double(consensus::mining_stake(m.def->account, *b.prev_stats,
                                                      s_.params.discrimination,
                                                      s_.params.period));
        m.stake = stake;
        m.rate = m.def->power * stake / difficulty;
        m.next_time = m.rate > 0 ? now + block_time_sample(m.rate, rng_) : kInf;
    }
}

void Run::start_branch_window(Branch& b, std::uint64_t window, double now) {
    b.current_window = window;
    if (s_.retarget && window < b.schedule.size()) {
        b.current_difficulty = b.schedule[window];
    } else {
        b.current_difficulty = lookup_difficulty(b, window);
        while (b.schedule.size() <= window) b.schedule.push_back(b.current_difficulty);
    }
    refresh_rates(b, now);
}

void Run::setup() {
    validate_scenario(s_);
    const std::uint64_t period = s_.params.period;

    Branch pub;
    pub.attacker = false;
    Branch priv;
    priv.attacker = true;
    for (const auto& m : s_.miners) {
        if (m.strategy == Strategy::attacker_private_fork)
            priv.miners.push_back({&m});
        else
            pub.miners.push_back({&m});
    }

    if (!s_.seed_window.empty()) {
        // The run starts at window 1, priced by the given window-0 content.
        pub.mined = s_.seed_window;
        pub.prev_stats = consensus::window_stats_from_miners(s_.seed_window, 0);
        const Rational d0 = lookup_difficulty(pub, 0);
        pub.schedule.push_back(d0);
        pub.difficulty_total = d0 * Rational(period);
        start_branch_window(pub, 1, 0.0);
    } else if (s_.attack) {
        // The private fork starts `lag` blocks behind: pre-seed the public
        // branch with that many blocks, attributed round-robin to its miners.
        for (std::uint64_t i = 0; i < s_.attack->lag; ++i) {
            pub.mined.push_back(pub.miners[i % pub.miners.size()].def->account);
            pub.difficulty_total += lookup_difficulty(pub, i / period);
        }
        const std::uint64_t w = pub.mined.size() / period;
        for (std::uint64_t i = 0; i < w; ++i) {
            pub.schedule.push_back(lookup_difficulty(pub, i));
        }
        if (w >= 1) {
            const std::span<const Account> last(pub.mined.data() + (w - 1) * period, period);
            pub.prev_stats = consensus::window_stats_from_miners(last, w - 1);
        }
        start_branch_window(pub, w, 0.0);
    } else {
        start_branch_window(pub, 0, 0.0);
    }

    branches_.push_back(std::move(pub));
    if (!priv.miners.empty()) {
        start_branch_window(priv, 0, 0.0);
        branches_.push_back(std::move(priv));
    }
}

SimResult Run::execute() {
    const std::uint64_t period = s_.params.period;
    const std::uint64_t cutoff =
        s_.attack ? (s_.attack->deficit_cutoff ? s_.attack->deficit_cutoff
                                               : s_.attack->lag + 60)
                  : 0;
    // With a single constant difficulty, branch difficulty totals are just
    // block counts times D; comparing lengths avoids per-block rational
    // arithmetic in the hot race loop.
    const bool uniform = !s_.retarget && s_.params.difficulty.size() == 1;
    if (s_.attack) result_.attack.emplace();
    double t = 0;

    while (true) {
        Branch* branch = nullptr;
        BranchMiner* miner = nullptr;
        double t_next = kInf;
        for (auto& b : branches_) {
            for (auto& m : b.miners) {
                if (m.next_time < t_next) {
                    t_next = m.next_time;
                    branch = &b;
                    miner = &m;
                }
            }
        }
        if (!branch) break;  // nobody can mine (every rate is zero)
        if (s_.horizon_time > 0 && t_next > s_.horizon_time) {
            t = s_.horizon_time;
            break;
        }
        t = t_next;

        const std::uint64_t index = branch->mined.size();
        if (s_.record_blocks) {
            result_.blocks.push_back({t, miner->def->account, index, branch->current_window,
                                      to_double(branch->current_difficulty), miner->stake,
                                      branch->attacker});
        }
        branch->mined.push_back(miner->def->account);
        if (!uniform) branch->difficulty_total += branch->current_difficulty;
        if (branch->attacker) {
            if (result_.attack) ++result_.attack->attacker_blocks;
        } else if (s_.attack && result_.attack) {
            ++result_.attack->honest_blocks;
        }

        if (branch->mined.size() % period == 0) {
            const std::uint64_t completed = branch->mined.size() / period - 1;
            const std::span<const Account> last(
                branch->mined.data() + completed * period, period);
            auto stats = consensus::window_stats_from_miners(last, completed);
            const double duration = t - branch->last_boundary_time;
            if (!branch->attacker && s_.record_blocks) {
                result_.windows.push_back({completed, stats.miner_count(), duration,
                                           to_double(branch->current_difficulty)});
            }
            branch->last_boundary_time = t;
            branch->prev_stats = std::move(stats);
            if (s_.retarget) {
                branch->schedule.push_back(retarget(duration, s_.retarget->target_interval,
                                                    period, branch->current_difficulty));
            }
            start_branch_window(*branch, completed + 1, t);
        } else {
            miner->next_time = t + block_time_sample(miner->rate, rng_);
        }

        if (s_.attack && branches_.size() == 2) {
            const Branch& pub = branches_[0];
            const Branch& priv = branches_[1];
            if (uniform) {
                const auto pub_len = pub.mined.size();
                const auto priv_len = priv.mined.size();
                if (priv_len >= pub_len || pub_len - priv_len > cutoff) {
                    result_.attack->caught_up = priv_len >= pub_len;
                    result_.attack->final_deficit =
                        (static_cast<double>(pub_len) - static_cast<double>(priv_len)) *
                        to_double(s_.params.difficulty[0]);
                    break;
                }
            } else {
                const Rational deficit = pub.difficulty_total - priv.difficulty_total;
                if (deficit <= 0) {
                    result_.attack->caught_up = true;
                    result_.attack->final_deficit = to_double(deficit);
                    break;
                }
                if (pub.mined.size() > priv.mined.size() &&
                    pub.mined.size() - priv.mined.size() > cutoff) {
                    result_.attack->final_deficit = to_double(deficit);
                    break;
                }
            }
        }
        if (s_.horizon_blocks > 0 && branches_[0].mined.size() >= s_.horizon_blocks) break;
    }

    if (s_.attack && !result_.attack->caught_up && branches_.size() == 2) {
        if (uniform) {
            result_.attack->final_deficit =
                (static_cast<double>(branches_[0].mined.size()) -
                 static_cast<double>(branches_[1].mined.size())) *
                to_double(s_.params.difficulty[0]);
        } else {
            result_.attack->final_deficit = to_double(branches_[0].difficulty_total -
                                                      branches_[1].difficulty_total);
        }
    }
    result_.final_time = t;
    result_.chain_length = branches_[0].mined.size();
    result_.difficulty_schedule = branches_[0].schedule;
    return result_;
}

}  // namespace

double block_time_sample(double rate, SplitMix64& rng) {
    if (!(rate > 0) || !std::isfinite(rate))
        throw std::invalid_argument("rate must be positive and finite");
    return -std::log(rng.next_open()) / rate;
}

SimResult run_scenario(const Scenario& s) { return Run(s).execute(); }

namespace {

// Shared groundwork for the timing-law harnesses: check the members are
// unit-power honest scenario miners, restrict the scenario to them (other
// miners' blocks cannot change when the set mines its own), and return the
// set's exact stake under the seed window.
Scenario restrict_to_members(const Scenario& s, const std::set<Account>& members,
                             Rational& stake_out) {
    if (members.empty()) throw std::invalid_argument("the measured set is empty");
    if (s.seed_window.empty())
        throw std::invalid_argument("timing harnesses need an explicit seed window");
    Scenario r = s;
    r.miners.clear();
    for (const auto& account : members) {
        auto it = std::find_if(s.miners.begin(), s.miners.end(),
                               [&](const SimMiner& m) { return m.account == account; });
        if (it == s.miners.end())
            throw std::invalid_argument("set member is not a scenario miner");
        if (it->power != 1.0)
            throw std::invalid_argument("timing laws assume unit-power miners");
        if (it->strategy == Strategy::attacker_private_fork)
            throw std::invalid_argument("set members must mine the public chain");
        r.miners.push_back(*it);
    }
    r.attack.reset();
    r.record_blocks = false;

    const auto stats = consensus::window_stats_from_miners(s.seed_window, 0);
    stake_out = consensus::mining_stake(members, stats, s.params.discrimination,
                                        s.params.period);
    return r;
}

Rational pricing_difficulty(const Scenario& s) {
    const auto& d = s.params.difficulty;
    return d[std::min<std::uint64_t>(1, d.size() - 1)];
}

}  // namespace

Lemma2Stat verify_lemma2(const Scenario& s, const std::set<Account>& members,
                         std::uint64_t trials, std::vector<double>* samples) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    Lemma2Stat stat;
    Scenario base = restrict_to_members(s, members, stat.set_stake);
    if (stat.set_stake <= 0)
        throw std::invalid_argument("the set's stake is zero; it can never mine");
    base.horizon_blocks = s.params.period + 1;  // first block on top of the seed window
    base.horizon_time = 0;

    double sum = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        base.seed = derive_seed(s.seed, trial);
        const double time = run_scenario(base).final_time;
        if (samples) samples->push_back(time);
        sum += time;
    }
    stat.trials = trials;
    stat.mean_time = sum / static_cast<double>(trials);
    stat.predicted = (pricing_difficulty(s) / stat.set_stake).convert_to<double>();
    stat.relative_error = std::abs(stat.mean_time - stat.predicted) / stat.predicted;
    return stat;
}

CompletionStat measure_completion(const Scenario& s, std::uint64_t blocks,
                                  std::vector<double>* block_times) {
    if (blocks == 0) throw std::invalid_argument("blocks must be positive");
    if (blocks > s.params.period)
        throw std::invalid_argument("completion must fit within one window");
    std::set<Account> members;
    for (const auto& m : s.miners) members.insert(m.account);

    CompletionStat stat;
    Scenario base = restrict_to_members(s, members, stat.set_stake);
    if (stat.set_stake <= 0)
        throw std::invalid_argument("the set's stake is zero; it can never mine");
    base.horizon_blocks = s.params.period + blocks;
    base.horizon_time = 0;
    base.seed = derive_seed(s.seed, 0);
    base.record_blocks = block_times != nullptr;

    stat.blocks = blocks;
    const SimResult result = run_scenario(base);
    if (block_times)
        for (const auto& rec : result.blocks)
            if (rec.index >= s.params.period) block_times->push_back(rec.time);
    stat.total_time = result.final_time;
    stat.predicted =
        (Rational(blocks) * pricing_difficulty(s) / stat.set_stake).convert_to<double>();
    stat.relative_error = std::abs(stat.total_time - stat.predicted) / stat.predicted;
    return stat;
}

CatchupEstimate attack_catchup(const Scenario& s, std::uint64_t lag, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (lag == 0) throw std::invalid_argument("lag must be at least one block");

    Scenario base = s;
    base.record_blocks = false;
    if (!base.attack) base.attack.emplace();
    base.attack->lag = lag;

    double attacker_power = 0;
    double total_power = 0;
    for (const auto& m : base.miners) {
        total_power += m.power;
        if (m.strategy == Strategy::attacker_private_fork) attacker_power += m.power;
    }
    if (attacker_power <= 0)
        throw std::invalid_argument("catch-up needs an attacker miner");
    const double q = attacker_power / total_power;

    CatchupEstimate est;
    est.trials = trials;
    est.attacker_share = q;
    // Classical gambler's-ruin bound; certain once the attacker matches the
    // honest rate (then the sim only approaches 1 as the cutoff grows).
    est.formula =
        q >= 0.5 ? 1.0 : std::pow(q / (1.0 - q), static_cast<double>(lag));
    est.trial_caught.reserve(trials);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        base.seed = derive_seed(s.seed, trial);
        const SimResult result = run_scenario(base);
        const bool caught = result.attack && result.attack->caught_up;
        est.trial_caught.push_back(caught ? 1 : 0);
        if (caught) ++est.caught;
    }
    est.probability = static_cast<double>(est.caught) / static_cast<double>(trials);
    return est;
}

SybilReport sybil_experiment(const Scenario& s) {
    std::set<Account> sybils;
    double sybil_power = 0;
    double honest_power = 0;
    std::uint64_t honest_count = 0;
    for (const auto& m : s.miners) {
        if (m.strategy == Strategy::sybil_spawner) {
            sybils.insert(m.account);
            sybil_power += m.power;
        } else if (m.strategy == Strategy::honest) {
            honest_power += m.power;
            ++honest_count;
        } else {
            throw std::invalid_argument("sybil experiment runs without a private fork");
        }
    }
    if (sybils.empty()) throw std::invalid_argument("no sybil-spawner miners configured");
    if (s.horizon_blocks < 2 * s.params.period)
        throw std::invalid_argument("horizon too short to complete two windows");

    Scenario run = s;
    run.record_blocks = true;
    const SimResult result = run_scenario(run);

    std::vector<Account> sequence;
    sequence.reserve(result.chain_length);
    for (const auto& rec : result.blocks)
        if (!rec.attacker_branch) sequence.push_back(rec.miner);

    SybilReport report;
    const Rational a = s.params.discrimination;
    report.identity_share_needed =
        a < 1 ? (Rational(1) / (2 * (Rational(1) - a))).convert_to<double>()
              : std::numeric_limits<double>::infinity();
    // Counterfactual: the same hardware behind a single identity. Expected
    // block share is its power share; expected miner count is the honest
    // miners plus one.
    report.single_identity_stake =
        ((Rational(1) - a) / Rational(honest_count + 1)).convert_to<double>() +
        (a.convert_to<double>() * sybil_power / (sybil_power + honest_power));

    const std::uint64_t period = s.params.period;
    const std::uint64_t windows = sequence.size() / period;
    for (std::uint64_t w = 0; w < windows; ++w) {
        const std::span<const Account> slice(sequence.data() + w * period, period);
        const auto stats = consensus::window_stats_from_miners(slice, w);
        SybilWindowRow row;
        row.window_index = w;
        row.miner_count = stats.miner_count();
        for (const auto& account : sybils) {
            const std::uint64_t mined = stats.blocks_mined_by(account);
            if (mined > 0) ++row.sybil_miners;
            row.sybil_blocks += mined;
        }
        const Rational stake =
            consensus::mining_stake(sybils, stats, s.params.discrimination, period);
        row.sybil_stake = stake.convert_to<double>();
        // Next-window production share: every account's rate is
        // power * stake / D, so the set's share is its stake-weighted power
        // over everyone's.
        Rational set_weight = 0;
        Rational total_weight = 0;
        for (const auto& m : s.miners) {
            const Rational weight =
                Rational(m.power) * consensus::mining_stake(m.account, stats,
                                                            s.params.discrimination, period);
            total_weight += weight;
            if (sybils.count(m.account)) set_weight += weight;
        }
        row.sybil_rate_share =
            total_weight > 0 ? (set_weight / total_weight).convert_to<double>() : 0.0;
        row.majority = stake > Rational(1, 2);
        if (row.majority) ++report.majority_windows;
        report.rows.push_back(row);
    }
    return report;
}

Rational retarget(double observed_duration, const Rational& target_interval,
                  std::uint64_t period, const Rational& current_difficulty) {
    if (!(observed_duration > 0) || !std::isfinite(observed_duration))
        throw std::invalid_argument("observed duration must be positive and finite");
    if (target_interval <= 0) throw std::invalid_argument("target interval must be positive");
    if (period == 0) throw std::invalid_argument("period must be positive");
    if (current_difficulty <= 0)
        throw std::invalid_argument("current difficulty must be positive");
    const Rational next = current_difficulty * target_interval * Rational(period) /
                          Rational(observed_duration);
    const Rational lo = current_difficulty / 4;
    const Rational hi = current_difficulty * 4;
    return std::clamp(next, lo, hi);
}

}  // namespace pom::sim
