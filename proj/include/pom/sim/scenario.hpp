#pragma once

#include "pom/ledger.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pom::sim {

using ledger::Account;
using ledger::Rational;

enum class Strategy {
    honest,                 // mines on the public chain, extends the fork-choice winner
    attacker_private_fork,  // mines a private fork from genesis, lagging behind
    sybil_spawner,          // honest behavior; marks an identity of the sybil set
};

struct SimMiner {
    Account account;
    double power = 1.0;  // hash attempts per unit time
    Strategy strategy = Strategy::honest;
};

/// Optional difficulty controller. When present, the params difficulty
/// vector must hold exactly one entry (the starting difficulty); each
/// completed window then retargets for the next one.
struct RetargetRule {
    Rational target_interval = 1;  // desired mean time per block
};

struct AttackConfig {
    std::uint64_t lag = 1;             // blocks the private fork starts behind
    std::uint64_t deficit_cutoff = 0;  // stop once behind by this many blocks; 0 = lag+60
};

struct Scenario {
    ledger::ChainParams params;
    std::vector<SimMiner> miners;
    std::uint64_t horizon_blocks = 0;  // stop once the public chain is this long; 0 = none
    double horizon_time = 0.0;         // stop at this simulated time; 0 = none
    std::uint64_t seed = 0;
    std::optional<RetargetRule> retarget;
    std::optional<AttackConfig> attack;
    // Optional explicit composition of the window preceding the run (one
    // account per block, exactly `period` entries). The run then starts at
    // window 1 with stakes priced from this window instead of bootstrapping
    // through a simulated window 0. Used by the timing-law harnesses, which
    // need exact stake values.
    std::vector<Account> seed_window;
    bool record_blocks = true;
};

std::string encode_scenario(const Scenario& s);
Scenario decode_scenario(const std::string& text);  // throws codec::DecodeError
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

}  // namespace pom::sim
