#include "pom/sim/scenario.hpp"

#include "pom/codec.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace pom::sim {

namespace {

using json = nlohmann::ordered_json;
using codec::DecodeError;

std::uint64_t parse_u64(const json& value, const char* what) {
    if (!value.is_string()) throw DecodeError(std::string(what) + " must be a string");
    const std::string& text = value.get_ref<const std::string&>();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos ||
        (text.size() > 1 && text[0] == '0'))
        throw DecodeError(std::string(what) + " is not an unsigned integer: " + text);
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw DecodeError(std::string(what) + " is out of range: " + text);
    }
}

double parse_double(const json& value, const char* what) {
    if (!value.is_string()) throw DecodeError(std::string(what) + " must be a string");
    return codec::decode_double(value.get_ref<const std::string&>());
}

Rational parse_rational(const json& value, const char* what) {
    if (!value.is_string()) throw DecodeError(std::string(what) + " must be a string");
    return codec::decode_rational(value.get_ref<const std::string&>());
}

Account parse_account(const json& value, const char* what) {
    if (!value.is_string()) throw DecodeError(std::string(what) + " must be a string");
    try {
        return Account::from_hex(value.get_ref<const std::string&>());
    } catch (const std::exception& e) {
        throw DecodeError(std::string(what) + ": " + e.what());
    }
}

void check_keys(const json& obj, const char* what, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw DecodeError(std::string(what) + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : keys)
            if (key == k) known = true;
        if (!known) throw DecodeError(std::string(what) + " has unknown field: " + key);
    }
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::honest: return "honest";
        case Strategy::attacker_private_fork: return "attacker-private-fork";
        case Strategy::sybil_spawner: return "sybil-spawner";
    }
    throw std::logic_error("unreachable");
}

Strategy parse_strategy(const json& value) {
    if (!value.is_string()) throw DecodeError("strategy must be a string");
    const std::string& text = value.get_ref<const std::string&>();
    if (text == "honest") return Strategy::honest;
    if (text == "attacker-private-fork") return Strategy::attacker_private_fork;
    if (text == "sybil-spawner") return Strategy::sybil_spawner;
    throw DecodeError("unknown strategy: " + text);
}

}  // namespace

std::string encode_scenario(const Scenario& s) {
    json root = json::object();

    json params = json::object();
    params["mode"] = s.params.mode == ledger::Mode::pow ? "pow" : "pom";
    params["period"] = std::to_string(s.params.period);
    params["alpha"] = codec::encode_rational(s.params.discrimination);
    json difficulty = json::array();
    for (const auto& d : s.params.difficulty) difficulty.push_back(codec::encode_rational(d));
    params["difficulty"] = std::move(difficulty);
    root["params"] = std::move(params);

    json miners = json::array();
    for (const auto& m : s.miners) {
        json miner = json::object();
        miner["account"] = m.account.hex();
        miner["power"] = codec::encode_double(m.power);
        miner["strategy"] = strategy_name(m.strategy);
        miners.push_back(std::move(miner));
    }
    root["miners"] = std::move(miners);

    if (s.horizon_blocks > 0) root["horizon_blocks"] = std::to_string(s.horizon_blocks);
    if (s.horizon_time > 0) root["horizon_time"] = codec::encode_double(s.horizon_time);
    root["seed"] = std::to_string(s.seed);
    if (s.retarget) {
        json rule = json::object();
        rule["target_interval"] = codec::encode_rational(s.retarget->target_interval);
        root["retarget"] = std::move(rule);
    }
    if (s.attack) {
        json attack = json::object();
        attack["lag"] = std::to_string(s.attack->lag);
        if (s.attack->deficit_cutoff > 0)
            attack["deficit_cutoff"] = std::to_string(s.attack->deficit_cutoff);
        root["attack"] = std::move(attack);
    }
    if (!s.seed_window.empty()) {
        json window = json::array();
        for (const auto& account : s.seed_window) window.push_back(account.hex());
        root["seed_window"] = std::move(window);
    }
    if (!s.record_blocks) root["record_blocks"] = false;

    return root.dump(2) + "\n";
}

Scenario decode_scenario(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw DecodeError("scenario is not valid JSON");
    check_keys(root, "scenario",
               {"params", "miners", "horizon_blocks", "horizon_time", "seed", "retarget",
                "attack", "seed_window", "record_blocks"});
    if (!root.contains("params") || !root.contains("miners"))
        throw DecodeError("scenario needs params and miners");

    Scenario s;
    const json& params = root["params"];
    check_keys(params, "params", {"mode", "period", "alpha", "difficulty"});
    if (!params.contains("mode") || !params.contains("period") || !params.contains("alpha") ||
        !params.contains("difficulty"))
        throw DecodeError("params needs mode, period, alpha and difficulty");
    const std::string mode = params["mode"].is_string()
                                 ? params["mode"].get_ref<const std::string&>()
                                 : throw DecodeError("mode must be a string");
    if (mode == "pow")
        s.params.mode = ledger::Mode::pow;
    else if (mode == "pom")
        s.params.mode = ledger::Mode::pom;
    else
        throw DecodeError("unknown mode: " + mode);
    s.params.period = parse_u64(params["period"], "period");
    if (s.params.period == 0) throw DecodeError("period must be positive");
    s.params.discrimination = parse_rational(params["alpha"], "alpha");
    if (s.params.discrimination < 0 || s.params.discrimination > 1)
        throw DecodeError("alpha must lie in [0,1]");
    if (!params["difficulty"].is_array() || params["difficulty"].empty())
        throw DecodeError("difficulty must be a non-empty array");
    for (const auto& d : params["difficulty"]) {
        Rational value = parse_rational(d, "difficulty");
        if (value <= 0) throw DecodeError("difficulty values must be positive");
        s.params.difficulty.push_back(std::move(value));
    }

    if (!root["miners"].is_array() || root["miners"].empty())
        throw DecodeError("miners must be a non-empty array");
    std::set<Account> seen;
    for (const auto& entry : root["miners"]) {
        check_keys(entry, "miner", {"account", "power", "strategy"});
        if (!entry.contains("account")) throw DecodeError("miner needs an account");
        SimMiner m;
        m.account = parse_account(entry["account"], "miner account");
        if (entry.contains("power")) m.power = parse_double(entry["power"], "power");
        if (!(m.power > 0)) throw DecodeError("miner power must be positive");
        if (entry.contains("strategy")) m.strategy = parse_strategy(entry["strategy"]);
        if (!seen.insert(m.account).second)
            throw DecodeError("duplicate miner account: " + m.account.hex());
        s.miners.push_back(std::move(m));
    }

    if (root.contains("horizon_blocks"))
        s.horizon_blocks = parse_u64(root["horizon_blocks"], "horizon_blocks");
    if (root.contains("horizon_time")) {
        s.horizon_time = parse_double(root["horizon_time"], "horizon_time");
        if (s.horizon_time < 0) throw DecodeError("horizon_time must be nonnegative");
    }
    if (root.contains("seed")) s.seed = parse_u64(root["seed"], "seed");
    if (root.contains("retarget")) {
        check_keys(root["retarget"], "retarget", {"target_interval"});
        if (!root["retarget"].contains("target_interval"))
            throw DecodeError("retarget needs target_interval");
        RetargetRule rule;
        rule.target_interval = parse_rational(root["retarget"]["target_interval"],
                                              "target_interval");
        if (rule.target_interval <= 0) throw DecodeError("target_interval must be positive");
        s.retarget = rule;
    }
    if (root.contains("attack")) {
        check_keys(root["attack"], "attack", {"lag", "deficit_cutoff"});
        AttackConfig attack;
        if (root["attack"].contains("lag"))
            attack.lag = parse_u64(root["attack"]["lag"], "lag");
        if (attack.lag == 0) throw DecodeError("attack lag must be positive");
        if (root["attack"].contains("deficit_cutoff"))
            attack.deficit_cutoff = parse_u64(root["attack"]["deficit_cutoff"],
                                              "deficit_cutoff");
        s.attack = attack;
    }
    if (root.contains("seed_window")) {
        if (!root["seed_window"].is_array())
            throw DecodeError("seed_window must be an array");
        for (const auto& entry : root["seed_window"])
            s.seed_window.push_back(parse_account(entry, "seed_window account"));
        if (s.seed_window.size() != s.params.period)
            throw DecodeError("seed_window must hold exactly one account per block");
    }
    if (root.contains("record_blocks")) {
        if (!root["record_blocks"].is_boolean())
            throw DecodeError("record_blocks must be a boolean");
        s.record_blocks = root["record_blocks"].get<bool>();
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return decode_scenario(codec::read_file(path));
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    codec::write_file(path, encode_scenario(s));
}

}  // namespace pom::sim
