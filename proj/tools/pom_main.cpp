// pom: mine, validate and inspect small proof-of-mining chains, and run the
// built-in stochastic experiments. Exit codes: 0 success/valid, 1 domain
// failure (invalid chain, unsolvable job, experiment out of tolerance),
// 2 usage or parse error.

#include "pom/codec.hpp"
#include "pom/consensus.hpp"
#include "pom/crypto.hpp"
#include "pom/ledger.hpp"
#include "pom/miner.hpp"
#include "pom/sim/experiments.hpp"
#include "pom/sim/scenario.hpp"
#include "pom/sim/simulator.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using pom::crypto::HashProfile;
using pom::ledger::Rational;
using pom::ledger::Account;
using pom::ledger::Chain;
using pom::ledger::Mode;

constexpr int kExitValid = 0;
constexpr int kExitDomainFailure = 1;
constexpr int kExitUsage = 2;

std::vector<Rational> parse_difficulty_list(const std::string& text) {
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? comma : comma - start);
        out.push_back(pom::codec::decode_rational(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

unsigned resolve_bits(const std::string& profile, unsigned bits) {
    if (profile == "production") return 256;
    if (profile == "test") return bits;
    throw pom::codec::DecodeError("unknown profile: " + profile);
}

// Common knobs; each subcommand registers the subset it honors.
struct Options {
    std::string chain_file;
    std::string key_file;
    std::string tx_file;
    std::string out;
    std::string scenario_file;
    std::string profile = "test";
    unsigned bits = 16;
    std::string mode = "pow";
    std::uint64_t period = 1;
    std::string alpha = "0";
    std::string difficulty = "1";
    std::string retarget_interval;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::uint64_t trials = 0;
    bool trials_given = false;
    bool difficulty_given = false;
    bool alpha_given = false;
    bool period_given = false;
    std::uint64_t nonce_start = 0;
    std::string experiment;
};

int cmd_init(const Options& opt) {
    pom::codec::ChainDocument doc;
    doc.bits = resolve_bits(opt.profile, opt.bits);
    doc.chain.params.mode = opt.mode == "pom" ? Mode::pom : Mode::pow;
    doc.chain.params.period = opt.period;
    doc.chain.params.discrimination = pom::codec::decode_rational(opt.alpha);
    doc.chain.params.difficulty = parse_difficulty_list(opt.difficulty);
    if (opt.mode != "pow" && opt.mode != "pom")
        throw pom::codec::DecodeError("unknown mode: " + opt.mode);
    pom::codec::save_chain_document(doc, opt.out);
    std::cout << "wrote empty " << opt.mode << " chain (period " << opt.period
              << ", " << doc.bits << "-bit hashes) to " << opt.out << "\n";
    return kExitValid;
}

int cmd_keygen(const Options& opt) {
    pom::crypto::KeyPair kp;
    if (opt.seed_given) {
        // Deterministic test keys: stretch the numeric seed to 32 bytes.
        std::vector<std::uint8_t> tag(8);
        for (int i = 0; i < 8; ++i)
            tag[i] = static_cast<std::uint8_t>(opt.seed >> (56 - 8 * i));
        const auto digest = pom::crypto::sha256(tag);
        kp = pom::crypto::keypair_from_seed(digest);
    } else {
        kp = pom::crypto::generate_keypair();
    }
    pom::codec::save_keypair(kp, opt.out);
    std::cout << "account " << pom::crypto::to_hex(kp.public_key) << "\n";
    return kExitValid;
}

int cmd_validate(const Options& opt) {
    const auto doc = pom::codec::load_chain_document(opt.chain_file);
    const HashProfile profile(doc.bits);
    const auto report = pom::consensus::validate_chain(doc.chain, profile);
    if (report.ok()) {
        std::cout << "valid: " << doc.chain.blocks.size() << " blocks\n";
        return kExitValid;
    }
    std::cout << report.to_string();
    return kExitDomainFailure;
}

int cmd_mine(const Options& opt) {
    auto doc = pom::codec::load_chain_document(opt.chain_file);
    const HashProfile profile(doc.bits);
    const auto kp = pom::codec::load_keypair(opt.key_file);

    pom::miner::MiningJob job;
    job.parent_chain = doc.chain;
    job.miner = Account(kp.public_key);
    if (!opt.tx_file.empty())
        job.txs = pom::codec::load_signed_transactions(opt.tx_file);
    job.target = pom::consensus::next_block_threshold(doc.chain, job.miner, profile);
    job.nonce_start = opt.nonce_start;

    if (job.target <= 0) {
        std::cerr << "mining target is zero: this miner has no stake in the "
                     "pricing window\n";
        return kExitDomainFailure;
    }
    pom::miner::MineResult result;
    try {
        result = pom::miner::mine(job, profile);
    } catch (const pom::miner::JobError& e) {
        std::cerr << "job error: " << e.what() << "\n";
        return kExitDomainFailure;
    }
    if (!result.block) {
        std::cerr << "nonce range exhausted after " << result.attempts
                  << " attempts\n";
        return kExitDomainFailure;
    }

    doc.chain.blocks.push_back(*result.block);
    const std::string out = opt.out.empty() ? opt.chain_file : opt.out;
    pom::codec::save_chain_document(doc, out);
    std::cout << "mined block " << doc.chain.blocks.size() - 1 << " by "
              << job.miner.hex() << " nonce " << result.block->nonce << " after "
              << result.attempts << " attempts -> " << out << "\n";
    return kExitValid;
}

int cmd_show(const Options& opt) {
    const auto doc = pom::codec::load_chain_document(opt.chain_file);
    const HashProfile profile(doc.bits);
    const auto& p = doc.chain.params;
    std::cout << "mode " << (p.mode == Mode::pom ? "pom" : "pow") << ", period "
              << p.period << ", discrimination "
              << pom::codec::encode_rational(p.discrimination) << ", " << doc.bits
              << "-bit hashes, " << doc.chain.blocks.size() << " blocks\n";
    std::cout << "difficulty:";
    for (const auto& d : p.difficulty)
        std::cout << " " << pom::codec::encode_rational(d);
    std::cout << "\n";
    for (std::size_t i = 0; i < doc.chain.blocks.size(); ++i) {
        const auto& b = doc.chain.blocks[i];
        std::cout << i << " window " << i / p.period << " miner " << b.miner.hex()
                  << " txs " << b.txs.size() << " nonce " << b.nonce << " hash "
                  << pom::ledger::hash_hex(pom::ledger::block_hash(b, profile))
                  << "\n";
    }
    return kExitValid;
}

int cmd_simulate(const Options& opt) {
    auto scenario = pom::sim::load_scenario(opt.scenario_file);
    if (opt.seed_given) scenario.seed = opt.seed;
    const auto result = pom::sim::run_scenario(scenario);

    pom::sim::Table table;
    table.columns = {"time", "miner", "index", "window", "difficulty", "stake", "branch"};
    for (const auto& b : result.blocks)
        table.add_row({pom::codec::encode_double(b.time), b.miner.hex(),
                       std::to_string(b.index), std::to_string(b.window),
                       pom::codec::encode_double(b.difficulty),
                       pom::codec::encode_double(b.stake),
                       b.attacker_branch ? "attacker" : "public"});
    if (opt.out.empty()) {
        std::cout << table.csv();
    } else {
        pom::codec::write_file(opt.out, table.csv());
    }
    std::cerr << "final time " << pom::codec::encode_double(result.final_time)
              << ", chain length " << result.chain_length << "\n";
    return kExitValid;
}

int cmd_experiment(const Options& opt) {
    pom::sim::ExperimentConfig config;
    if (opt.trials_given) config.trials = opt.trials;
    if (opt.seed_given) config.seed = opt.seed;
    if (opt.difficulty_given)
        config.difficulty = pom::codec::decode_rational(opt.difficulty);
    if (opt.alpha_given) config.alpha = pom::codec::decode_rational(opt.alpha);
    if (opt.period_given) config.period = opt.period;
    if (!opt.retarget_interval.empty())
        config.retarget_interval = pom::codec::decode_rational(opt.retarget_interval);

    pom::sim::ExperimentOutput output;
    try {
        output = pom::sim::run_named_experiment(opt.experiment, config);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (!opt.out.empty()) {
        pom::codec::write_file(opt.out + "-summary.csv", output.summary.csv());
        if (!output.detail.empty())
            pom::codec::write_file(opt.out + "-detail.csv", output.detail.csv());
    }
    std::cout << output.summary.csv();
    std::cout << output.name << ": " << output.note << "\n";
    std::cout << (output.pass ? "PASS" : "FAIL") << "\n";
    return output.pass ? kExitValid : kExitDomainFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proof-of-mining chain tool"};
    app.require_subcommand(1);
    Options opt;

    auto add_profile_flags = [&](CLI::App* cmd) {
        cmd->add_option("--profile", opt.profile, "hash profile: test or production");
        cmd->add_option("--bits", opt.bits, "test profile hash width in bits")
            ->check(CLI::Range(16u, 256u));
    };

    CLI::App* init = app.add_subcommand("init", "write an empty chain file");
    add_profile_flags(init);
    init->add_option("--mode", opt.mode, "pow or pom");
    init->add_option("--period", opt.period, "window length in blocks");
    init->add_option("--alpha", opt.alpha, "discrimination index in [0,1]");
    init->add_option("--difficulty", opt.difficulty, "comma-separated window difficulties");
    init->add_option("--out", opt.out, "output chain file")->required();

    CLI::App* keygen = app.add_subcommand("keygen", "write a key pair file");
    keygen->add_option("--seed", opt.seed, "derive the key deterministically")
        ->each([&](const std::string&) { opt.seed_given = true; });
    keygen->add_option("--out", opt.out, "output key file")->required();

    CLI::App* validate = app.add_subcommand("validate", "check a chain file");
    validate->add_option("chain", opt.chain_file, "chain file")->required();

    CLI::App* mine = app.add_subcommand("mine", "append one mined block");
    mine->add_option("chain", opt.chain_file, "chain file to extend")->required();
    mine->add_option("--key", opt.key_file, "miner key file")->required();
    mine->add_option("--tx", opt.tx_file, "signed transactions file");
    mine->add_option("--out", opt.out, "output chain file (default: in place)");
    mine->add_option("--nonce-start", opt.nonce_start, "first nonce to try");

    CLI::App* show = app.add_subcommand("show", "print a chain file");
    show->add_option("chain", opt.chain_file, "chain file")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario file");
    simulate->add_option("--scenario", opt.scenario_file, "scenario file")->required();
    simulate->add_option("--seed", opt.seed, "override the scenario seed")
        ->each([&](const std::string&) { opt.seed_given = true; });
    simulate->add_option("--out", opt.out, "block CSV path (default: stdout)");

    CLI::App* experiment = app.add_subcommand("experiment", "run a named experiment");
    experiment->add_option("name", opt.experiment, "experiment name")->required();
    experiment->add_option("--trials", opt.trials, "trial count override")
        ->each([&](const std::string&) { opt.trials_given = true; });
    experiment->add_option("--seed", opt.seed, "seed override")
        ->each([&](const std::string&) { opt.seed_given = true; });
    experiment->add_option("--difficulty", opt.difficulty, "difficulty override")
        ->each([&](const std::string&) { opt.difficulty_given = true; });
    experiment->add_option("--alpha", opt.alpha, "discrimination index override")
        ->each([&](const std::string&) { opt.alpha_given = true; });
    experiment->add_option("--period", opt.period, "window length override")
        ->each([&](const std::string&) { opt.period_given = true; });
    experiment->add_option("--retarget-interval", opt.retarget_interval,
                           "target block interval override");
    experiment->add_option("--out", opt.out, "CSV path prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (init->parsed()) return cmd_init(opt);
        if (keygen->parsed()) return cmd_keygen(opt);
        if (validate->parsed()) return cmd_validate(opt);
        if (mine->parsed()) return cmd_mine(opt);
        if (show->parsed()) return cmd_show(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (experiment->parsed()) return cmd_experiment(opt);
    } catch (const pom::codec::DecodeError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
