#include "pom/codec.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pom::codec {

using json = nlohmann::ordered_json;
using ledger::Rational;

namespace {

using Int = boost::multiprecision::cpp_int;

bool parse_uint_digits(std::string_view s, Int& out) {
    if (s.empty() || (s.size() > 1 && s.front() == '0')) {
        return false;
    }
    Int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
        v *= 10;
        v += c - '0';
    }
    out = v;
    return true;
}

std::uint64_t decode_u64(const std::string& s, const char* what) {
    Int v;
    if (!parse_uint_digits(s, v) || v > std::numeric_limits<std::uint64_t>::max()) {
        throw DecodeError(std::string(what) + ": bad unsigned integer '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
}

std::int64_t decode_i64(const std::string& s, const char* what) {
    bool negative = !s.empty() && s.front() == '-';
    Int v;
    if (!parse_uint_digits(negative ? std::string_view(s).substr(1) : std::string_view(s), v)) {
        throw DecodeError(std::string(what) + ": bad integer '" + s + "'");
    }
    if (negative) {
        v = -v;
    }
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min() || (negative && v == 0)) {
        throw DecodeError(std::string(what) + ": integer out of range '" + s + "'");
    }
    return static_cast<std::int64_t>(v);
}

const json& field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw DecodeError(std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string str_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_string()) {
        throw DecodeError(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

ledger::Account decode_account(const std::string& hex, const char* what) {
    std::vector<std::uint8_t> bytes;
    if (!crypto::from_hex(hex, bytes) || bytes.empty()) {
        throw DecodeError(std::string(what) + ": bad account hex '" + hex + "'");
    }
    return ledger::Account{std::move(bytes)};
}

ledger::SignedTransaction decode_signed_tx(const json& j) {
    if (!j.is_object() || j.size() != 2) {
        throw DecodeError("signed transaction must have exactly entries and sigs");
    }
    const json& entries = field(j, "entries");
    const json& sigs = field(j, "sigs");
    if (!entries.is_object() || !sigs.is_object()) {
        throw DecodeError("entries and sigs must be objects");
    }
    ledger::SignedTransaction stx;
    for (const auto& [key, value] : entries.items()) {
        if (!value.is_string()) {
            throw DecodeError("transaction amount must be a string");
        }
        ledger::Account account = decode_account(key, "transaction entry");
        std::int64_t amount = decode_i64(value.get<std::string>(), "transaction amount");
        if (!stx.tx.entries.emplace(std::move(account), amount).second) {
            throw DecodeError("duplicate transaction entry");
        }
    }
    for (const auto& [key, value] : sigs.items()) {
        if (!value.is_string()) {
            throw DecodeError("signature must be a string");
        }
        ledger::Account account = decode_account(key, "signature key");
        std::vector<std::uint8_t> sig;
        if (!crypto::from_hex(value.get<std::string>(), sig)) {
            throw DecodeError("bad signature hex");
        }
        if (!stx.signatures.emplace(std::move(account), ledger::Signature{std::move(sig)}).second) {
            throw DecodeError("duplicate signature entry");
        }
    }
    return stx;
}

ledger::Block decode_block(const json& j) {
    if (!j.is_object() || j.size() != 4) {
        throw DecodeError("block must have exactly prev_hash, miner, txs, nonce");
    }
    ledger::Block block;
    if (!ledger::hash_from_hex(str_field(j, "prev_hash"), block.prev_hash)) {
        throw DecodeError("bad prev_hash hex");
    }
    block.miner = decode_account(str_field(j, "miner"), "miner");
    const json& txs = field(j, "txs");
    if (!txs.is_array()) {
        throw DecodeError("txs must be an array");
    }
    for (const json& t : txs) {
        block.txs.push_back(decode_signed_tx(t));
    }
    block.nonce = decode_u64(str_field(j, "nonce"), "nonce");
    return block;
}

std::string encode_params(const ledger::ChainParams& params, unsigned bits) {
    std::ostringstream os;
    os << "{\"mode\":\"" << (params.mode == ledger::Mode::pow ? "pow" : "pom") << "\""
       << ",\"bits\":\"" << bits << "\""
       << ",\"period\":\"" << params.period << "\""
       << ",\"alpha\":\"" << encode_rational(params.discrimination) << "\""
       << ",\"difficulty\":[";
    for (std::size_t i = 0; i < params.difficulty.size(); ++i) {
        if (i > 0) os << ",";
        os << "\"" << encode_rational(params.difficulty[i]) << "\"";
    }
    os << "]}";
    return os.str();
}

std::pair<ledger::ChainParams, unsigned> decode_params(const json& j) {
    if (!j.is_object() || j.size() != 5) {
        throw DecodeError("params must have exactly mode, bits, period, alpha, difficulty");
    }
    ledger::ChainParams params;
    const std::string mode = str_field(j, "mode");
    if (mode == "pow") {
        params.mode = ledger::Mode::pow;
    } else if (mode == "pom") {
        params.mode = ledger::Mode::pom;
    } else {
        throw DecodeError("mode must be pow or pom");
    }
    const std::uint64_t bits = decode_u64(str_field(j, "bits"), "bits");
    if (bits < crypto::HashProfile::kMinBits || bits > crypto::HashProfile::kMaxBits) {
        throw DecodeError("bits must be in [16, 256]");
    }
    params.period = decode_u64(str_field(j, "period"), "period");
    if (params.period < 1) {
        throw DecodeError("period must be at least 1");
    }
    params.discrimination = decode_rational(str_field(j, "alpha"));
    if (params.discrimination < 0 || params.discrimination > 1) {
        throw DecodeError("alpha must be in [0, 1]");
    }
    const json& difficulty = field(j, "difficulty");
    if (!difficulty.is_array() || difficulty.empty()) {
        throw DecodeError("difficulty must be a nonempty array");
    }
    for (const json& d : difficulty) {
        if (!d.is_string()) {
            throw DecodeError("difficulty entries must be strings");
        }
        Rational value = decode_rational(d.get<std::string>());
        if (value <= 0) {
            throw DecodeError("difficulty entries must be positive");
        }
        params.difficulty.push_back(std::move(value));
    }
    return {params, static_cast<unsigned>(bits)};
}

std::string encode_body(const ChainDocument& doc) {
    std::ostringstream os;
    os << "{\"params\":" << encode_params(doc.chain.params, doc.bits) << ",\"blocks\":[";
    for (std::size_t i = 0; i < doc.chain.blocks.size(); ++i) {
        if (i > 0) os << ",";
        const auto bytes = ledger::canonical_bytes(doc.chain.blocks[i]);
        os << std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }
    os << "]}";
    return os.str();
}

std::string body_digest_hex(const std::string& body) {
    const auto digest = crypto::sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
    return crypto::to_hex(digest);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("JSON parse error: ") + e.what());
    }
}

}  // namespace

std::string encode_rational(const Rational& value) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(value);
    if (boost::multiprecision::denominator(value) != 1) {
        os << "/" << boost::multiprecision::denominator(value);
    }
    return os.str();
}

Rational decode_rational(const std::string& text) {
    const bool negative = !text.empty() && text.front() == '-';
    const std::string_view magnitude =
        negative ? std::string_view(text).substr(1) : std::string_view(text);

    Rational value;
    if (auto slash = magnitude.find('/'); slash != std::string_view::npos) {
        Int num, den;
        if (!parse_uint_digits(magnitude.substr(0, slash), num) ||
            !parse_uint_digits(magnitude.substr(slash + 1), den) || den == 0) {
            throw DecodeError("bad rational '" + text + "'");
        }
        value = Rational(num, den);
    } else if (auto dot = magnitude.find('.'); dot != std::string_view::npos) {
        Int whole, frac;
        const std::string_view frac_digits = magnitude.substr(dot + 1);
        if (!parse_uint_digits(magnitude.substr(0, dot), whole) || frac_digits.empty() ||
            frac_digits.size() > 100) {
            throw DecodeError("bad decimal '" + text + "'");
        }
        Int scale = 1;
        frac = 0;
        for (char c : frac_digits) {
            if (c < '0' || c > '9') {
                throw DecodeError("bad decimal '" + text + "'");
            }
            frac = frac * 10 + (c - '0');
            scale *= 10;
        }
        value = Rational(whole * scale + frac, scale);
    } else {
        Int num;
        if (!parse_uint_digits(magnitude, num)) {
            throw DecodeError("bad rational '" + text + "'");
        }
        value = Rational(num);
    }
    return negative ? Rational(-value) : value;
}

std::string encode_chain_document(const ChainDocument& doc) {
    const std::string body = encode_body(doc);
    return "{\"digest\":\"" + body_digest_hex(body) + "\",\"body\":" + body + "}";
}

ChainDocument decode_chain_document(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object() || root.size() != 2) {
        throw DecodeError("chain file must have exactly digest and body");
    }
    const std::string digest = str_field(root, "digest");
    const json& body = field(root, "body");
    if (!body.is_object() || body.size() != 2) {
        throw DecodeError("chain body must have exactly params and blocks");
    }
    if (digest != body_digest_hex(body.dump())) {
        throw DecodeError("chain file digest mismatch (file corrupted)");
    }

    ChainDocument doc;
    auto [params, bits] = decode_params(field(body, "params"));
    doc.chain.params = std::move(params);
    doc.bits = bits;
    const json& blocks = field(body, "blocks");
    if (!blocks.is_array()) {
        throw DecodeError("blocks must be an array");
    }
    for (const json& b : blocks) {
        doc.chain.blocks.push_back(decode_block(b));
    }
    return doc;
}

void save_chain_document(const ChainDocument& doc, const std::filesystem::path& path) {
    write_file(path, encode_chain_document(doc));
}

ChainDocument load_chain_document(const std::filesystem::path& path) {
    return decode_chain_document(read_file(path));
}

std::string encode_signed_transactions(const std::vector<ledger::SignedTransaction>& txs) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < txs.size(); ++i) {
        if (i > 0) os << ",";
        const auto bytes = ledger::canonical_bytes(txs[i]);
        os << std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }
    os << "]";
    return os.str();
}

std::vector<ledger::SignedTransaction> decode_signed_transactions(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_array()) {
        throw DecodeError("transaction file must be an array");
    }
    std::vector<ledger::SignedTransaction> txs;
    for (const json& t : root) {
        txs.push_back(decode_signed_tx(t));
    }
    return txs;
}

std::vector<ledger::SignedTransaction> load_signed_transactions(
    const std::filesystem::path& path) {
    return decode_signed_transactions(read_file(path));
}

std::string encode_keypair(const crypto::KeyPair& kp) {
    return "{\"public\":\"" + crypto::to_hex(kp.public_key) + "\",\"secret\":\"" +
           crypto::to_hex(kp.secret_key) + "\"}";
}

crypto::KeyPair decode_keypair(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) {
        throw DecodeError("key file must be an object");
    }
    crypto::KeyPair kp;
    if (!crypto::from_hex(str_field(root, "public"), kp.public_key) ||
        !crypto::from_hex(str_field(root, "secret"), kp.secret_key)) {
        throw DecodeError("bad key hex");
    }
    if (kp.public_key.size() != 32 || kp.secret_key.size() != 64) {
        throw DecodeError("key sizes must be 32/64 bytes");
    }
    return kp;
}

void save_keypair(const crypto::KeyPair& kp, const std::filesystem::path& path) {
    write_file(path, encode_keypair(kp));
}

crypto::KeyPair load_keypair(const std::filesystem::path& path) {
    return decode_keypair(read_file(path));
}

std::string encode_double(double value) {
    std::array<char, 64> buf;
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw DecodeError("double does not format");
    }
    return std::string(buf.data(), end);
}

double decode_double(const std::string& text) {
    double value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw DecodeError("malformed number: " + text);
    }
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DecodeError("cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw DecodeError("write failed for " + path.string());
    }
}

}  // namespace pom::codec
