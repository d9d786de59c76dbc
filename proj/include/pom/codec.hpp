#pragma once

#include "pom/ledger.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace pom::codec {

/// Raised on any malformed input: bad JSON, bad hex, out-of-range numbers,
/// violated type invariants, or a chain file whose digest does not match its
/// body.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A chain plus the hash-profile width it was built under. The file format
/// wraps the body in a full-width SHA-256 digest so that any byte-level
/// corruption is detected at load time, regardless of the profile width.
struct ChainDocument {
    unsigned bits = 16;
    ledger::Chain chain;
    bool operator==(const ChainDocument&) const = default;
};

/// Exact rational text forms: "n", "n/d" (lowest terms, d > 0), or a plain
/// decimal such as "1.5", which parses exactly. encode_rational always emits
/// the lowest-terms form.
std::string encode_rational(const ledger::Rational& value);
ledger::Rational decode_rational(const std::string& text);

std::string encode_chain_document(const ChainDocument& doc);
ChainDocument decode_chain_document(const std::string& text);

void save_chain_document(const ChainDocument& doc, const std::filesystem::path& path);
ChainDocument load_chain_document(const std::filesystem::path& path);

std::string encode_signed_transactions(const std::vector<ledger::SignedTransaction>& txs);
std::vector<ledger::SignedTransaction> decode_signed_transactions(const std::string& text);
std::vector<ledger::SignedTransaction> load_signed_transactions(const std::filesystem::path& path);

std::string encode_keypair(const crypto::KeyPair& kp);
crypto::KeyPair decode_keypair(const std::string& text);
void save_keypair(const crypto::KeyPair& kp, const std::filesystem::path& path);
crypto::KeyPair load_keypair(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (std::to_chars), so that
/// serialized simulation output is byte-stable for a given seed.
std::string encode_double(double value);
double decode_double(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace pom::codec
