#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pom::crypto {

using HashValue = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Hashing profile. Hash values are unsigned integers in [0, max_value()],
/// obtained by interpreting the first `bits` bits of a SHA-256 digest as a
/// big-endian integer. The production profile uses the full 256 bits; test
/// profiles truncate (down to 16 bits) so that nonce search completes in
/// milliseconds while exercising the identical code paths.
class HashProfile {
public:
    static constexpr unsigned kMinBits = 16;
    static constexpr unsigned kMaxBits = 256;

    explicit HashProfile(unsigned bits);

    static HashProfile production() { return HashProfile(kMaxBits); }
    static HashProfile test_profile(unsigned bits = 16) { return HashProfile(bits); }

    unsigned bits() const { return bits_; }
    const HashValue& max_value() const { return max_; }

    /// SHA-256 of `data`, truncated to the profile's bit width.
    HashValue hash(std::span<const std::uint8_t> data) const;
    HashValue hash(std::string_view data) const;

private:
    unsigned bits_;
    HashValue max_;
};

struct KeyPair {
    std::vector<std::uint8_t> public_key;  // 32 bytes, the account identity
    std::vector<std::uint8_t> secret_key;  // 64 bytes
};

/// Fresh random Ed25519 key pair.
KeyPair generate_keypair();

/// Deterministic Ed25519 key pair from a 32-byte seed.
KeyPair keypair_from_seed(std::span<const std::uint8_t> seed32);

/// Detached Ed25519 signature (64 bytes). Throws std::invalid_argument if
/// the secret key has the wrong length.
std::vector<std::uint8_t> sign(std::span<const std::uint8_t> secret_key,
                               std::span<const std::uint8_t> message);

/// True iff `signature` was produced over `message` with the secret key
/// matching `public_key`. Malformed inputs return false, never throw.
bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message,
            std::span<const std::uint8_t> signature);

/// Full-width SHA-256, independent of any profile. Used for file digests.
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);
bool from_hex(std::string_view hex, std::vector<std::uint8_t>& out);

}  // namespace pom::crypto
