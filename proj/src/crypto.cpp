#include "pom/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace pom::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

}  // namespace

HashProfile::HashProfile(unsigned bits) : bits_(bits) {
    if (bits < kMinBits || bits > kMaxBits) {
        throw std::invalid_argument("hash profile bits must be in [16, 256]");
    }
    max_ = (HashValue(1) << bits) - 1;
}

HashValue HashProfile::hash(std::span<const std::uint8_t> data) const {
    ensure_sodium();
    std::array<std::uint8_t, crypto_hash_sha256_BYTES> digest{};
    crypto_hash_sha256(digest.data(), data.data(), data.size());

    // Big-endian interpretation of the digest's first `bits_` bits.
    const unsigned nbytes = (bits_ + 7) / 8;
    HashValue value;
    boost::multiprecision::import_bits(value, digest.begin(), digest.begin() + nbytes, 8, true);
    const unsigned excess = nbytes * 8 - bits_;
    if (excess > 0) {
        value >>= excess;
    }
    return value;
}

HashValue HashProfile::hash(std::string_view data) const {
    return hash(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

KeyPair generate_keypair() {
    ensure_sodium();
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
    return kp;
}

KeyPair keypair_from_seed(std::span<const std::uint8_t> seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_SEEDBYTES) {
        throw std::invalid_argument("key seed must be 32 bytes");
    }
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed32.data());
    return kp;
}

std::vector<std::uint8_t> sign(std::span<const std::uint8_t> secret_key,
                               std::span<const std::uint8_t> message) {
    ensure_sodium();
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES) {
        throw std::invalid_argument("secret key must be 64 bytes");
    }
    std::vector<std::uint8_t> sig(crypto_sign_BYTES);
    unsigned long long siglen = 0;
    crypto_sign_detached(sig.data(), &siglen, message.data(), message.size(),
                         secret_key.data());
    sig.resize(siglen);
    return sig;
}

bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message,
            std::span<const std::uint8_t> signature) {
    ensure_sodium();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES ||
        signature.size() != crypto_sign_BYTES) {
        return false;
    }
    return crypto_sign_verify_detached(signature.data(), message.data(),
                                       message.size(), public_key.data()) == 0;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    std::array<std::uint8_t, 32> digest{};
    crypto_hash_sha256(digest.data(), data.data(), data.size());
    return digest;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

bool from_hex(std::string_view hex, std::vector<std::uint8_t>& out) {
    if (hex.size() % 2 != 0) {
        return false;
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;  // uppercase rejected: canonical form is lowercase
    };
    out.clear();
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            return false;
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return true;
}

}  // namespace pom::crypto
