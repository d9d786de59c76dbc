#include "pom/codec.hpp"
#include "pom/crypto.hpp"
#include "pom/ledger.hpp"

#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

using namespace pom::codec;
using pom::crypto::KeyPair;
using pom::ledger::Rational;
using pom::ledger::Account;
using pom::ledger::Block;
using pom::ledger::Mode;
using pom::ledger::Transaction;

namespace {

KeyPair test_key(std::uint8_t tag) {
    std::vector<std::uint8_t> seed(32, tag);
    return pom::crypto::keypair_from_seed(seed);
}

ChainDocument sample_document() {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a(ka.public_key), b(kb.public_key);
    const pom::crypto::HashProfile profile(16);

    ChainDocument doc;
    doc.bits = 16;
    doc.chain.params.mode = Mode::pom;
    doc.chain.params.period = 4;
    doc.chain.params.discrimination = Rational(1, 2);
    doc.chain.params.difficulty = {Rational(4), Rational(7, 2)};

    Block genesis;
    genesis.miner = a;
    genesis.nonce = 11;
    doc.chain.blocks.push_back(genesis);

    Block second;
    second.prev_hash = pom::ledger::block_hash(genesis, profile);
    second.miner = b;
    second.nonce = 3;
    second.txs = {pom::ledger::sign_transaction(
        Transaction{{{a, -1}, {b, 1}}}, {ka})};
    doc.chain.blocks.push_back(second);
    return doc;
}

}  // namespace

TEST_CASE("rational text forms parse exactly") {
    CHECK(decode_rational("3") == Rational(3));
    CHECK(decode_rational("7/2") == Rational(7, 2));
    CHECK(decode_rational("1.5") == Rational(3, 2));
    CHECK(decode_rational("0.25") == Rational(1, 4));
    CHECK(encode_rational(Rational(3, 2)) == "3/2");
    CHECK(encode_rational(Rational(4)) == "4");
    CHECK(decode_rational(encode_rational(Rational(22, 7))) == Rational(22, 7));

    CHECK_THROWS_AS(decode_rational(""), DecodeError);
    CHECK_THROWS_AS(decode_rational("abc"), DecodeError);
    CHECK_THROWS_AS(decode_rational("1/0"), DecodeError);
    CHECK_THROWS_AS(decode_rational("1.5.2"), DecodeError);
}

TEST_CASE("doubles round-trip through their shortest decimal form") {
    for (const double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 123456.789, 1e-17, 2.5e300}) {
        CHECK(decode_double(encode_double(v)) == v);
    }
    CHECK_THROWS_AS(decode_double("12x"), DecodeError);
    CHECK_THROWS_AS(decode_double(""), DecodeError);
}

TEST_CASE("chain documents round-trip exactly") {
    const ChainDocument doc = sample_document();
    const std::string text = encode_chain_document(doc);
    CHECK(decode_chain_document(text) == doc);
}

TEST_CASE("any single-byte corruption of a chain document is detected") {
    const ChainDocument doc = sample_document();
    const std::string text = encode_chain_document(doc);
    // The outer digest covers every byte, so any flip must surface as a
    // decode error (or, for flips inside the digest itself, a mismatch).
    for (std::size_t pos = 0; pos < text.size(); pos += 7) {
        std::string corrupt = text;
        corrupt[pos] ^= 0x01;
        CHECK_THROWS_AS(decode_chain_document(corrupt), DecodeError);
    }
}

TEST_CASE("signed transactions round-trip") {
    const KeyPair ka = test_key(1), kb = test_key(2);
    const Account a(ka.public_key), b(kb.public_key);
    const std::vector<pom::ledger::SignedTransaction> txs = {
        pom::ledger::sign_transaction(Transaction{{{a, -2}, {b, 2}}}, {ka}),
        pom::ledger::sign_transaction(Transaction{{{a, -1}, {b, 1}}}, {ka}),
    };
    CHECK(decode_signed_transactions(encode_signed_transactions(txs)) == txs);
}

TEST_CASE("key pairs round-trip") {
    const KeyPair kp = test_key(9);
    const KeyPair back = decode_keypair(encode_keypair(kp));
    CHECK(back.public_key == kp.public_key);
    CHECK(back.secret_key == kp.secret_key);
}

TEST_CASE("malformed documents raise decode errors") {
    CHECK_THROWS_AS(decode_chain_document("not a document"), DecodeError);
    CHECK_THROWS_AS(decode_chain_document(""), DecodeError);
    CHECK_THROWS_AS(decode_signed_transactions("{"), DecodeError);
    CHECK_THROWS_AS(decode_keypair("{}"), DecodeError);
}
