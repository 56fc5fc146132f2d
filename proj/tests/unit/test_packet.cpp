#include "doctest.h"

#include "mcsc/error.hpp"
#include "mcsc/packet.hpp"
#include "mcsc/rng.hpp"

#include <string>
#include <vector>

using namespace mcsc;
using namespace mcsc::packet;

namespace {

const crypto::AesKey kKey = crypto::AesKey::fromHex("2b7e151628aed2a6abf7158809cf4f3c");

TxContext context(std::uint16_t address, std::uint16_t sequence = 0)
{
    TxContext ctx;
    ctx.key = kKey;
    ctx.nodeAddress = address;
    ctx.sequence = sequence;
    return ctx;
}

hopping::HopState hopAt(std::uint64_t slot)
{
    return hopping::makeHopState(hopping::ChannelPlan{},
                                 hopping::HopSeed{crypto::AesKey::fromHex("000102030405060708090a0b0c0d0e0f").bytes(), 0},
                                 slot);
}

crypto::Payload88 pattern(std::uint8_t base)
{
    crypto::Payload88 p;
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<std::uint8_t>(base + i);
    return p;
}

} // namespace

TEST_CASE("hand-assembled frame")
{
    Frame f;
    f.nextChannel = 124;
    f.nodeAddress = 0xBEEF;
    f.payload.fill(0xFF);
    f.sequence = 1;
    const WireBytes expected{0x7C, 0xBE, 0xEF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF,
                             0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x00, 0x01};
    CHECK(serialize(f) == expected);
    CHECK(deserialize(expected) == f);
}

TEST_CASE("all-zero frame")
{
    CHECK(serialize(Frame{}) == WireBytes{});
    CHECK(deserialize(WireBytes{}) == Frame{});
}

TEST_CASE("framing errors")
{
    std::vector<std::uint8_t> shortFrame(15, 0);
    std::vector<std::uint8_t> longFrame(17, 0);
    CHECK_THROWS_AS(deserialize(shortFrame), FramingError);
    CHECK_THROWS_AS(deserialize(longFrame), FramingError);
    CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{}), FramingError);
}

TEST_CASE("round trips over random frames and byte strings")
{
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        Frame f;
        f.nextChannel = static_cast<std::uint8_t>(rng.uniformIndex(256));
        f.nodeAddress = static_cast<std::uint16_t>(rng.uniformIndex(65536));
        for (auto& b : f.payload)
            b = static_cast<std::uint8_t>(rng.uniformIndex(256));
        f.sequence = static_cast<std::uint16_t>(rng.uniformIndex(65536));
        const WireBytes w = serialize(f);
        REQUIRE(w.size() == 16);
        REQUIRE(deserialize(w) == f);
    }
    for (int i = 0; i < 10000; ++i) {
        WireBytes b;
        for (auto& x : b)
            x = static_cast<std::uint8_t>(rng.uniformIndex(256));
        REQUIRE(serialize(deserialize(b)) == b);
    }
}

TEST_CASE("build frame")
{
    const auto hop = hopAt(500);

    SUBCASE("sequence increments")
    {
        auto r1 = buildFrame(context(7, 10), hop, timesync::SyncStatus::Synced, pattern(1));
        auto r2 = buildFrame(r1.context, hop, timesync::SyncStatus::Synced, pattern(2));
        CHECK(r1.frame.sequence == 10);
        CHECK(r2.frame.sequence == 11);
        CHECK(r2.context.sequence == 12);
        CHECK_FALSE(r1.wrapped);
    }
    SUBCASE("wrap records a rotation event")
    {
        auto r1 = buildFrame(context(7, 65535), hop, timesync::SyncStatus::Synced, pattern(1));
        CHECK(r1.frame.sequence == 65535);
        CHECK(r1.context.sequence == 0);
        CHECK(r1.wrapped);
        CHECK(r1.context.rotationEvents == 1);
        auto r2 = buildFrame(r1.context, hop, timesync::SyncStatus::Synced, pattern(1));
        CHECK(r2.frame.sequence == 0);
        CHECK_FALSE(r2.wrapped);
        CHECK(r2.context.rotationEvents == 1);
    }
    SUBCASE("next channel is the hop sequence at slot + 1")
    {
        auto r = buildFrame(context(7), hop, timesync::SyncStatus::Synced, pattern(1));
        CHECK(r.frame.nextChannel == hopping::prngIndex(hop.seed, 501, 125));
    }
    SUBCASE("payload is encrypted under the sender's counter")
    {
        auto r = buildFrame(context(7, 3), hop, timesync::SyncStatus::Synced, pattern(1));
        const crypto::CounterBlock cb{7, 3, 500, crypto::DomainTag::Payload};
        CHECK(r.frame.payload == crypto::encryptPayload(kKey, cb, pattern(1)));
        CHECK(r.frame.nodeAddress == 7);
    }
    SUBCASE("desynchronized nodes cannot build")
    {
        CHECK_THROWS_AS(buildFrame(context(7), hop, timesync::SyncStatus::Desynced, pattern(1)), NotSynchronized);
    }
    SUBCASE("next channel must fit in 8 bits")
    {
        CHECK_THROWS_AS(buildFrame(context(7), 5, 256, timesync::SyncStatus::Synced, pattern(1)), RangeError);
        CHECK_NOTHROW(buildFrame(context(7), 5, 255, timesync::SyncStatus::Synced, pattern(1)));
    }
    SUBCASE("headers travel in the clear")
    {
        TxContext other = context(7, 3);
        other.key = crypto::AesKey::fromHex("ffeeddccbbaa99887766554433221100");
        const WireBytes a = serialize(buildFrame(context(7, 3), hop, timesync::SyncStatus::Synced, pattern(1)).frame);
        const WireBytes b = serialize(buildFrame(other, hop, timesync::SyncStatus::Synced, pattern(1)).frame);
        for (std::size_t i : {0, 1, 2, 14, 15})
            CHECK(a[i] == b[i]);
        CHECK(std::vector<std::uint8_t>(a.begin() + 3, a.begin() + 14) !=
              std::vector<std::uint8_t>(b.begin() + 3, b.begin() + 14));
    }
}

TEST_CASE("open frame")
{
    const auto hop = hopAt(900);
    const auto built = buildFrame(context(9, 40), hop, timesync::SyncStatus::Synced, pattern(5));

    SUBCASE("matching slot recovers the plaintext and headers")
    {
        ReplayGuard guard;
        const OpenResult r = openFrame(kKey, built.frame, 900, guard);
        CHECK(r.status == OpenStatus::Accepted);
        CHECK(r.plaintext == pattern(5));
        CHECK(r.nextChannel == built.frame.nextChannel);
        CHECK(r.senderAddress == 9);
        CHECK(r.sequence == 40);
    }
    SUBCASE("wrong slot garbles the plaintext")
    {
        ReplayGuard guard;
        CHECK(openFrame(kKey, built.frame, 901, guard).plaintext != pattern(5));
    }
    SUBCASE("replayed frame is rejected")
    {
        ReplayGuard guard;
        CHECK(openFrame(kKey, built.frame, 900, guard).status == OpenStatus::Accepted);
        CHECK(openFrame(kKey, built.frame, 900, guard).status == OpenStatus::ReplayRejected);
        CHECK(openFrame(kKey, built.frame, 1234, guard).status == OpenStatus::ReplayRejected);
    }
}

TEST_CASE("replay window")
{
    ReplayGuard guard;
    CHECK(guard.admit(1, 0));
    CHECK_FALSE(guard.admit(1, 0));
    CHECK(guard.admit(2, 0)); // windows are per sender
    for (std::uint16_t s = 1; s < kReplayWindow; ++s)
        REQUIRE(guard.admit(1, s));
    // The window holds 0..4095: sequence 0 is still inside.
    CHECK_FALSE(guard.admit(1, 0));
    CHECK(guard.admit(1, static_cast<std::uint16_t>(kReplayWindow)));
    // One newer sequence pushed 0 out.
    CHECK_FALSE(guard.contains(1, 0));
    CHECK(guard.admit(1, 0));
    CHECK(guard.contains(1, 0));

    SUBCASE("a replay after 2^12 + 1 newer sequences is accepted")
    {
        ReplayGuard g;
        CHECK(g.admit(5, 100));
        for (std::uint32_t k = 1; k <= kReplayWindow + 1; ++k)
            REQUIRE(g.admit(5, static_cast<std::uint16_t>(100 + k)));
        CHECK(g.admit(5, 100));
    }
    SUBCASE("the window follows sequence wrap")
    {
        ReplayGuard g;
        for (std::uint32_t k = 0; k < 70000; ++k)
            REQUIRE(g.admit(3, static_cast<std::uint16_t>(k)));
        CHECK_FALSE(g.admit(3, static_cast<std::uint16_t>(69999)));
        CHECK(g.admit(3, static_cast<std::uint16_t>(70000 - kReplayWindow - 1)));
    }
}

TEST_CASE("beacon encoding")
{
    const timesync::SyncSignal s{123456.789, 3, 3 * 4096 + 17};
    const WireBytes b = encodeBeacon(s);
    const auto d = decodeBeacon(b, 4096);
    REQUIRE(d.has_value());
    CHECK(d->masterTimeMs == doctest::Approx(123456.789).epsilon(1e-12));
    CHECK(d->slotIndex == s.slotIndex);
    CHECK(d->seedEpoch == 3);

    SUBCASE("nanosecond field and slot are big-endian")
    {
        const WireBytes z = encodeBeacon(timesync::SyncSignal{1e-6, 0, 0x010203040506ULL});
        CHECK(z[7] == 0x01);
        CHECK(z[8] == 0x01);
        CHECK(z[13] == 0x06);
    }
    SUBCASE("any single bit flip is caught by the CRC")
    {
        for (std::size_t bit = 0; bit < 128; ++bit) {
            WireBytes c = b;
            c[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
            CHECK_FALSE(decodeBeacon(c, 4096).has_value());
        }
    }
    SUBCASE("CRC-16/CCITT-FALSE check value")
    {
        // The catalogue check value for "123456789" is 0x29B1. Build a beacon whose
        // first 14 bytes are known and compare against a bitwise reference.
        const WireBytes e = encodeBeacon(timesync::SyncSignal{0.0, 0, 0});
        std::uint16_t crc = 0xFFFF;
        for (std::size_t i = 0; i < 14; ++i) {
            crc ^= static_cast<std::uint16_t>(e[i] << 8);
            for (int k = 0; k < 8; ++k)
                crc = static_cast<std::uint16_t>((crc & 0x8000) ? (crc << 1) ^ 0x1021 : crc << 1);
        }
        CHECK(e[14] == (crc >> 8));
        CHECK(e[15] == (crc & 0xFF));

        std::uint16_t check = 0xFFFF;
        for (char ch : std::string("123456789")) {
            check ^= static_cast<std::uint16_t>(static_cast<std::uint8_t>(ch) << 8);
            for (int k = 0; k < 8; ++k)
                check = static_cast<std::uint16_t>((check & 0x8000) ? (check << 1) ^ 0x1021 : check << 1);
        }
        CHECK(check == 0x29B1);
    }
    SUBCASE("wrong length")
    {
        std::vector<std::uint8_t> shorter(b.begin(), b.begin() + 15);
        CHECK_FALSE(decodeBeacon(shorter, 4096).has_value());
    }
}
