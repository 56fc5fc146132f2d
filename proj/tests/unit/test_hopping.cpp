#include "doctest.h"

#include "mcsc/error.hpp"
#include "mcsc/hopping.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <vector>

using namespace mcsc;
using namespace mcsc::hopping;

namespace {

const crypto::AesKey kSeedKey = crypto::AesKey::fromHex("000102030405060708090a0b0c0d0e0f");
const crypto::AesKey kMaster = crypto::AesKey::fromHex("603deb1015ca71be2b73aef0857d7781");

HopSeed seed0()
{
    return HopSeed{kSeedKey.bytes(), 0};
}

// Pearson statistic against the uniform distribution.
double chiSquare(const std::vector<std::uint64_t>& counts, std::uint64_t total)
{
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double x = 0.0;
    for (auto c : counts)
        x += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    return x;
}

double chiSquare99(std::size_t bins)
{
    boost::math::chi_squared dist(static_cast<double>(bins - 1));
    return boost::math::quantile(dist, 0.99);
}

} // namespace

TEST_CASE("prngIndex follows its definition through the block cipher")
{
    const HopSeed s = seed0();
    for (std::uint64_t slot : {0ULL, 1ULL, 77ULL, 4096ULL, 0xFFFFFFFFFFFFULL}) {
        const crypto::Block out =
            crypto::aes128EncryptBlock(crypto::AesKey(s.value), crypto::CounterBlock{0, 0, slot, crypto::DomainTag::Prng}.toBytes());
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v = (v << 8) | out[static_cast<std::size_t>(i)];
        CHECK(prngIndex(s, slot, 125) == v % 125);
        CHECK(prngIndex(s, slot, 256) == v % 256);
    }
}

TEST_CASE("prngIndex edge cases")
{
    CHECK(prngIndex(seed0(), 12345, 1) == 0);
    CHECK_THROWS_AS(prngIndex(seed0(), 0, 0), InvalidChannelPlan);
    CHECK(prngIndex(seed0(), 9, 125) == prngIndex(seed0(), 9, 125));
}

TEST_CASE("prngIndex is uniform over 125 channels (chi-square, 99%)")
{
    std::vector<std::uint64_t> counts(125, 0);
    for (std::uint64_t slot = 0; slot < 10000; ++slot) {
        const auto c = prngIndex(seed0(), slot, 125);
        REQUIRE(c < 125);
        ++counts[c];
    }
    CHECK(chiSquare(counts, 10000) < chiSquare99(125));
}

TEST_CASE("channel labels are 1-based")
{
    ChannelPlan plan;
    CHECK(channelLabel(0, plan) == 1);
    CHECK(channelLabel(124, plan) == 125);
    CHECK_THROWS_AS(channelLabel(125, plan), RangeError);
    CHECK(plan.frequencyMhz(0) == doctest::Approx(2400.0));
    CHECK(plan.frequencyMhz(124) == doctest::Approx(2524.0));
}

TEST_CASE("channel plan validation")
{
    CHECK_THROWS_AS(ChannelPlan{0}.validate(), InvalidChannelPlan);
    CHECK_THROWS_AS(ChannelPlan{257}.validate(), InvalidChannelPlan);
    CHECK_NOTHROW(ChannelPlan{256}.validate());
    CHECK_NOTHROW(ChannelPlan{1}.validate());
}

TEST_CASE("advance")
{
    ChannelPlan plan;
    const HopState s = makeHopState(plan, seed0(), 40);
    CHECK(s.currentChannel == prngIndex(seed0(), 40, 125));
    const auto [s1, c1] = advance(s);
    const auto [s2, c2] = advance(s1);
    CHECK(s1.currentSlot == 41);
    CHECK(s2.currentSlot == 42);
    CHECK(c1 == prngIndex(seed0(), 41, 125));
    CHECK(c2 == prngIndex(seed0(), 42, 125));
    CHECK(s2.currentChannel == c2);

    SUBCASE("125 advances are not a permutation")
    {
        std::vector<bool> seen(125, false);
        bool repeat = false;
        HopState st = makeHopState(plan, seed0(), 0);
        for (int i = 0; i < 125; ++i) {
            repeat = repeat || seen[st.currentChannel];
            seen[st.currentChannel] = true;
            st = advance(st).first;
        }
        // Birthday bound: a repeat among 125 uniform draws from 125 is near certain.
        CHECK(repeat);
    }
    SUBCASE("one channel stays at 0")
    {
        HopState st = makeHopState(ChannelPlan{1}, seed0(), 0);
        for (int i = 0; i < 50; ++i) {
            st = advance(st).first;
            CHECK(st.currentChannel == 0);
        }
    }
    SUBCASE("equal states agree forever")
    {
        HopState a = makeHopState(plan, seed0(), 1000);
        HopState b = makeHopState(plan, seed0(), 1000);
        for (int i = 0; i < 1000; ++i) {
            a = advance(a).first;
            b = advance(b).first;
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("seed rotation")
{
    const HopSeed r1 = rotateSeed(kMaster, seed0());
    CHECK(r1 == rotateSeed(kMaster, seed0()));
    CHECK(r1.epoch == 1);
    const HopSeed r2 = rotateSeed(kMaster, r1);
    CHECK(r2.epoch == 2);
    CHECK(r1.value == crypto::aes128EncryptBlock(kMaster, crypto::CounterBlock{0, 0, 1, crypto::DomainTag::Seed}.toBytes()));
    CHECK(r2.value == crypto::aes128EncryptBlock(kMaster, crypto::CounterBlock{0, 0, 2, crypto::DomainTag::Seed}.toBytes()));

    int differing = 0;
    for (std::uint64_t slot = 0; slot < 32; ++slot)
        differing += prngIndex(seed0(), slot, 125) != prngIndex(r1, slot, 125);
    CHECK(differing > 0);

    // Only the epoch changed: the sequence still changes.
    HopSeed sameValue = seed0();
    sameValue.epoch = 5;
    CHECK(rotateSeed(kMaster, sameValue).value != r1.value);
}

TEST_CASE("seed schedule")
{
    SeedSchedule sched(seed0(), kMaster, 4096);
    CHECK(sched.epochForSlot(0) == 0);
    CHECK(sched.epochForSlot(4095) == 0);
    CHECK(sched.epochForSlot(4096) == 1);
    CHECK(sched.seedForSlot(100) == seed0());
    CHECK(sched.seedForSlot(4096) == rotateSeed(kMaster, seed0()));
    CHECK(sched.seedForSlot(3 * 4096) == rotateSeed(kMaster, rotateSeed(kMaster, rotateSeed(kMaster, seed0()))));
    CHECK(sched.channelAt(5000, ChannelPlan{}) == prngIndex(rotateSeed(kMaster, seed0()), 5000, 125));
}

TEST_CASE("resync channel")
{
    Rng one(1);
    CHECK(resyncChannel(one, ChannelPlan{1}) == 0);

    Rng a(77), b(77);
    for (int i = 0; i < 100; ++i)
        CHECK(resyncChannel(a, ChannelPlan{}) == resyncChannel(b, ChannelPlan{}));

    // Twenty independent streams; under uniformity each exceeds the 99% quantile
    // with probability 0.01, so more than three exceedances has odds below 1e-4.
    int exceed = 0;
    for (std::uint64_t stream = 0; stream < 20; ++stream) {
        Rng rng(3, stream);
        std::vector<std::uint64_t> counts(125, 0);
        for (int i = 0; i < 50000; ++i)
            ++counts[resyncChannel(rng, ChannelPlan{})];
        exceed += chiSquare(counts, 50000) >= chiSquare99(125);
    }
    CHECK(exceed <= 3);
}

TEST_CASE("unknown seed: a fixed-channel guess hits about 1/N of slots")
{
    // The attacker parks on one channel; the hop sequence is keyed by a seed it does not know.
    const HopSeed secret{crypto::AesKey::fromHex("f0e1d2c3b4a5968778695a4b3c2d1e0f").bytes(), 0};
    std::uint64_t hits = 0;
    const std::uint64_t slots = 100000;
    for (std::uint64_t slot = 0; slot < slots; ++slot)
        hits += prngIndex(secret, slot, 125) == 42;
    const double rate = static_cast<double>(hits) / static_cast<double>(slots);
    CHECK(rate == doctest::Approx(1.0 / 125).epsilon(0.2));
}

TEST_CASE("beacon walk and cyclic schedule")
{
    ChannelPlan plan;
    CHECK(beaconChannel(0, plan) == 0);
    CHECK(beaconChannel(124, plan) == 124);
    CHECK(beaconChannel(125, plan) == 0);
    CHECK(cyclicChannel(0, 125, plan) == 0);
    CHECK(cyclicChannel(1, 125, plan) == 1);
    CHECK(cyclicChannel(125, 125, plan) == 0);
    CHECK(cyclicChannel(1, 25, plan) == 5);
    CHECK(cyclicChannel(24, 25, plan) == 120);
    for (std::uint64_t s = 0; s < 1000; ++s)
        CHECK(cyclicChannel(s, 7, plan) < 125);
}
