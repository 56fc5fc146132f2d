#pragma once

#include "mcsc/crypto.hpp"
#include "mcsc/rng.hpp"

#include <cstdint>
#include <utility>

namespace mcsc::hopping {

// 0-based channel index as used on the wire and in the simulator.
using ChannelIndex = std::uint32_t;

// The frame's next-channel field is 8 bits wide.
inline constexpr std::uint32_t kMaxChannels = 256;

struct ChannelPlan
{
    std::uint32_t channelCount = 125;
    double baseFrequencyMhz = 2400.0;
    double channelWidthMhz = 1.0;

    // Throws InvalidChannelPlan unless 1 <= channelCount <= 256.
    void validate() const;
    double frequencyMhz(ChannelIndex index) const;

    friend bool operator==(const ChannelPlan&, const ChannelPlan&) = default;
};

struct HopSeed
{
    crypto::Block value{};
    std::uint64_t epoch = 0;

    friend bool operator==(const HopSeed&, const HopSeed&) = default;
};

struct HopState
{
    ChannelPlan plan;
    HopSeed seed;
    std::uint64_t currentSlot = 0;
    ChannelIndex currentChannel = 0;

    friend bool operator==(const HopState&, const HopState&) = default;
};

// Keyed channel selection: AES_seed(CounterBlock{slot, Prng}), first 8 bytes
// as a big-endian integer, reduced mod n.
ChannelIndex prngIndex(const HopSeed& seed, std::uint64_t slot, std::uint32_t n);

// 1-based channel number for display. Throws RangeError if index >= channelCount.
std::uint32_t channelLabel(ChannelIndex index, const ChannelPlan& plan);

HopState makeHopState(const ChannelPlan& plan, const HopSeed& seed, std::uint64_t slot);

// Moves to the next slot and recomputes the channel with the state's seed.
std::pair<HopState, ChannelIndex> advance(const HopState& state);

// Next seed in the rotation chain. Depends on the master key and old.epoch only.
HopSeed rotateSeed(const crypto::AesKey& masterKey, const HopSeed& old);

// Rejoin channel for a node that lost the schedule; drawn from the simulation
// RNG, never from the shared seed.
ChannelIndex resyncChannel(Rng& rng, const ChannelPlan& plan);

// Beacon walk: the k-th beacon goes out on channel k mod N.
ChannelIndex beaconChannel(std::uint64_t beaconIndex, const ChannelPlan& plan);

// Public cyclic schedule of the FHSS baseline: period slots spread evenly over
// the band, channel(slot) = floor((slot mod period) * N / period).
ChannelIndex cyclicChannel(std::uint64_t slot, std::uint32_t period, const ChannelPlan& plan);

// Time-varying seed: the epoch advances every rotationSlots slots, starting
// from the initial seed at slot 0.
class SeedSchedule
{
  public:
    SeedSchedule(const HopSeed& initial, const crypto::AesKey& masterKey, std::uint64_t rotationSlots);

    std::uint64_t epochForSlot(std::uint64_t slot) const;
    HopSeed seedForEpoch(std::uint64_t epoch) const;
    HopSeed seedForSlot(std::uint64_t slot) const { return seedForEpoch(epochForSlot(slot)); }
    ChannelIndex channelAt(std::uint64_t slot, const ChannelPlan& plan) const;

    std::uint64_t rotationSlots() const noexcept { return rotationSlots_; }

  private:
    HopSeed initial_;
    crypto::AesKey masterKey_;
    std::uint64_t rotationSlots_;
};

} // namespace mcsc::hopping
