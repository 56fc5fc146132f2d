#include "mcsc/hopping.hpp"

#include "mcsc/error.hpp"

#include <string>

namespace mcsc::hopping {

void ChannelPlan::validate() const
{
    if (channelCount < 1 || channelCount > kMaxChannels)
        throw InvalidChannelPlan("channel_count must be in 1.." + std::to_string(kMaxChannels) + ", got " +
                                 std::to_string(channelCount));
}

double ChannelPlan::frequencyMhz(ChannelIndex index) const
{
    if (index >= channelCount)
        throw RangeError("channel index " + std::to_string(index) + " outside plan of " +
                         std::to_string(channelCount));
    return baseFrequencyMhz + channelWidthMhz * index;
}

ChannelIndex prngIndex(const HopSeed& seed, std::uint64_t slot, std::uint32_t n)
{
    if (n == 0)
        throw InvalidChannelPlan("channel count must be positive");
    crypto::CounterBlock counter;
    counter.slotIndex = slot;
    counter.tag = crypto::DomainTag::Prng;
    const crypto::Block out = crypto::aes128EncryptBlock(crypto::AesKey(seed.value), counter.toBytes());
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 8; ++i)
        value = (value << 8) | out[i];
    return static_cast<ChannelIndex>(value % n);
}

std::uint32_t channelLabel(ChannelIndex index, const ChannelPlan& plan)
{
    if (index >= plan.channelCount)
        throw RangeError("channel index " + std::to_string(index) + " outside plan of " +
                         std::to_string(plan.channelCount));
    return index + 1;
}

HopState makeHopState(const ChannelPlan& plan, const HopSeed& seed, std::uint64_t slot)
{
    plan.validate();
    return HopState{plan, seed, slot, prngIndex(seed, slot, plan.channelCount)};
}

std::pair<HopState, ChannelIndex> advance(const HopState& state)
{
    HopState next = state;
    next.currentSlot = state.currentSlot + 1;
    next.currentChannel = prngIndex(next.seed, next.currentSlot, next.plan.channelCount);
    return {next, next.currentChannel};
}

HopSeed rotateSeed(const crypto::AesKey& masterKey, const HopSeed& old)
{
    crypto::CounterBlock counter;
    counter.slotIndex = old.epoch + 1;
    counter.tag = crypto::DomainTag::Seed;
    return HopSeed{crypto::aes128EncryptBlock(masterKey, counter.toBytes()), old.epoch + 1};
}

ChannelIndex resyncChannel(Rng& rng, const ChannelPlan& plan)
{
    plan.validate();
    return static_cast<ChannelIndex>(rng.uniformIndex(plan.channelCount));
}

ChannelIndex beaconChannel(std::uint64_t beaconIndex, const ChannelPlan& plan)
{
    plan.validate();
    return static_cast<ChannelIndex>(beaconIndex % plan.channelCount);
}

ChannelIndex cyclicChannel(std::uint64_t slot, std::uint32_t period, const ChannelPlan& plan)
{
    plan.validate();
    if (period == 0)
        throw InvalidChannelPlan("fhss period must be positive");
    const std::uint64_t phase = slot % period;
    return static_cast<ChannelIndex>(phase * plan.channelCount / period);
}

SeedSchedule::SeedSchedule(const HopSeed& initial, const crypto::AesKey& masterKey, std::uint64_t rotationSlots)
    : initial_(initial), masterKey_(masterKey), rotationSlots_(rotationSlots)
{
    if (rotationSlots_ == 0)
        throw InvalidConfig("seed_rotation_slots must be positive");
}

std::uint64_t SeedSchedule::epochForSlot(std::uint64_t slot) const
{
    return initial_.epoch + slot / rotationSlots_;
}

HopSeed SeedSchedule::seedForEpoch(std::uint64_t epoch) const
{
    if (epoch <= initial_.epoch)
        return initial_;
    return rotateSeed(masterKey_, HopSeed{{}, epoch - 1});
}

ChannelIndex SeedSchedule::channelAt(std::uint64_t slot, const ChannelPlan& plan) const
{
    return prngIndex(seedForSlot(slot), slot, plan.channelCount);
}

} // namespace mcsc::hopping
