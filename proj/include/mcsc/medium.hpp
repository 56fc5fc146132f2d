#pragma once

#include "mcsc/hopping.hpp"
#include "mcsc/packet.hpp"
#include "mcsc/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcsc::medium {

using hopping::ChannelIndex;

enum class TxKind
{
    Data,
    Beacon,
};

enum class Outcome
{
    Delivered,
    CorruptDelivered,
    Collided,
    Jammed,
    InterferenceLost,
};

std::string toString(TxKind kind);
std::string toString(Outcome outcome);
TxKind txKindFromString(const std::string& s);
Outcome outcomeFromString(const std::string& s);

struct Transmission
{
    std::uint16_t sender = 0;
    ChannelIndex channel = 0;
    std::uint64_t slot = 0;
    TxKind kind = TxKind::Data;
    packet::WireBytes bytes{};

    // Simulation bookkeeping, never read by receivers.
    bool injected = false;
    std::uint64_t enqueueSlot = 0;
};

// A node that is tuned to a channel and not transmitting in this slot.
struct Listener
{
    std::uint16_t address = 0;
    ChannelIndex channel = 0;
};

struct Delivery
{
    std::size_t txIndex = 0; // index into the slot's transmission list
    TxKind kind = TxKind::Data;
    ChannelIndex channel = 0;
    packet::WireBytes bytes{};
};

// One record per transmission.
struct MediumEvent
{
    std::uint64_t slot = 0;
    ChannelIndex channel = 0;
    std::uint16_t sender = 0;
    TxKind kind = TxKind::Data;
    Outcome outcome = Outcome::Delivered;
    bool injected = false;
    bool captured = false;
    std::uint32_t receivers = 0;
    std::uint64_t enqueueSlot = 0;

    friend bool operator==(const MediumEvent&, const MediumEvent&) = default;
};

struct NarrowbandInterferer
{
    ChannelIndex channel = 0;
    double lossProb = 0.0;

    friend bool operator==(const NarrowbandInterferer&, const NarrowbandInterferer&) = default;
};

enum class InterferenceLevel
{
    Low,
    Medium,
    High,
    Custom,
};

std::string toString(InterferenceLevel level);
InterferenceLevel interferenceLevelFromString(const std::string& s);

struct InterferenceScenario
{
    InterferenceLevel level = InterferenceLevel::Custom;
    double perPacketLossProb = 0.0;
    double bitErrorProb = 0.0;
    // Persistent interferers confined to one channel each (e.g. a neighbouring
    // network parked on that frequency).
    std::vector<NarrowbandInterferer> narrowband;

    void validate(const hopping::ChannelPlan& plan) const;

    friend bool operator==(const InterferenceScenario&, const InterferenceScenario&) = default;
};

enum class JammerMode
{
    Fixed,    // always the target channel
    Sweeping, // contiguous block of k channels advancing by k each slot
    Wideband, // fixed contiguous block of k channels starting at the target
    Random,   // k distinct channels drawn uniformly every slot
    Adaptive, // learns a periodic hop pattern from observed traffic
};

std::string toString(JammerMode mode);
JammerMode jammerModeFromString(const std::string& s);

struct JammerConfig
{
    JammerMode mode = JammerMode::Fixed;
    std::uint32_t channelsPerSlot = 1;
    std::optional<ChannelIndex> targetChannel;
    std::uint32_t maxLag = 512; // Adaptive only: longest period it looks for

    void validate(const hopping::ChannelPlan& plan) const;

    friend bool operator==(const JammerConfig&, const JammerConfig&) = default;
};

class Jammer
{
  public:
    Jammer(const JammerConfig& config, const hopping::ChannelPlan& plan, Rng rng);

    // Channels destroyed in this slot; decided before the slot's traffic.
    std::vector<bool> jammedChannels(std::uint64_t slot);

    // Adaptive mode watches legitimate data traffic after each slot.
    void observe(std::uint64_t slot, std::span<const Transmission> transmissions);

    // Adaptive mode: the period it has locked onto, if any.
    std::optional<std::uint32_t> lockedPeriod() const;

    const JammerConfig& config() const noexcept { return config_; }

  private:
    void fillRandom(std::vector<bool>& jam, std::uint32_t count);

    JammerConfig config_;
    hopping::ChannelPlan plan_;
    Rng rng_;

    struct Sample
    {
        std::uint64_t slot = 0;
        ChannelIndex channel = 0;
        bool valid = false;
    };
    std::vector<Sample> history_;   // ring indexed by slot % history_.size()
    std::vector<bool> consistent_;  // per lag
    std::vector<std::uint32_t> matches_;
};

struct EavesdropperConfig
{
    std::vector<ChannelIndex> monitoredChannels;

    friend bool operator==(const EavesdropperConfig&, const EavesdropperConfig&) = default;
};

struct Capture
{
    std::uint64_t slot = 0;
    ChannelIndex channel = 0;
    packet::WireBytes bytes{};
};

class Eavesdropper
{
  public:
    Eavesdropper(const EavesdropperConfig& config, const hopping::ChannelPlan& plan);

    bool monitors(ChannelIndex channel) const;
    void capture(std::uint64_t slot, ChannelIndex channel, const packet::WireBytes& bytes);

    const std::vector<Capture>& log() const noexcept { return log_; }

  private:
    std::vector<bool> monitored_;
    std::vector<Capture> log_;
};

// Captured frames over legitimate data frames transmitted. nullopt when no
// frame was transmitted.
std::optional<double> eavesdropSuccessRate(std::size_t capturedFrames, std::uint64_t totalFrames);
std::optional<double> eavesdropSuccessRate(const std::vector<Capture>& log, std::uint64_t totalFrames);

enum class ReplayChannelPolicy
{
    Captured, // replay on the channel the frame was captured on
    Random,   // replay on a uniformly random channel
};

std::string toString(ReplayChannelPolicy policy);
ReplayChannelPolicy replayPolicyFromString(const std::string& s);

struct ReplayerConfig
{
    double injectProb = 0.0; // per slot
    ReplayChannelPolicy policy = ReplayChannelPolicy::Random;
    std::uint16_t address = 0xFFFF; // radio identity used in the event log

    friend bool operator==(const ReplayerConfig&, const ReplayerConfig&) = default;
};

// Re-sends a captured frame verbatim, chosen uniformly from the log.
// Throws RangeError when the log is empty.
Transmission replayInject(const std::vector<Capture>& log, const hopping::ChannelPlan& plan, std::uint64_t slot,
                          ReplayChannelPolicy policy, std::uint16_t attackerAddress, Rng& rng);

struct SlotResult
{
    std::vector<MediumEvent> events; // aligned with the input transmissions
    std::map<std::uint16_t, std::vector<Delivery>> inboxes;
    std::vector<bool> jammed;
};

// Resolves one slot. Rules, in order: two or more transmissions on a channel
// collide; jammed channels destroy what is left; survivors face narrowband and
// background loss, then independent bit flips; the eavesdropper logs
// legitimate data it can hear; survivors reach every listener on the channel.
SlotResult resolveSlot(std::uint64_t slot, std::span<const Transmission> transmissions,
                       std::span<const Listener> listeners, const InterferenceScenario& scenario,
                       const hopping::ChannelPlan& plan, Jammer* jammer, Eavesdropper* eavesdropper, Rng& rng);

} // namespace mcsc::medium
