#pragma once

#include "mcsc/crypto.hpp"
#include "mcsc/hopping.hpp"
#include "mcsc/medium.hpp"
#include "mcsc/packet.hpp"
#include "mcsc/rng.hpp"
#include "mcsc/timesync.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcsc::node {

using hopping::ChannelIndex;
using timesync::Millis;

enum class Role
{
    Master,
    Member,
};

enum class Strategy
{
    Mcsc,             // keyed pseudo-random hopping
    SingleChannelAes, // encrypted, parked on one channel
    FhssBaseline,     // public cyclic hopping
};

std::string toString(Role role);
std::string toString(Strategy strategy);
Role roleFromString(const std::string& s);
Strategy strategyFromString(const std::string& s);

struct NodeConfig
{
    std::uint16_t address = 0;
    Role role = Role::Member;
    Strategy strategy = Strategy::Mcsc;
    std::optional<ChannelIndex> fixedChannel; // SingleChannelAes only
    std::optional<std::uint32_t> fhssPeriod;  // FhssBaseline only
    double traffic = 0.0;                     // Bernoulli arrivals per slot, in [0,1]
    double driftRate = 0.0;
    Millis clockOffsetMs = 0.0; // local minus network time at slot 0
    std::uint32_t queueCapacity = 16;

    friend bool operator==(const NodeConfig&, const NodeConfig&) = default;
};

// Parameters every node of one network shares.
struct NetworkParams
{
    hopping::ChannelPlan plan;
    crypto::AesKey payloadKey;
    hopping::HopSeed initialSeed;
    crypto::AesKey masterKey;
    std::uint64_t seedRotationSlots = 4096;
    Millis slotMs = 10.0;
    std::uint64_t beaconPeriodSlots = 100;
    Millis tMaxOffsetMs = 2.0;
    std::uint32_t maxMissedBeacons = 5;
    Millis propagationMs = 0.0;
    // Slots are laid out on the master's clock; this is its drift against
    // true time, used only to map slots onto the simulator's time axis.
    double masterDriftRate = 0.0;

    Millis tSyncMs() const { return slotMs * static_cast<double>(beaconPeriodSlots); }
    Millis trueSlotMidpointMs(std::uint64_t slot) const;
};

enum class RadioMode
{
    Tx,
    Rx,
    Standby,
};

// Radio at 3.3 V (11.3 mA Tx, 13.5 mA Rx, 0.026 mA standby) plus the MCU at
// 5 V (15 mA active, 0.75 mA asleep). Returns millijoules.
double energyForSlot(RadioMode mode, Millis slotMs);

struct QueuedFrame
{
    crypto::Payload88 plaintext{};
    std::uint64_t enqueueSlot = 0;
};

struct NodeCounters
{
    std::uint64_t offered = 0;
    std::uint64_t sent = 0;
    std::uint64_t queueDrops = 0;
    std::uint64_t received = 0;
    std::uint64_t replayRejected = 0;
    std::uint64_t syncAnomalies = 0; // next-channel header disagreed with the schedule
    std::uint64_t beaconsSent = 0;
    std::uint64_t beaconsReceived = 0;
    std::uint64_t beaconsMissed = 0;
    std::uint64_t beaconCrcFailures = 0;
    std::uint64_t clockCorrections = 0;
    std::uint64_t desyncEvents = 0;
    std::uint64_t rejoins = 0;
    std::uint64_t seedRotations = 0;
    std::uint64_t sequenceWraps = 0;
    double energyMj = 0.0;
};

enum class ReceptionResult
{
    Accepted,
    ReplayRejected,
    Ignored, // data heard while desynchronized, or a beacon not acted on
    BeaconAccepted,
    BeaconCorrupt,
};

struct Reception
{
    std::size_t txIndex = 0;
    ReceptionResult result = ReceptionResult::Ignored;
};

struct TickResult
{
    std::vector<medium::Transmission> transmissions; // for the next slot
    std::vector<Reception> receptions;               // for the slot just resolved
    std::uint32_t queueDrops = 0;                    // arrivals dropped while preparing the next slot
};

// Protocol state machine of one radio. The simulator drives it in two phases
// per slot: after the medium resolves slot s, tick(s, inbox) consumes what was
// heard, books the slot's energy, then prepares slot s + 1 (clock, schedule,
// beacon, one data frame at most).
class Node
{
  public:
    Node(const NodeConfig& config, const NetworkParams& params, Rng rng);

    // Prepares the first slot.
    std::vector<medium::Transmission> start(std::uint64_t slot = 0);

    TickResult tick(std::uint64_t slot, std::span<const medium::Delivery> inbox);

    // Drops the schedule and starts camping on a random channel.
    void forceDesync();

    const NodeConfig& config() const noexcept { return config_; }
    const timesync::ClockModel& clock() const noexcept { return clock_; }
    const timesync::SyncState& sync() const noexcept { return sync_; }
    const hopping::HopState& hop() const noexcept { return hop_; }
    const packet::TxContext& txContext() const noexcept { return tx_; }
    const NodeCounters& counters() const noexcept { return counters_; }
    std::size_t queueLength() const noexcept { return queue_.size(); }

    // State of the prepared slot.
    ChannelIndex tunedChannel() const noexcept { return tunedChannel_; }
    bool transmitting() const noexcept { return transmitting_; }
    std::uint64_t scheduleSlot() const noexcept { return hop_.currentSlot; }
    bool inBeaconSlot() const noexcept { return beaconSlot_; }

    bool hops() const noexcept { return config_.strategy != Strategy::SingleChannelAes; }

  private:
    std::uint32_t prepare(std::uint64_t slot, std::vector<medium::Transmission>& out);
    std::uint64_t estimateSlot() const;
    ChannelIndex dataChannelAt(std::uint64_t scheduleSlot) const;
    ChannelIndex beaconChannelAt(std::uint64_t scheduleSlot) const;
    void updateSchedule(std::uint64_t scheduleSlot);
    void enterDesync();
    void handleBeacon(const medium::Delivery& d, Reception& rec);
    void handleData(const medium::Delivery& d, Reception& rec);

    NodeConfig config_;
    NetworkParams params_;
    Rng rng_;
    hopping::SeedSchedule schedule_;

    timesync::ClockModel clock_;
    timesync::SyncState sync_;
    hopping::HopState hop_;
    packet::TxContext tx_;
    packet::ReplayGuard guard_;
    std::deque<QueuedFrame> queue_;
    NodeCounters counters_;

    std::int64_t slotCorrection_ = 0;
    bool started_ = false;
    ChannelIndex tunedChannel_ = 0;
    bool transmitting_ = false;
    bool beaconSlot_ = false;
};

} // namespace mcsc::node
