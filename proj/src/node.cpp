#include "mcsc/node.hpp"

#include "mcsc/error.hpp"

#include <algorithm>
#include <cmath>

namespace mcsc::node {

namespace {

constexpr double kRadioVolts = 3.3;
constexpr double kMcuVolts = 5.0;
constexpr double kRadioTxMa = 11.3;
constexpr double kRadioRxMa = 13.5;
constexpr double kRadioStandbyMa = 0.026;
constexpr double kMcuActiveMa = 15.0;
constexpr double kMcuSleepMa = 0.75;

} // namespace

std::string toString(Role role)
{
    return role == Role::Master ? "MASTER" : "MEMBER";
}

std::string toString(Strategy strategy)
{
    switch (strategy) {
    case Strategy::Mcsc:
        return "MCSC";
    case Strategy::SingleChannelAes:
        return "SINGLE_CHANNEL_AES";
    case Strategy::FhssBaseline:
        return "FHSS_BASELINE";
    }
    return "?";
}

Role roleFromString(const std::string& s)
{
    if (s == "MASTER")
        return Role::Master;
    if (s == "MEMBER")
        return Role::Member;
    throw ValidationError("role", "unknown role '" + s + "'");
}

Strategy strategyFromString(const std::string& s)
{
    for (auto st : {Strategy::Mcsc, Strategy::SingleChannelAes, Strategy::FhssBaseline})
        if (toString(st) == s)
            return st;
    throw ValidationError("strategy", "unknown strategy '" + s + "'");
}

Millis NetworkParams::trueSlotMidpointMs(std::uint64_t slot) const
{
    return (static_cast<double>(slot) + 0.5) * slotMs / (1.0 + masterDriftRate);
}

double energyForSlot(RadioMode mode, Millis slotMs)
{
    double radioMa = kRadioStandbyMa;
    double mcuMa = kMcuSleepMa;
    if (mode == RadioMode::Tx) {
        radioMa = kRadioTxMa;
        mcuMa = kMcuActiveMa;
    } else if (mode == RadioMode::Rx) {
        radioMa = kRadioRxMa;
        mcuMa = kMcuActiveMa;
    }
    // mA * V = mW; mW * ms = uJ.
    return (radioMa * kRadioVolts + mcuMa * kMcuVolts) * slotMs / 1000.0;
}

Node::Node(const NodeConfig& config, const NetworkParams& params, Rng rng)
    : config_(config), params_(params), rng_(std::move(rng)),
      schedule_(params.initialSeed, params.masterKey, params.seedRotationSlots),
      clock_(config.driftRate, config.clockOffsetMs, 0.0)
{
    params_.plan.validate();
    if (config_.strategy == Strategy::SingleChannelAes && !config_.fixedChannel)
        throw ValidationError("fixed_channel", "required for SINGLE_CHANNEL_AES");
    if (config_.strategy == Strategy::FhssBaseline && (!config_.fhssPeriod || *config_.fhssPeriod == 0))
        throw ValidationError("fhss_period", "required for FHSS_BASELINE");
    if (config_.fixedChannel && *config_.fixedChannel >= params_.plan.channelCount)
        throw ValidationError("fixed_channel", "outside the channel plan");
    if (params_.beaconPeriodSlots == 0)
        throw ValidationError("beacon_period_slots", "must be positive");

    sync_.tSyncIntervalMs = params_.tSyncMs();
    sync_.tMaxOffsetMs = params_.tMaxOffsetMs;
    hop_ = hopping::makeHopState(params_.plan, params_.initialSeed, 0);
    tx_.key = params_.payloadKey;
    tx_.nodeAddress = config_.address;
}

std::vector<medium::Transmission> Node::start(std::uint64_t slot)
{
    std::vector<medium::Transmission> out;
    prepare(slot, out);
    started_ = true;
    return out;
}

void Node::forceDesync()
{
    enterDesync();
}

void Node::enterDesync()
{
    const ChannelIndex camp = hops() ? hopping::resyncChannel(rng_, params_.plan) : *config_.fixedChannel;
    sync_ = timesync::desynchronize(sync_, camp);
    ++counters_.desyncEvents;
}

std::uint64_t Node::estimateSlot() const
{
    const auto base = static_cast<std::int64_t>(std::floor(clock_.localTimeMs() / params_.slotMs));
    return static_cast<std::uint64_t>(std::max<std::int64_t>(0, base + slotCorrection_));
}

ChannelIndex Node::dataChannelAt(std::uint64_t scheduleSlot) const
{
    switch (config_.strategy) {
    case Strategy::Mcsc:
        return schedule_.channelAt(scheduleSlot, params_.plan);
    case Strategy::SingleChannelAes:
        return *config_.fixedChannel;
    case Strategy::FhssBaseline:
        return hopping::cyclicChannel(scheduleSlot, *config_.fhssPeriod, params_.plan);
    }
    return 0;
}

ChannelIndex Node::beaconChannelAt(std::uint64_t scheduleSlot) const
{
    switch (config_.strategy) {
    case Strategy::Mcsc:
        return hopping::beaconChannel(scheduleSlot / params_.beaconPeriodSlots, params_.plan);
    case Strategy::SingleChannelAes:
        return *config_.fixedChannel;
    case Strategy::FhssBaseline:
        return hopping::cyclicChannel(scheduleSlot, *config_.fhssPeriod, params_.plan);
    }
    return 0;
}

void Node::updateSchedule(std::uint64_t scheduleSlot)
{
    if (config_.strategy != Strategy::Mcsc) {
        hop_.currentSlot = scheduleSlot;
        hop_.currentChannel = dataChannelAt(scheduleSlot);
        return;
    }
    const std::uint64_t epoch = schedule_.epochForSlot(scheduleSlot);
    if (started_ && scheduleSlot == hop_.currentSlot + 1 && epoch == hop_.seed.epoch) {
        hop_ = hopping::advance(hop_).first;
        return;
    }
    if (started_ && epoch > hop_.seed.epoch)
        counters_.seedRotations += epoch - hop_.seed.epoch;
    hop_ = hopping::makeHopState(params_.plan, schedule_.seedForEpoch(epoch), scheduleSlot);
}

std::uint32_t Node::prepare(std::uint64_t slot, std::vector<medium::Transmission>& out)
{
    clock_ = timesync::advanceClock(clock_, std::max(0.0, params_.trueSlotMidpointMs(slot) - clock_.trueTimeMs()));

    const std::uint64_t est = estimateSlot();
    updateSchedule(est);
    beaconSlot_ = est % params_.beaconPeriodSlots == 0;
    transmitting_ = false;

    const bool synced = sync_.status == timesync::SyncStatus::Synced;
    if (!synced)
        tunedChannel_ = *sync_.campedChannel;
    else if (beaconSlot_)
        tunedChannel_ = beaconChannelAt(est);
    else
        tunedChannel_ = hop_.currentChannel;

    if (config_.role == Role::Master && beaconSlot_ && synced) {
        timesync::SyncSignal signal{clock_.localTimeMs(), schedule_.epochForSlot(est), est};
        medium::Transmission t;
        t.sender = config_.address;
        t.channel = tunedChannel_;
        t.slot = slot;
        t.kind = medium::TxKind::Beacon;
        t.bytes = packet::encodeBeacon(signal);
        t.enqueueSlot = slot;
        out.push_back(t);
        ++counters_.beaconsSent;
        transmitting_ = true;
    }

    std::uint32_t drops = 0;
    if (rng_.bernoulli(config_.traffic)) {
        ++counters_.offered;
        if (queue_.size() >= config_.queueCapacity) {
            ++drops;
            ++counters_.queueDrops;
        } else {
            QueuedFrame f;
            for (auto& b : f.plaintext)
                b = static_cast<std::uint8_t>(rng_.uniformIndex(256));
            f.enqueueSlot = slot;
            queue_.push_back(f);
        }
    }

    if (synced && !beaconSlot_ && !transmitting_ && !queue_.empty()) {
        const QueuedFrame f = queue_.front();
        queue_.pop_front();
        packet::BuildResult built = config_.strategy == Strategy::Mcsc
                                        ? packet::buildFrame(tx_, hop_, sync_.status, f.plaintext)
                                        : packet::buildFrame(tx_, est, dataChannelAt(est + 1), sync_.status, f.plaintext);
        tx_ = built.context;
        if (built.wrapped)
            ++counters_.sequenceWraps;
        medium::Transmission t;
        t.sender = config_.address;
        t.channel = tunedChannel_;
        t.slot = slot;
        t.kind = medium::TxKind::Data;
        t.bytes = packet::serialize(built.frame);
        t.enqueueSlot = f.enqueueSlot;
        out.push_back(t);
        ++counters_.sent;
        transmitting_ = true;
    }
    return drops;
}

void Node::handleBeacon(const medium::Delivery& d, Reception& rec)
{
    if (config_.role == Role::Master)
        return;
    auto signal = packet::decodeBeacon(d.bytes, params_.seedRotationSlots);
    if (!signal) {
        rec.result = ReceptionResult::BeaconCorrupt;
        ++counters_.beaconCrcFailures;
        return;
    }
    // Reception happens one propagation delay after the master stamped the beacon.
    signal->masterTimeMs += params_.propagationMs;
    const timesync::ClockModel atReception = timesync::advanceClock(clock_, params_.propagationMs);
    const bool wasDesynced = sync_.status == timesync::SyncStatus::Desynced;

    const timesync::SyncOutcome outcome = timesync::processSyncSignal(sync_, atReception, *signal);
    if (!outcome.accepted)
        return;
    clock_ = outcome.clock;
    sync_ = outcome.state;
    ++counters_.beaconsReceived;
    rec.result = ReceptionResult::BeaconAccepted;
    if (outcome.corrected)
        ++counters_.clockCorrections;
    if (outcome.corrected || wasDesynced) {
        // Adopt the master's slot numbering at the slot midpoint.
        const auto base = static_cast<std::int64_t>(
            std::floor((clock_.localTimeMs() - params_.propagationMs) / params_.slotMs));
        slotCorrection_ = static_cast<std::int64_t>(signal->slotIndex) - base;
        hop_.seed = schedule_.seedForEpoch(signal->seedEpoch);
    }
    if (wasDesynced)
        ++counters_.rejoins;
}

void Node::handleData(const medium::Delivery& d, Reception& rec)
{
    if (sync_.status != timesync::SyncStatus::Synced)
        return;
    const packet::Frame frame = packet::deserialize(d.bytes);
    if (frame.nodeAddress == config_.address)
        return; // our own frame played back to us
    const packet::OpenResult opened = packet::openFrame(params_.payloadKey, frame, hop_.currentSlot, guard_);
    if (opened.status == packet::OpenStatus::ReplayRejected) {
        rec.result = ReceptionResult::ReplayRejected;
        ++counters_.replayRejected;
        return;
    }
    rec.result = ReceptionResult::Accepted;
    ++counters_.received;

    // The header hint is advisory; the locally computed schedule wins.
    const ChannelIndex expected =
        config_.strategy == Strategy::Mcsc
            ? hopping::prngIndex(hop_.seed, hop_.currentSlot + 1, params_.plan.channelCount)
            : dataChannelAt(hop_.currentSlot + 1);
    if (opened.nextChannel != expected)
        ++counters_.syncAnomalies;
}

TickResult Node::tick(std::uint64_t slot, std::span<const medium::Delivery> inbox)
{
    TickResult result;
    bool beaconAccepted = false;

    // Beacons first so a rejoining node decodes this slot's data on the new schedule.
    for (const auto& d : inbox) {
        if (d.kind != medium::TxKind::Beacon)
            continue;
        Reception rec{d.txIndex, ReceptionResult::Ignored};
        handleBeacon(d, rec);
        beaconAccepted = beaconAccepted || rec.result == ReceptionResult::BeaconAccepted;
        result.receptions.push_back(rec);
    }
    for (const auto& d : inbox) {
        if (d.kind != medium::TxKind::Data)
            continue;
        Reception rec{d.txIndex, ReceptionResult::Ignored};
        handleData(d, rec);
        result.receptions.push_back(rec);
    }

    if (config_.role == Role::Member && beaconSlot_ && !beaconAccepted) {
        if (sync_.status == timesync::SyncStatus::Synced) {
            ++sync_.missedBeacons;
            ++counters_.beaconsMissed;
            if (hops() && sync_.missedBeacons >= params_.maxMissedBeacons)
                enterDesync();
        } else if (hops()) {
            // Still lost: try another channel for the next beacon.
            sync_.campedChannel = hopping::resyncChannel(rng_, params_.plan);
        }
    }

    const RadioMode mode = transmitting_ ? RadioMode::Tx : (inbox.empty() ? RadioMode::Standby : RadioMode::Rx);
    counters_.energyMj += energyForSlot(mode, params_.slotMs);

    result.queueDrops = prepare(slot + 1, result.transmissions);
    return result;
}

} // namespace mcsc::node
