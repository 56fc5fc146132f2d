#include "mcsc/medium.hpp"

#include "mcsc/error.hpp"

#include <algorithm>
#include <numeric>

namespace mcsc::medium {

namespace {

void checkProbability(double p, const std::string& field)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError(field, "probability must be in [0,1]");
}

} // namespace

std::string toString(TxKind kind)
{
    return kind == TxKind::Data ? "DATA" : "BEACON";
}

TxKind txKindFromString(const std::string& s)
{
    if (s == "DATA")
        return TxKind::Data;
    if (s == "BEACON")
        return TxKind::Beacon;
    throw LogFormatError("unknown transmission kind '" + s + "'");
}

std::string toString(Outcome outcome)
{
    switch (outcome) {
    case Outcome::Delivered:
        return "delivered";
    case Outcome::CorruptDelivered:
        return "corrupt";
    case Outcome::Collided:
        return "collided";
    case Outcome::Jammed:
        return "jammed";
    case Outcome::InterferenceLost:
        return "lost";
    }
    return "?";
}

Outcome outcomeFromString(const std::string& s)
{
    for (Outcome o : {Outcome::Delivered, Outcome::CorruptDelivered, Outcome::Collided, Outcome::Jammed,
                      Outcome::InterferenceLost})
        if (toString(o) == s)
            return o;
    throw LogFormatError("unknown outcome '" + s + "'");
}

std::string toString(InterferenceLevel level)
{
    switch (level) {
    case InterferenceLevel::Low:
        return "LOW";
    case InterferenceLevel::Medium:
        return "MEDIUM";
    case InterferenceLevel::High:
        return "HIGH";
    case InterferenceLevel::Custom:
        return "CUSTOM";
    }
    return "?";
}

InterferenceLevel interferenceLevelFromString(const std::string& s)
{
    for (auto l : {InterferenceLevel::Low, InterferenceLevel::Medium, InterferenceLevel::High,
                   InterferenceLevel::Custom})
        if (toString(l) == s)
            return l;
    throw ValidationError("interference.name", "unknown level '" + s + "'");
}

void InterferenceScenario::validate(const hopping::ChannelPlan& plan) const
{
    checkProbability(perPacketLossProb, "interference.per_packet_loss_prob");
    checkProbability(bitErrorProb, "interference.bit_error_prob");
    for (std::size_t i = 0; i < narrowband.size(); ++i) {
        const std::string field = "interference.narrowband[" + std::to_string(i) + "]";
        if (narrowband[i].channel >= plan.channelCount)
            throw ValidationError(field + ".channel", "outside the channel plan");
        checkProbability(narrowband[i].lossProb, field + ".loss_prob");
    }
}

std::string toString(JammerMode mode)
{
    switch (mode) {
    case JammerMode::Fixed:
        return "FIXED";
    case JammerMode::Sweeping:
        return "SWEEPING";
    case JammerMode::Wideband:
        return "WIDEBAND";
    case JammerMode::Random:
        return "RANDOM";
    case JammerMode::Adaptive:
        return "ADAPTIVE";
    }
    return "?";
}

JammerMode jammerModeFromString(const std::string& s)
{
    for (auto m : {JammerMode::Fixed, JammerMode::Sweeping, JammerMode::Wideband, JammerMode::Random,
                   JammerMode::Adaptive})
        if (toString(m) == s)
            return m;
    throw ValidationError("jammer.mode", "unknown mode '" + s + "'");
}

void JammerConfig::validate(const hopping::ChannelPlan& plan) const
{
    if (mode == JammerMode::Fixed) {
        if (!targetChannel)
            throw ValidationError("jammer.target_channel", "required for FIXED mode");
    } else if (channelsPerSlot < 1 || channelsPerSlot > plan.channelCount) {
        throw ValidationError("jammer.channels_per_slot", "must be in 1..channel_count");
    }
    if (targetChannel && *targetChannel >= plan.channelCount)
        throw ValidationError("jammer.target_channel", "outside the channel plan");
    if (mode == JammerMode::Adaptive && maxLag < 1)
        throw ValidationError("jammer.max_lag", "must be positive");
}

Jammer::Jammer(const JammerConfig& config, const hopping::ChannelPlan& plan, Rng rng)
    : config_(config), plan_(plan), rng_(std::move(rng))
{
    config_.validate(plan_);
    if (config_.mode == JammerMode::Adaptive) {
        history_.resize(4 * static_cast<std::size_t>(config_.maxLag) + 1);
        consistent_.assign(config_.maxLag + 1, true);
        matches_.assign(config_.maxLag + 1, 0);
    }
}

void Jammer::fillRandom(std::vector<bool>& jam, std::uint32_t count)
{
    std::uint32_t have = static_cast<std::uint32_t>(std::count(jam.begin(), jam.end(), true));
    if (count >= plan_.channelCount) {
        std::fill(jam.begin(), jam.end(), true);
        return;
    }
    while (have < count) {
        const auto c = rng_.uniformIndex(plan_.channelCount);
        if (!jam[c]) {
            jam[c] = true;
            ++have;
        }
    }
}

std::optional<std::uint32_t> Jammer::lockedPeriod() const
{
    // Repeated confirmations guard against chance agreement of random sequences.
    constexpr std::uint32_t kMinMatches = 3;
    for (std::uint32_t lag = 1; lag < consistent_.size(); ++lag)
        if (consistent_[lag] && matches_[lag] >= kMinMatches)
            return lag;
    return std::nullopt;
}

std::vector<bool> Jammer::jammedChannels(std::uint64_t slot)
{
    const std::uint32_t n = plan_.channelCount;
    const std::uint32_t k = config_.channelsPerSlot;
    std::vector<bool> jam(n, false);
    switch (config_.mode) {
    case JammerMode::Fixed:
        jam[*config_.targetChannel] = true;
        break;
    case JammerMode::Sweeping: {
        const std::uint64_t start = (slot * k) % n;
        for (std::uint32_t i = 0; i < k; ++i)
            jam[(start + i) % n] = true;
        break;
    }
    case JammerMode::Wideband: {
        const std::uint32_t start = config_.targetChannel.value_or(0);
        for (std::uint32_t i = 0; i < k; ++i)
            jam[(start + i) % n] = true;
        break;
    }
    case JammerMode::Random:
        fillRandom(jam, k);
        break;
    case JammerMode::Adaptive: {
        // Any earlier period of the locked pattern predicts this slot.
        if (const auto lag = lockedPeriod()) {
            for (std::uint64_t back = *lag; back < history_.size() && back <= slot; back += *lag) {
                const Sample& past = history_[(slot - back) % history_.size()];
                if (past.valid && past.slot == slot - back) {
                    jam[past.channel] = true;
                    break;
                }
            }
        }
        fillRandom(jam, k);
        break;
    }
    }
    return jam;
}

void Jammer::observe(std::uint64_t slot, std::span<const Transmission> transmissions)
{
    if (config_.mode != JammerMode::Adaptive)
        return;
    const auto it = std::find_if(transmissions.begin(), transmissions.end(), [](const Transmission& t) {
        return t.kind == TxKind::Data && !t.injected;
    });
    if (it == transmissions.end())
        return;
    const ChannelIndex channel = it->channel;
    for (std::uint32_t lag = 1; lag < consistent_.size(); ++lag) {
        if (!consistent_[lag] || slot < lag)
            continue;
        const Sample& past = history_[(slot - lag) % history_.size()];
        if (!past.valid || past.slot != slot - lag)
            continue;
        if (past.channel == channel)
            ++matches_[lag];
        else
            consistent_[lag] = false;
    }
    history_[slot % history_.size()] = Sample{slot, channel, true};
}

Eavesdropper::Eavesdropper(const EavesdropperConfig& config, const hopping::ChannelPlan& plan)
    : monitored_(plan.channelCount, false)
{
    for (std::size_t i = 0; i < config.monitoredChannels.size(); ++i) {
        const auto c = config.monitoredChannels[i];
        if (c >= plan.channelCount)
            throw ValidationError("eavesdropper.channels[" + std::to_string(i) + "]", "outside the channel plan");
        monitored_[c] = true;
    }
}

bool Eavesdropper::monitors(ChannelIndex channel) const
{
    return channel < monitored_.size() && monitored_[channel];
}

void Eavesdropper::capture(std::uint64_t slot, ChannelIndex channel, const packet::WireBytes& bytes)
{
    log_.push_back(Capture{slot, channel, bytes});
}

std::optional<double> eavesdropSuccessRate(std::size_t capturedFrames, std::uint64_t totalFrames)
{
    if (totalFrames == 0)
        return std::nullopt;
    return static_cast<double>(capturedFrames) / static_cast<double>(totalFrames);
}

std::optional<double> eavesdropSuccessRate(const std::vector<Capture>& log, std::uint64_t totalFrames)
{
    return eavesdropSuccessRate(log.size(), totalFrames);
}

std::string toString(ReplayChannelPolicy policy)
{
    return policy == ReplayChannelPolicy::Captured ? "CAPTURED" : "RANDOM";
}

ReplayChannelPolicy replayPolicyFromString(const std::string& s)
{
    if (s == "CAPTURED")
        return ReplayChannelPolicy::Captured;
    if (s == "RANDOM")
        return ReplayChannelPolicy::Random;
    throw ValidationError("replayer.channel_policy", "unknown policy '" + s + "'");
}

Transmission replayInject(const std::vector<Capture>& log, const hopping::ChannelPlan& plan, std::uint64_t slot,
                          ReplayChannelPolicy policy, std::uint16_t attackerAddress, Rng& rng)
{
    if (log.empty())
        throw RangeError("replay needs at least one captured frame");
    const Capture& pick = log[rng.uniformIndex(log.size())];
    Transmission t;
    t.sender = attackerAddress;
    t.slot = slot;
    t.kind = TxKind::Data;
    t.bytes = pick.bytes;
    t.injected = true;
    t.enqueueSlot = slot;
    t.channel = policy == ReplayChannelPolicy::Captured ? pick.channel
                                                        : static_cast<ChannelIndex>(rng.uniformIndex(plan.channelCount));
    return t;
}

SlotResult resolveSlot(std::uint64_t slot, std::span<const Transmission> transmissions,
                       std::span<const Listener> listeners, const InterferenceScenario& scenario,
                       const hopping::ChannelPlan& plan, Jammer* jammer, Eavesdropper* eavesdropper, Rng& rng)
{
    SlotResult result;
    result.jammed = jammer ? jammer->jammedChannels(slot) : std::vector<bool>(plan.channelCount, false);

    std::vector<std::uint32_t> perChannel(plan.channelCount, 0);
    for (const auto& t : transmissions) {
        if (t.slot != slot)
            throw ConsistencyError("transmission for slot " + std::to_string(t.slot) + " resolved in slot " +
                                   std::to_string(slot));
        if (t.channel >= plan.channelCount)
            throw ConsistencyError("transmission on channel outside the plan");
        ++perChannel[t.channel];
    }

    std::vector<double> narrowbandLoss(plan.channelCount, 0.0);
    for (const auto& nb : scenario.narrowband)
        narrowbandLoss[nb.channel] = 1.0 - (1.0 - narrowbandLoss[nb.channel]) * (1.0 - nb.lossProb);

    result.events.reserve(transmissions.size());
    for (std::size_t i = 0; i < transmissions.size(); ++i) {
        const Transmission& t = transmissions[i];
        MediumEvent ev;
        ev.slot = slot;
        ev.channel = t.channel;
        ev.sender = t.sender;
        ev.kind = t.kind;
        ev.injected = t.injected;
        ev.enqueueSlot = t.enqueueSlot;

        if (perChannel[t.channel] >= 2) {
            ev.outcome = Outcome::Collided;
            result.events.push_back(ev);
            continue;
        }
        if (result.jammed[t.channel]) {
            ev.outcome = Outcome::Jammed;
            result.events.push_back(ev);
            continue;
        }

        // The eavesdropper sits elsewhere, so receiver-side loss does not stop it.
        if (eavesdropper && t.kind == TxKind::Data && !t.injected && eavesdropper->monitors(t.channel)) {
            eavesdropper->capture(slot, t.channel, t.bytes);
            ev.captured = true;
        }

        if (rng.bernoulli(narrowbandLoss[t.channel]) || rng.bernoulli(scenario.perPacketLossProb)) {
            ev.outcome = Outcome::InterferenceLost;
            result.events.push_back(ev);
            continue;
        }

        packet::WireBytes bytes = t.bytes;
        bool flipped = false;
        if (scenario.bitErrorProb > 0.0) {
            for (std::size_t bit = 0; bit < packet::kFrameBits; ++bit) {
                if (rng.bernoulli(scenario.bitErrorProb)) {
                    bytes[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
                    flipped = true;
                }
            }
        }
        ev.outcome = flipped ? Outcome::CorruptDelivered : Outcome::Delivered;

        for (const auto& l : listeners) {
            if (l.channel != t.channel || l.address == t.sender)
                continue;
            result.inboxes[l.address].push_back(Delivery{i, t.kind, t.channel, bytes});
            ++ev.receivers;
        }
        result.events.push_back(ev);
    }

    if (jammer)
        jammer->observe(slot, transmissions);
    return result;
}

} // namespace mcsc::medium
