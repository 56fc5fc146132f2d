#include "mcsc/timesync.hpp"

#include "mcsc/error.hpp"

#include <cmath>
#include <string>

namespace mcsc::timesync {

namespace {

std::int64_t toNs(Millis ms)
{
    return std::llround(ms * 1e6);
}

Millis toMs(std::int64_t ns)
{
    return static_cast<Millis>(ns) / 1e6;
}

} // namespace

ClockModel::ClockModel(double driftRate, Millis localTimeMs, Millis trueTimeMs)
    : driftRate_(driftRate), trueOriginNs_(toNs(trueTimeMs)), localOriginNs_(toNs(localTimeMs)),
      trueNowNs_(trueOriginNs_)
{
    if (!(driftRate > -1.0))
        throw InvalidConfig("drift_rate must exceed -1");
}

Millis ClockModel::trueTimeMs() const noexcept
{
    return toMs(trueNowNs_);
}

std::int64_t ClockModel::localTimeNs() const noexcept
{
    const std::int64_t elapsed = trueNowNs_ - trueOriginNs_;
    return localOriginNs_ + elapsed + std::llround(static_cast<double>(elapsed) * driftRate_);
}

Millis ClockModel::localTimeMs() const noexcept
{
    return toMs(localTimeNs());
}

ClockModel ClockModel::withLocalTime(Millis localMs) const
{
    ClockModel c = *this;
    c.trueOriginNs_ = trueNowNs_;
    c.localOriginNs_ = toNs(localMs);
    return c;
}

ClockModel advanceClock(const ClockModel& clock, Millis trueDtMs)
{
    if (trueDtMs < 0.0)
        throw RangeError("clock cannot advance by a negative interval");
    ClockModel c = clock;
    c.trueNowNs_ += toNs(trueDtMs);
    return c;
}

Millis timeOffset(Millis tReceiver, Millis tSender)
{
    return std::fabs(tReceiver - tSender);
}

Millis maxDrift(Millis tSyncMs, double driftRate)
{
    if (!(tSyncMs > 0.0))
        throw InvalidConfig("t_sync must be positive, got " + std::to_string(tSyncMs));
    return tSyncMs * std::fabs(driftRate);
}

Millis maxRelativeDrift(Millis tSyncMs, double driftRate1, double driftRate2)
{
    return maxDrift(tSyncMs, std::fabs(driftRate1) + std::fabs(driftRate2));
}

bool inSync(Millis offset, Millis deltaT)
{
    return offset <= deltaT;
}

Millis resynchronize(Millis tOld, Millis tReceiver, Millis tSender)
{
    // std::round already breaks ties away from zero.
    return tOld + std::round((tReceiver - tSender) / 2.0);
}

SyncOutcome processSyncSignal(const SyncState& state, const ClockModel& clock, const SyncSignal& signal)
{
    if (state.lastBeaconSlot && signal.slotIndex <= *state.lastBeaconSlot)
        return SyncOutcome{state, clock, false, false};

    SyncOutcome out{state, clock, true, false};
    out.state.lastBeaconSlot = signal.slotIndex;
    out.state.status = SyncStatus::Synced;
    out.state.campedChannel.reset();
    out.state.missedBeacons = 0;

    const Millis local = clock.localTimeMs();
    const Millis offset = timeOffset(local, signal.masterTimeMs);
    if (!inSync(offset, state.tMaxOffsetMs)) {
        out.clock = clock.withLocalTime(resynchronize(signal.masterTimeMs, local, signal.masterTimeMs));
        out.corrected = true;
    }
    return out;
}

SyncState desynchronize(const SyncState& state, hopping::ChannelIndex campChannel)
{
    SyncState s = state;
    s.status = SyncStatus::Desynced;
    s.campedChannel = campChannel;
    return s;
}

} // namespace mcsc::timesync
