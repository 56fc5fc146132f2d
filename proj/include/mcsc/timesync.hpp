#pragma once

#include "mcsc/hopping.hpp"

#include <cstdint>
#include <optional>

namespace mcsc::timesync {

// Milliseconds at API boundaries. Clocks store integer nanoseconds internally
// so drift arithmetic does not accumulate floating-point error.
using Millis = double;

// A drifting oscillator anchored at (true origin, local origin):
//   local(t) = localOrigin + (t - trueOrigin) * (1 + driftRate)
class ClockModel
{
  public:
    ClockModel() = default;
    explicit ClockModel(double driftRate, Millis localTimeMs = 0.0, Millis trueTimeMs = 0.0);

    double driftRate() const noexcept { return driftRate_; }
    Millis trueTimeMs() const noexcept;
    Millis localTimeMs() const noexcept;
    std::int64_t localTimeNs() const noexcept;

    // Steps the local reading to localMs at the current true instant.
    ClockModel withLocalTime(Millis localMs) const;

    friend bool operator==(const ClockModel&, const ClockModel&) = default;

  private:
    friend ClockModel advanceClock(const ClockModel& clock, Millis trueDtMs);

    double driftRate_ = 0.0;
    std::int64_t trueOriginNs_ = 0;
    std::int64_t localOriginNs_ = 0;
    std::int64_t trueNowNs_ = 0;
};

// Throws RangeError for negative trueDtMs.
ClockModel advanceClock(const ClockModel& clock, Millis trueDtMs);

enum class SyncStatus
{
    Synced,
    Desynced,
};

struct SyncState
{
    SyncStatus status = SyncStatus::Synced;
    Millis tSyncIntervalMs = 1000.0;
    Millis tMaxOffsetMs = 2.0;
    std::optional<std::uint64_t> lastBeaconSlot;
    std::optional<hopping::ChannelIndex> campedChannel; // present iff Desynced
    std::uint32_t missedBeacons = 0;

    friend bool operator==(const SyncState&, const SyncState&) = default;
};

struct SyncSignal
{
    Millis masterTimeMs = 0.0;
    std::uint64_t seedEpoch = 0;
    std::uint64_t slotIndex = 0;

    friend bool operator==(const SyncSignal&, const SyncSignal&) = default;
};

// |tReceiver - tSender|
Millis timeOffset(Millis tReceiver, Millis tSender);

// tSync * |driftRate|. Throws InvalidConfig when tSync <= 0.
Millis maxDrift(Millis tSyncMs, double driftRate);

// Worst-case divergence of two free-running clocks over one interval:
// tSync * (|r1| + |r2|).
Millis maxRelativeDrift(Millis tSyncMs, double driftRate1, double driftRate2);

// offset <= deltaT, boundary inclusive.
bool inSync(Millis offset, Millis deltaT);

// tOld + (tReceiver - tSender) / 2, the half-difference rounded to the nearest
// millisecond with ties away from zero.
Millis resynchronize(Millis tOld, Millis tReceiver, Millis tSender);

struct SyncOutcome
{
    SyncState state;
    ClockModel clock;
    bool accepted = false;  // false for stale or repeated signals
    bool corrected = false; // the clock was stepped
};

// Beacon handling. Within tMaxOffset the clock is left alone; beyond it the
// local clock moves to the midpoint between its reading and the master time
// (resynchronize with tOld = master time). Signals whose slot is not newer
// than the last accepted beacon are ignored.
SyncOutcome processSyncSignal(const SyncState& state, const ClockModel& clock, const SyncSignal& signal);

// Enter the camping state on the given rejoin channel.
SyncState desynchronize(const SyncState& state, hopping::ChannelIndex campChannel);

} // namespace mcsc::timesync
