#pragma once

#include <cstdint>
#include <optional>

// Evaluation metrics. Every function returns nullopt where the quantity is
// undefined (empty denominator) rather than a misleading 0 or 100.
namespace mcsc::metrics {

// 100 * received / sent. Throws RangeError if received > sent.
std::optional<double> computePdr(std::uint64_t received, std::uint64_t sent);

// Per-frame delay components summed over the delivered frames, in ms.
struct LatencySums
{
    double transMs = 0.0;
    double propMs = 0.0;
    double queueMs = 0.0;
    double procMs = 0.0;
};

struct Latency
{
    double totalMs = 0.0;
    double transMs = 0.0;
    double propMs = 0.0;
    double queueMs = 0.0;
    double procMs = 0.0;
};

// Component means and their sum.
std::optional<Latency> computeLatency(const LatencySums& sums, std::uint64_t count);

// Time to clock the given number of bits out at the given rate, in ms.
double transmissionDelayMs(std::uint64_t bits, std::uint32_t dataRateKbps);

// delivered bits / seconds / 1000.
std::optional<double> computeThroughput(std::uint64_t deliveredBits, double elapsedSeconds);

// 100 * beacons / (beacons + data frames).
std::optional<double> computeSyncOverhead(std::uint64_t beacons, std::uint64_t dataFrames);

// 100 * corrupt / delivered. Throws RangeError if corrupt > delivered.
std::optional<double> computeErrorRate(std::uint64_t corruptDelivered, std::uint64_t deliveredTotal);

// 100 * successes / attempts.
std::optional<double> attackSuccessPct(std::uint64_t successes, std::uint64_t attempts);

// 100 - attack success, as defense rates are usually reported.
std::optional<double> defensePct(std::optional<double> attackSuccessPct);

} // namespace mcsc::metrics
