#include "mcsc/metrics.hpp"

#include "mcsc/error.hpp"

#include <string>

namespace mcsc::metrics {

namespace {

std::optional<double> percent(std::uint64_t part, std::uint64_t whole)
{
    if (whole == 0)
        return std::nullopt;
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

} // namespace

std::optional<double> computePdr(std::uint64_t received, std::uint64_t sent)
{
    if (received > sent)
        throw RangeError("received " + std::to_string(received) + " exceeds sent " + std::to_string(sent));
    return percent(received, sent);
}

std::optional<Latency> computeLatency(const LatencySums& sums, std::uint64_t count)
{
    if (count == 0)
        return std::nullopt;
    const double n = static_cast<double>(count);
    Latency l;
    l.transMs = sums.transMs / n;
    l.propMs = sums.propMs / n;
    l.queueMs = sums.queueMs / n;
    l.procMs = sums.procMs / n;
    l.totalMs = l.transMs + l.propMs + l.queueMs + l.procMs;
    return l;
}

double transmissionDelayMs(std::uint64_t bits, std::uint32_t dataRateKbps)
{
    if (dataRateKbps == 0)
        throw RangeError("data rate must be positive");
    // bits / (kbit/s) = ms
    return static_cast<double>(bits) / static_cast<double>(dataRateKbps);
}

std::optional<double> computeThroughput(std::uint64_t deliveredBits, double elapsedSeconds)
{
    if (!(elapsedSeconds > 0.0))
        return std::nullopt;
    return static_cast<double>(deliveredBits) / elapsedSeconds / 1000.0;
}

std::optional<double> computeSyncOverhead(std::uint64_t beacons, std::uint64_t dataFrames)
{
    return percent(beacons, beacons + dataFrames);
}

std::optional<double> computeErrorRate(std::uint64_t corruptDelivered, std::uint64_t deliveredTotal)
{
    if (corruptDelivered > deliveredTotal)
        throw RangeError("corrupt count exceeds delivered count");
    return percent(corruptDelivered, deliveredTotal);
}

std::optional<double> attackSuccessPct(std::uint64_t successes, std::uint64_t attempts)
{
    if (successes > attempts)
        throw RangeError("attack successes exceed attempts");
    return percent(successes, attempts);
}

std::optional<double> defensePct(std::optional<double> attackSuccessPct)
{
    if (!attackSuccessPct)
        return std::nullopt;
    return 100.0 - *attackSuccessPct;
}

} // namespace mcsc::metrics
