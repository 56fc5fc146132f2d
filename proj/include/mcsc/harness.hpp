#pragma once

#include "mcsc/config.hpp"
#include "mcsc/medium.hpp"
#include "mcsc/metrics.hpp"
#include "mcsc/node.hpp"
#include "mcsc/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mcsc::harness {

// ---- Event log ------------------------------------------------------------
// JSON lines: one header, then one record per transmission, one per queue
// drop, and a per-node energy trailer. Everything the metrics need is in the
// log, so metrics re-derived from a saved log match the live run exactly.

struct LogHeader
{
    std::string scenario;
    node::Strategy strategy = node::Strategy::Mcsc;
    std::uint64_t totalSlots = 0;
    double slotMs = 0.0;
    double propagationMs = 0.0;
    double processingMs = 0.0;
    std::uint32_t dataRateKbps = 250;
    std::uint64_t rngSeed = 0;
    bool jammer = false;
    bool eavesdropper = false;
    bool replayer = false;

    friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct TxRecord
{
    medium::MediumEvent event;
    std::uint32_t accepted = 0;       // receivers whose open succeeded
    std::uint32_t replayRejected = 0; // receivers whose replay window refused it

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

struct DropRecord
{
    std::uint64_t slot = 0;
    std::uint16_t node = 0;

    friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

struct EnergyRecord
{
    std::uint16_t node = 0;
    double energyMj = 0.0;

    friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

struct EventLog
{
    LogHeader header;
    std::vector<TxRecord> transmissions;
    std::vector<DropRecord> drops;
    std::vector<EnergyRecord> energy;

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

void writeEventLog(std::ostream& out, const EventLog& log);
// Throws LogFormatError on malformed input.
EventLog readEventLog(std::istream& in);

// ---- Metrics ----------------------------------------------------------------

struct ScenarioMetrics
{
    std::string scenario;
    node::Strategy strategy = node::Strategy::Mcsc;

    std::uint64_t sent = 0;     // legitimate data frames put on air
    std::uint64_t received = 0; // of those, accepted by at least one node
    std::uint64_t corrupt = 0;  // received with bit errors
    std::uint64_t beacons = 0;
    std::uint64_t queueDrops = 0;
    std::uint64_t jammedFrames = 0;
    std::uint64_t capturedFrames = 0;
    std::uint64_t injections = 0;
    std::uint64_t replaysAccepted = 0;

    std::optional<double> pdrPct;
    std::optional<metrics::Latency> latency;
    std::optional<double> throughputKbps;
    std::vector<EnergyRecord> energyPerNode;
    double energyMj = 0.0;
    std::optional<double> errorPct;
    std::optional<double> syncOverheadPct;
    // Attack success; nullopt when the adversary is absent or had nothing to act on.
    std::optional<double> jamSuccessPct;
    std::optional<double> eavesdropSuccessPct;
    std::optional<double> replaySuccessPct;
};

ScenarioMetrics summarize(const EventLog& log);

// Delivery accounting: every transmission has exactly one outcome and the
// per-slot sums add up. Throws ConsistencyError otherwise.
void checkConservation(const EventLog& log);

// ---- Simulation -------------------------------------------------------------

// Two-phase slot loop: the medium resolves slot s from the transmissions the
// nodes prepared, then every node (in address order) consumes its inbox and
// prepares slot s + 1.
class Simulator
{
  public:
    explicit Simulator(const ScenarioConfig& config);

    // Resolves the current slot. Throws RangeError once total_slots are done.
    void step();
    void run();
    bool done() const noexcept { return slot_ >= config_.totalSlots; }

    // Next slot to resolve; nodes() already hold their state for it.
    std::uint64_t slot() const noexcept { return slot_; }

    const std::vector<node::Node>& nodes() const noexcept { return nodes_; }
    node::Node& node(std::size_t index) { return nodes_.at(index); }
    const medium::Jammer* jammer() const noexcept { return jammer_.get(); }
    const medium::Eavesdropper* eavesdropper() const noexcept { return eavesdropper_.get(); }
    const ScenarioConfig& config() const noexcept { return config_; }

    // Log so far, with the energy trailer as of now.
    EventLog log() const;

  private:
    ScenarioConfig config_;
    Rng mediumRng_;
    Rng replayRng_;
    std::vector<node::Node> nodes_;
    std::unique_ptr<medium::Jammer> jammer_;
    std::unique_ptr<medium::Eavesdropper> eavesdropper_;
    std::vector<medium::Transmission> pending_;
    EventLog log_;
    std::uint64_t slot_ = 0;
};

struct RunResult
{
    ScenarioMetrics metrics;
    EventLog log;
};

RunResult runScenario(const ScenarioConfig& config);

// ---- Reports ----------------------------------------------------------------

extern const char* const kCsvHeader;
inline constexpr const char* kUndefinedToken = "NA";

// Header line plus one row per scenario.
std::string formatCsv(const std::vector<ScenarioMetrics>& rows);
// The same columns, space-aligned for terminals.
std::string formatTable(const std::vector<ScenarioMetrics>& rows);

// Throws ValidationError unless there are at least two configs and they
// differ only in strategy-related fields (node strategy, fixed_channel,
// fhss_period) and the scenario name.
void checkComparable(const std::vector<ScenarioConfig>& configs);
std::vector<ScenarioMetrics> compareStrategies(const std::vector<ScenarioConfig>& configs);

} // namespace mcsc::harness
