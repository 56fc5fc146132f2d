#include "mcsc/harness.hpp"

#include "mcsc/error.hpp"
#include "mcsc/packet.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace mcsc::harness {

using ojson = nlohmann::ordered_json;

// ---- Event log ------------------------------------------------------------

void writeEventLog(std::ostream& out, const EventLog& log)
{
    const LogHeader& h = log.header;
    ojson header;
    header["type"] = "header";
    header["scenario"] = h.scenario;
    header["strategy"] = node::toString(h.strategy);
    header["total_slots"] = h.totalSlots;
    header["slot_ms"] = h.slotMs;
    header["propagation_ms"] = h.propagationMs;
    header["processing_ms"] = h.processingMs;
    header["data_rate_kbps"] = h.dataRateKbps;
    header["rng_seed"] = h.rngSeed;
    header["jammer"] = h.jammer;
    header["eavesdropper"] = h.eavesdropper;
    header["replayer"] = h.replayer;
    out << header.dump() << '\n';

    for (const auto& r : log.transmissions) {
        const auto& ev = r.event;
        ojson j;
        j["type"] = "tx";
        j["slot"] = ev.slot;
        j["channel"] = ev.channel;
        j["sender"] = ev.sender;
        j["kind"] = medium::toString(ev.kind);
        j["outcome"] = medium::toString(ev.outcome);
        j["injected"] = ev.injected;
        j["captured"] = ev.captured;
        j["receivers"] = ev.receivers;
        j["enqueue_slot"] = ev.enqueueSlot;
        j["accepted"] = r.accepted;
        j["replay_rejected"] = r.replayRejected;
        out << j.dump() << '\n';
    }
    for (const auto& d : log.drops) {
        ojson j;
        j["type"] = "drop";
        j["slot"] = d.slot;
        j["node"] = d.node;
        out << j.dump() << '\n';
    }
    for (const auto& e : log.energy) {
        ojson j;
        j["type"] = "energy";
        j["node"] = e.node;
        j["energy_mj"] = e.energyMj;
        out << j.dump() << '\n';
    }
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, std::size_t line)
{
    if (!j.contains(key))
        throw LogFormatError(fmt::format("line {}: missing '{}'", line, key));
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw LogFormatError(fmt::format("line {}: bad value for '{}'", line, key));
    }
}

} // namespace

EventLog readEventLog(std::istream& in)
{
    EventLog log;
    bool haveHeader = false;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error&) {
            throw LogFormatError(fmt::format("line {}: not JSON", line));
        }
        const auto type = field<std::string>(j, "type", line);
        if (type == "header") {
            if (haveHeader)
                throw LogFormatError(fmt::format("line {}: second header", line));
            haveHeader = true;
            LogHeader& h = log.header;
            h.scenario = field<std::string>(j, "scenario", line);
            try {
                h.strategy = node::strategyFromString(field<std::string>(j, "strategy", line));
            } catch (const ValidationError&) {
                throw LogFormatError(fmt::format("line {}: unknown strategy", line));
            }
            h.totalSlots = field<std::uint64_t>(j, "total_slots", line);
            h.slotMs = field<double>(j, "slot_ms", line);
            h.propagationMs = field<double>(j, "propagation_ms", line);
            h.processingMs = field<double>(j, "processing_ms", line);
            h.dataRateKbps = field<std::uint32_t>(j, "data_rate_kbps", line);
            h.rngSeed = field<std::uint64_t>(j, "rng_seed", line);
            h.jammer = field<bool>(j, "jammer", line);
            h.eavesdropper = field<bool>(j, "eavesdropper", line);
            h.replayer = field<bool>(j, "replayer", line);
            continue;
        }
        if (!haveHeader)
            throw LogFormatError(fmt::format("line {}: record before the header", line));
        if (type == "tx") {
            TxRecord r;
            auto& ev = r.event;
            ev.slot = field<std::uint64_t>(j, "slot", line);
            ev.channel = field<std::uint32_t>(j, "channel", line);
            ev.sender = field<std::uint16_t>(j, "sender", line);
            ev.kind = medium::txKindFromString(field<std::string>(j, "kind", line));
            ev.outcome = medium::outcomeFromString(field<std::string>(j, "outcome", line));
            ev.injected = field<bool>(j, "injected", line);
            ev.captured = field<bool>(j, "captured", line);
            ev.receivers = field<std::uint32_t>(j, "receivers", line);
            ev.enqueueSlot = field<std::uint64_t>(j, "enqueue_slot", line);
            r.accepted = field<std::uint32_t>(j, "accepted", line);
            r.replayRejected = field<std::uint32_t>(j, "replay_rejected", line);
            log.transmissions.push_back(r);
        } else if (type == "drop") {
            log.drops.push_back(
                DropRecord{field<std::uint64_t>(j, "slot", line), field<std::uint16_t>(j, "node", line)});
        } else if (type == "energy") {
            log.energy.push_back(
                EnergyRecord{field<std::uint16_t>(j, "node", line), field<double>(j, "energy_mj", line)});
        } else {
            throw LogFormatError(fmt::format("line {}: unknown record type '{}'", line, type));
        }
    }
    if (!haveHeader)
        throw LogFormatError("log has no header");
    return log;
}

// ---- Metrics ----------------------------------------------------------------

ScenarioMetrics summarize(const EventLog& log)
{
    const LogHeader& h = log.header;
    ScenarioMetrics m;
    m.scenario = h.scenario;
    m.strategy = h.strategy;

    double queueMs = 0.0;
    for (const auto& r : log.transmissions) {
        const auto& ev = r.event;
        if (ev.kind == medium::TxKind::Beacon) {
            ++m.beacons;
            continue;
        }
        if (ev.injected) {
            ++m.injections;
            if (r.accepted > 0)
                ++m.replaysAccepted;
            continue;
        }
        ++m.sent;
        if (ev.outcome == medium::Outcome::Jammed)
            ++m.jammedFrames;
        if (ev.captured)
            ++m.capturedFrames;
        if (r.accepted > 0) {
            ++m.received;
            if (ev.outcome == medium::Outcome::CorruptDelivered)
                ++m.corrupt;
            queueMs += static_cast<double>(ev.slot - ev.enqueueSlot) * h.slotMs;
        }
    }
    m.queueDrops = log.drops.size();

    m.pdrPct = metrics::computePdr(m.received, m.sent);
    const double n = static_cast<double>(m.received);
    metrics::LatencySums sums;
    sums.transMs = n * metrics::transmissionDelayMs(packet::kFrameBits, h.dataRateKbps);
    sums.propMs = n * h.propagationMs;
    sums.queueMs = queueMs;
    sums.procMs = n * h.processingMs;
    m.latency = metrics::computeLatency(sums, m.received);
    m.throughputKbps =
        metrics::computeThroughput(m.received * packet::kFrameBits, static_cast<double>(h.totalSlots) * h.slotMs / 1000.0);
    m.energyPerNode = log.energy;
    for (const auto& e : log.energy)
        m.energyMj += e.energyMj;
    m.errorPct = metrics::computeErrorRate(m.corrupt, m.received);
    m.syncOverheadPct = metrics::computeSyncOverhead(m.beacons, m.sent);
    if (h.jammer)
        m.jamSuccessPct = metrics::attackSuccessPct(m.jammedFrames, m.sent);
    if (h.eavesdropper)
        m.eavesdropSuccessPct = metrics::attackSuccessPct(m.capturedFrames, m.sent);
    if (h.replayer)
        m.replaySuccessPct = metrics::attackSuccessPct(m.replaysAccepted, m.injections);
    return m;
}

// ---- Reports ----------------------------------------------------------------

const char* const kCsvHeader = "scenario,strategy,sent,received,pdr_pct,lat_ms,t_trans_ms,t_prop_ms,t_queue_ms,"
                               "t_proc_ms,throughput_kbps,energy_mj,error_pct,sync_overhead_pct,jam_defense_pct,"
                               "eavesdrop_defense_pct,replay_defense_pct";

namespace {

std::string num(std::optional<double> v)
{
    return v ? fmt::format("{:.3f}", *v) : std::string(kUndefinedToken);
}

std::string csvText(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> cells(const ScenarioMetrics& m)
{
    const auto lat = [&](double metrics::Latency::*member) -> std::optional<double> {
        if (!m.latency)
            return std::nullopt;
        return (*m.latency).*member;
    };
    return {csvText(m.scenario),
            node::toString(m.strategy),
            std::to_string(m.sent),
            std::to_string(m.received),
            num(m.pdrPct),
            num(lat(&metrics::Latency::totalMs)),
            num(lat(&metrics::Latency::transMs)),
            num(lat(&metrics::Latency::propMs)),
            num(lat(&metrics::Latency::queueMs)),
            num(lat(&metrics::Latency::procMs)),
            num(m.throughputKbps),
            num(m.energyMj),
            num(m.errorPct),
            num(m.syncOverheadPct),
            num(metrics::defensePct(m.jamSuccessPct)),
            num(metrics::defensePct(m.eavesdropSuccessPct)),
            num(metrics::defensePct(m.replaySuccessPct))};
}

std::vector<std::string> headerCells()
{
    std::vector<std::string> out;
    std::stringstream ss(kCsvHeader);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

} // namespace

std::string formatCsv(const std::vector<ScenarioMetrics>& rows)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& m : rows) {
        const auto c = cells(m);
        for (std::size_t i = 0; i < c.size(); ++i)
            out += (i ? "," : "") + c[i];
        out += "\n";
    }
    return out;
}

std::string formatTable(const std::vector<ScenarioMetrics>& rows)
{
    std::vector<std::vector<std::string>> grid{headerCells()};
    for (const auto& m : rows)
        grid.push_back(cells(m));
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (const auto& row : grid)
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());

    std::string out;
    for (const auto& row : grid) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i < 2)
                out += fmt::format("{:<{}}", row[i], width[i]);
            else
                out += fmt::format("{:>{}}", row[i], width[i]);
            out += i + 1 < row.size() ? "  " : "\n";
        }
    }
    return out;
}

// ---- Strategy comparison ------------------------------------------------------

namespace {

// Drops the fields a strategy comparison is allowed to vary.
ojson comparable(const ScenarioConfig& c)
{
    ojson j = toJson(c);
    j.erase("name");
    for (auto& n : j["nodes"]) {
        n.erase("strategy");
        n.erase("fixed_channel");
        n.erase("fhss_period");
    }
    return j;
}

std::optional<std::string> firstDifference(const ojson& a, const ojson& b, const std::string& path)
{
    if (a.is_object() && b.is_object()) {
        for (const auto& [key, value] : a.items()) {
            const std::string p = path.empty() ? key : path + "." + key;
            if (!b.contains(key))
                return p;
            if (auto d = firstDifference(value, b.at(key), p))
                return d;
        }
        for (const auto& [key, value] : b.items())
            if (!a.contains(key))
                return path.empty() ? key : path + "." + key;
        return std::nullopt;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size())
            return path;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (auto d = firstDifference(a[i], b[i], path + "[" + std::to_string(i) + "]"))
                return d;
        return std::nullopt;
    }
    if (a != b)
        return path;
    return std::nullopt;
}

} // namespace

void checkComparable(const std::vector<ScenarioConfig>& configs)
{
    if (configs.size() < 2)
        throw ValidationError("configs", "a comparison needs at least two scenarios");
    const ojson base = comparable(configs.front());
    for (std::size_t i = 1; i < configs.size(); ++i) {
        if (auto diff = firstDifference(base, comparable(configs[i]), "")) {
            // Key values stay out of the message; the field name is enough.
            throw ValidationError(*diff, "scenario " + std::to_string(i) +
                                             " differs from scenario 0 outside the strategy fields");
        }
    }
}

std::vector<ScenarioMetrics> compareStrategies(const std::vector<ScenarioConfig>& configs)
{
    checkComparable(configs);
    std::vector<ScenarioMetrics> rows;
    rows.reserve(configs.size());
    for (const auto& c : configs)
        rows.push_back(runScenario(c).metrics);
    return rows;
}

} // namespace mcsc::harness
