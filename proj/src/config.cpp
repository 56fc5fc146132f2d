#include "mcsc/config.hpp"

#include "mcsc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#ifndef MCSC_PRESET_DIR_DEFAULT
#define MCSC_PRESET_DIR_DEFAULT "presets"
#endif

namespace mcsc::harness {

using nlohmann::json;

namespace {

// Parsed text yields unsigned numbers, documents built in code signed ones.
bool isNonNegativeInteger(const json& v)
{
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

// Typed access into one JSON object, reporting errors by dotted field path.
class Reader
{
  public:
    Reader(const json& obj, std::string path, std::set<std::string> allowed) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ValidationError(path_.empty() ? "<document>" : path_, "expected an object");
        for (const auto& [key, value] : obj_.items())
            if (!allowed.count(key))
                throw ValidationError(join(path_, key), "unknown field");
    }

    bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    std::string field(const std::string& key) const { return join(path_, key); }

    const json& at(const std::string& key) const
    {
        if (!has(key))
            throw ValidationError(field(key), "missing");
        return obj_.at(key);
    }

    std::string str(const std::string& key) const
    {
        const json& v = at(key);
        if (!v.is_string())
            throw ValidationError(field(key), "expected a string");
        return v.get<std::string>();
    }

    double num(const std::string& key) const
    {
        const json& v = at(key);
        if (!v.is_number())
            throw ValidationError(field(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            throw ValidationError(field(key), "must be finite");
        return d;
    }

    double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

    std::uint64_t uint(const std::string& key) const
    {
        const json& v = at(key);
        if (!isNonNegativeInteger(v))
            throw ValidationError(field(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::uint64_t uint(const std::string& key, std::uint64_t fallback) const
    {
        return has(key) ? uint(key) : fallback;
    }

    std::uint32_t u32(const std::string& key) const
    {
        const std::uint64_t v = uint(key);
        if (v > 0xFFFFFFFFu)
            throw ValidationError(field(key), "too large");
        return static_cast<std::uint32_t>(v);
    }

    std::uint32_t u32(const std::string& key, std::uint32_t fallback) const { return has(key) ? u32(key) : fallback; }

    crypto::AesKey key(const std::string& name) const
    {
        const std::string hex = str(name);
        try {
            return crypto::AesKey::fromHex(hex);
        } catch (const Error&) {
            throw ValidationError(field(name), "expected 32 hex digits");
        }
    }

  private:
    const json& obj_;
    std::string path_;
};

hopping::ChannelPlan parsePlan(const json& j)
{
    Reader r(j, "channel_plan", {"channel_count", "base_frequency_mhz", "channel_width_mhz"});
    hopping::ChannelPlan plan;
    const std::uint64_t n = r.uint("channel_count", plan.channelCount);
    if (n < 1 || n > hopping::kMaxChannels)
        throw ValidationError(r.field("channel_count"), "must be in 1..256");
    plan.channelCount = static_cast<std::uint32_t>(n);
    plan.baseFrequencyMhz = r.num("base_frequency_mhz", plan.baseFrequencyMhz);
    plan.channelWidthMhz = r.num("channel_width_mhz", plan.channelWidthMhz);
    if (plan.channelWidthMhz <= 0.0)
        throw ValidationError(r.field("channel_width_mhz"), "must be positive");
    return plan;
}

LatencyConstants parseLatency(const json& j)
{
    Reader r(j, "latency", {"propagation_ms", "processing_ms", "data_rate_kbps"});
    LatencyConstants c;
    c.propagationMs = r.num("propagation_ms", c.propagationMs);
    c.processingMs = r.num("processing_ms", c.processingMs);
    c.dataRateKbps = r.u32("data_rate_kbps", c.dataRateKbps);
    return c;
}

medium::InterferenceScenario parseInterference(const json& j)
{
    Reader r(j, "interference", {"name", "per_packet_loss_prob", "bit_error_prob", "narrowband"});
    medium::InterferenceScenario s;
    if (r.has("name"))
        s.level = medium::interferenceLevelFromString(r.str("name"));
    s.perPacketLossProb = r.num("per_packet_loss_prob", 0.0);
    s.bitErrorProb = r.num("bit_error_prob", 0.0);
    if (r.has("narrowband")) {
        const json& arr = r.at("narrowband");
        if (!arr.is_array())
            throw ValidationError(r.field("narrowband"), "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader e(arr[i], "interference.narrowband[" + std::to_string(i) + "]", {"channel", "loss_prob"});
            medium::NarrowbandInterferer nb;
            nb.channel = e.u32("channel");
            nb.lossProb = e.num("loss_prob");
            s.narrowband.push_back(nb);
        }
    }
    return s;
}

medium::JammerConfig parseJammer(const json& j)
{
    Reader r(j, "jammer", {"mode", "channels_per_slot", "target_channel", "max_lag"});
    medium::JammerConfig c;
    c.mode = medium::jammerModeFromString(r.str("mode"));
    c.channelsPerSlot = r.u32("channels_per_slot", 1);
    if (r.has("target_channel"))
        c.targetChannel = r.u32("target_channel");
    c.maxLag = r.u32("max_lag", c.maxLag);
    return c;
}

medium::EavesdropperConfig parseEavesdropper(const json& j)
{
    Reader r(j, "eavesdropper", {"channels"});
    medium::EavesdropperConfig c;
    const json& arr = r.at("channels");
    if (!arr.is_array())
        throw ValidationError(r.field("channels"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!isNonNegativeInteger(arr[i]))
            throw ValidationError("eavesdropper.channels[" + std::to_string(i) + "]", "expected a channel index");
        const std::uint64_t ch = arr[i].get<std::uint64_t>();
        if (ch >= hopping::kMaxChannels)
            throw ValidationError("eavesdropper.channels[" + std::to_string(i) + "]", "outside the channel plan");
        c.monitoredChannels.push_back(static_cast<hopping::ChannelIndex>(ch));
    }
    return c;
}

medium::ReplayerConfig parseReplayer(const json& j)
{
    Reader r(j, "replayer", {"inject_prob", "channel_policy"});
    medium::ReplayerConfig c;
    c.injectProb = r.num("inject_prob");
    if (r.has("channel_policy"))
        c.policy = medium::replayPolicyFromString(r.str("channel_policy"));
    return c;
}

node::NodeConfig parseNode(const json& j, std::size_t index)
{
    Reader r(j, "nodes[" + std::to_string(index) + "]",
             {"address", "role", "strategy", "fixed_channel", "fhss_period", "traffic", "drift_rate", "clock_offset_ms",
              "queue_capacity"});
    node::NodeConfig n;
    const std::uint64_t address = r.uint("address");
    if (address > 0xFFFF)
        throw ValidationError(r.field("address"), "must fit in 16 bits");
    n.address = static_cast<std::uint16_t>(address);
    const std::string role = r.str("role");
    try {
        n.role = node::roleFromString(role);
    } catch (const ValidationError&) {
        throw ValidationError(r.field("role"), "unknown role '" + role + "'");
    }
    const std::string strategy = r.str("strategy");
    try {
        n.strategy = node::strategyFromString(strategy);
    } catch (const ValidationError&) {
        throw ValidationError(r.field("strategy"), "unknown strategy '" + strategy + "'");
    }
    if (r.has("fixed_channel"))
        n.fixedChannel = r.u32("fixed_channel");
    if (r.has("fhss_period"))
        n.fhssPeriod = r.u32("fhss_period");
    n.traffic = r.num("traffic", 0.0);
    n.driftRate = r.num("drift_rate", 0.0);
    n.clockOffsetMs = r.num("clock_offset_ms", 0.0);
    n.queueCapacity = r.u32("queue_capacity", n.queueCapacity);
    return n;
}

void checkProbability(double p, const std::string& field)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError(field, "probability must be in [0,1]");
}

std::string hex(const crypto::AesKey& key)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : key.bytes()) {
        s += digits[b >> 4];
        s += digits[b & 0xF];
    }
    return s;
}

} // namespace

void ScenarioConfig::validate() const
{
    if (name.empty())
        throw ValidationError("name", "must not be empty");
    if (plan.channelCount < 1 || plan.channelCount > hopping::kMaxChannels)
        throw ValidationError("channel_plan.channel_count", "must be in 1..256");
    if (!(slotMs > 0.0))
        throw ValidationError("slot_ms", "must be positive");
    if (totalSlots < 1)
        throw ValidationError("total_slots", "must be at least 1");
    if (totalSlots >= (std::uint64_t{1} << 48))
        throw ValidationError("total_slots", "slot index must fit in 48 bits");
    if (beaconPeriodSlots < 1)
        throw ValidationError("beacon_period_slots", "must be at least 1");
    if (seedRotationSlots < 1 || seedRotationSlots > 65536)
        throw ValidationError("seed_rotation_slots", "must be in 1..65536");
    if (!(tMaxOffsetMs > 0.0))
        throw ValidationError("t_max_offset_ms", "must be positive");
    if (maxMissedBeacons < 1)
        throw ValidationError("max_missed_beacons", "must be at least 1");

    if (!(latency.propagationMs >= 0.0 && latency.propagationMs < slotMs))
        throw ValidationError("latency.propagation_ms", "must be in [0, slot_ms)");
    if (!(latency.processingMs >= 0.0))
        throw ValidationError("latency.processing_ms", "must be non-negative");
    if (latency.dataRateKbps != 250 && latency.dataRateKbps != 1000 && latency.dataRateKbps != 2000)
        throw ValidationError("latency.data_rate_kbps", "must be 250, 1000 or 2000");

    checkProbability(interference.perPacketLossProb, "interference.per_packet_loss_prob");
    checkProbability(interference.bitErrorProb, "interference.bit_error_prob");
    interference.validate(plan);

    if (jammer)
        jammer->validate(plan);
    if (eavesdropper) {
        std::set<hopping::ChannelIndex> seen;
        for (std::size_t i = 0; i < eavesdropper->monitoredChannels.size(); ++i) {
            const auto c = eavesdropper->monitoredChannels[i];
            const std::string field = "eavesdropper.channels[" + std::to_string(i) + "]";
            if (c >= plan.channelCount)
                throw ValidationError(field, "outside the channel plan");
            if (!seen.insert(c).second)
                throw ValidationError(field, "listed twice");
        }
    }
    if (replayer) {
        checkProbability(replayer->injectProb, "replayer.inject_prob");
        if (!eavesdropper)
            throw ValidationError("replayer", "needs an eavesdropper to capture frames");
    }

    if (nodes.empty())
        throw ValidationError("nodes", "must not be empty");
    std::set<std::uint16_t> addresses;
    std::size_t masters = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const node::NodeConfig& n = nodes[i];
        const std::string p = "nodes[" + std::to_string(i) + "].";
        if (!addresses.insert(n.address).second)
            throw ValidationError(p + "address", "duplicate address");
        if (replayer && n.address == replayer->address)
            throw ValidationError(p + "address", "reserved for the replay attacker");
        if (n.role == node::Role::Master) {
            ++masters;
            if (n.clockOffsetMs != 0.0)
                throw ValidationError(p + "clock_offset_ms", "the master defines network time and must be 0");
        }
        if (n.strategy != nodes.front().strategy)
            throw ValidationError(p + "strategy", "all nodes of a scenario must share one strategy");
        const bool single = n.strategy == node::Strategy::SingleChannelAes;
        const bool fhss = n.strategy == node::Strategy::FhssBaseline;
        if (single != n.fixedChannel.has_value())
            throw ValidationError(p + "fixed_channel", single ? "required for SINGLE_CHANNEL_AES"
                                                              : "only valid for SINGLE_CHANNEL_AES");
        if (n.fixedChannel && *n.fixedChannel >= plan.channelCount)
            throw ValidationError(p + "fixed_channel", "outside the channel plan");
        if (fhss != n.fhssPeriod.has_value())
            throw ValidationError(p + "fhss_period", fhss ? "required for FHSS_BASELINE" : "only valid for FHSS_BASELINE");
        if (n.fhssPeriod && *n.fhssPeriod < 1)
            throw ValidationError(p + "fhss_period", "must be at least 1");
        checkProbability(n.traffic, p + "traffic");
        if (!(n.driftRate > -1.0 && std::isfinite(n.driftRate)))
            throw ValidationError(p + "drift_rate", "must be greater than -1");
        if (!std::isfinite(n.clockOffsetMs))
            throw ValidationError(p + "clock_offset_ms", "must be finite");
        if (n.queueCapacity < 1)
            throw ValidationError(p + "queue_capacity", "must be at least 1");
    }
    if (masters != 1)
        throw ValidationError("nodes", "exactly one MASTER required, found " + std::to_string(masters));
}

node::Strategy ScenarioConfig::strategy() const
{
    if (nodes.empty())
        throw ValidationError("nodes", "must not be empty");
    return nodes.front().strategy;
}

const node::NodeConfig& ScenarioConfig::master() const
{
    for (const auto& n : nodes)
        if (n.role == node::Role::Master)
            return n;
    throw ValidationError("nodes", "exactly one MASTER required, found 0");
}

node::NetworkParams ScenarioConfig::networkParams() const
{
    node::NetworkParams p;
    p.plan = plan;
    p.payloadKey = payloadKey;
    p.initialSeed = hopping::HopSeed{hopSeed.bytes(), 0};
    p.masterKey = masterKey;
    p.seedRotationSlots = seedRotationSlots;
    p.slotMs = slotMs;
    p.beaconPeriodSlots = beaconPeriodSlots;
    p.tMaxOffsetMs = tMaxOffsetMs;
    p.maxMissedBeacons = maxMissedBeacons;
    p.propagationMs = latency.propagationMs;
    p.masterDriftRate = master().driftRate;
    return p;
}

ScenarioConfig parseConfig(const json& doc)
{
    Reader r(doc, "",
             {"name", "channel_plan", "slot_ms", "total_slots", "beacon_period_slots", "seed_rotation_slots",
              "t_max_offset_ms", "max_missed_beacons", "latency", "interference", "jammer", "eavesdropper", "replayer",
              "keys", "nodes", "rng_seed"});
    ScenarioConfig c;
    c.name = r.str("name");
    if (r.has("channel_plan"))
        c.plan = parsePlan(r.at("channel_plan"));
    c.slotMs = r.num("slot_ms", c.slotMs);
    c.totalSlots = r.uint("total_slots");
    c.beaconPeriodSlots = r.uint("beacon_period_slots", c.beaconPeriodSlots);
    c.seedRotationSlots = r.uint("seed_rotation_slots", c.seedRotationSlots);
    c.tMaxOffsetMs = r.num("t_max_offset_ms", c.tMaxOffsetMs);
    c.maxMissedBeacons = r.u32("max_missed_beacons", c.maxMissedBeacons);
    if (r.has("latency"))
        c.latency = parseLatency(r.at("latency"));
    if (r.has("interference"))
        c.interference = parseInterference(r.at("interference"));
    if (r.has("jammer"))
        c.jammer = parseJammer(r.at("jammer"));
    if (r.has("eavesdropper"))
        c.eavesdropper = parseEavesdropper(r.at("eavesdropper"));
    if (r.has("replayer"))
        c.replayer = parseReplayer(r.at("replayer"));

    Reader keys(r.at("keys"), "keys", {"payload_key", "hop_seed", "master_key"});
    c.payloadKey = keys.key("payload_key");
    c.hopSeed = keys.key("hop_seed");
    c.masterKey = keys.key("master_key");

    const json& nodes = r.at("nodes");
    if (!nodes.is_array())
        throw ValidationError("nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        c.nodes.push_back(parseNode(nodes[i], i));
    c.rngSeed = r.uint("rng_seed", 0);

    c.validate();
    return c;
}

ScenarioConfig loadConfig(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(path.string() + ": " + e.what());
    }
    return parseConfig(doc);
}

nlohmann::ordered_json toJson(const ScenarioConfig& c)
{
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["channel_plan"] = {{"channel_count", c.plan.channelCount},
                         {"base_frequency_mhz", c.plan.baseFrequencyMhz},
                         {"channel_width_mhz", c.plan.channelWidthMhz}};
    j["slot_ms"] = c.slotMs;
    j["total_slots"] = c.totalSlots;
    j["beacon_period_slots"] = c.beaconPeriodSlots;
    j["seed_rotation_slots"] = c.seedRotationSlots;
    j["t_max_offset_ms"] = c.tMaxOffsetMs;
    j["max_missed_beacons"] = c.maxMissedBeacons;
    j["latency"] = {{"propagation_ms", c.latency.propagationMs},
                    {"processing_ms", c.latency.processingMs},
                    {"data_rate_kbps", c.latency.dataRateKbps}};
    nlohmann::ordered_json nb = nlohmann::ordered_json::array();
    for (const auto& n : c.interference.narrowband)
        nb.push_back({{"channel", n.channel}, {"loss_prob", n.lossProb}});
    j["interference"] = {{"name", medium::toString(c.interference.level)},
                         {"per_packet_loss_prob", c.interference.perPacketLossProb},
                         {"bit_error_prob", c.interference.bitErrorProb},
                         {"narrowband", nb}};
    if (c.jammer) {
        j["jammer"] = {{"mode", medium::toString(c.jammer->mode)},
                       {"channels_per_slot", c.jammer->channelsPerSlot},
                       {"max_lag", c.jammer->maxLag}};
        if (c.jammer->targetChannel)
            j["jammer"]["target_channel"] = *c.jammer->targetChannel;
    }
    if (c.eavesdropper)
        j["eavesdropper"] = {{"channels", c.eavesdropper->monitoredChannels}};
    if (c.replayer)
        j["replayer"] = {{"inject_prob", c.replayer->injectProb},
                         {"channel_policy", medium::toString(c.replayer->policy)}};
    j["keys"] = {{"payload_key", hex(c.payloadKey)}, {"hop_seed", hex(c.hopSeed)}, {"master_key", hex(c.masterKey)}};
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : c.nodes) {
        nlohmann::ordered_json o;
        o["address"] = n.address;
        o["role"] = node::toString(n.role);
        o["strategy"] = node::toString(n.strategy);
        if (n.fixedChannel)
            o["fixed_channel"] = *n.fixedChannel;
        if (n.fhssPeriod)
            o["fhss_period"] = *n.fhssPeriod;
        o["traffic"] = n.traffic;
        o["drift_rate"] = n.driftRate;
        o["clock_offset_ms"] = n.clockOffsetMs;
        o["queue_capacity"] = n.queueCapacity;
        nodes.push_back(o);
    }
    j["nodes"] = nodes;
    j["rng_seed"] = c.rngSeed;
    return j;
}

std::filesystem::path presetDirectory()
{
    if (const char* env = std::getenv("MCSC_PRESET_DIR"); env && *env)
        return env;
    return MCSC_PRESET_DIR_DEFAULT;
}

std::vector<std::string> listPresets()
{
    std::vector<std::string> names;
    const auto dir = presetDirectory();
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::filesystem::path resolveConfigPath(const std::string& fileOrPreset)
{
    const std::filesystem::path direct(fileOrPreset);
    if (std::filesystem::is_regular_file(direct))
        return direct;
    std::filesystem::path preset = presetDirectory() / fileOrPreset;
    if (preset.extension() != ".json")
        preset += ".json";
    if (std::filesystem::is_regular_file(preset))
        return preset;
    throw InvalidConfig("no config file or preset named '" + fileOrPreset + "'");
}

} // namespace mcsc::harness
