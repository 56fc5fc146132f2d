#pragma once

#include "mcsc/crypto.hpp"
#include "mcsc/hopping.hpp"
#include "mcsc/medium.hpp"
#include "mcsc/node.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mcsc::harness {

struct LatencyConstants
{
    double propagationMs = 0.0;
    double processingMs = 0.0;
    std::uint32_t dataRateKbps = 250; // 250, 1000 or 2000

    friend bool operator==(const LatencyConstants&, const LatencyConstants&) = default;
};

struct ScenarioConfig
{
    std::string name;
    hopping::ChannelPlan plan;
    double slotMs = 10.0;
    std::uint64_t totalSlots = 1;
    std::uint64_t beaconPeriodSlots = 100;
    std::uint64_t seedRotationSlots = 4096;
    double tMaxOffsetMs = 2.0;
    std::uint32_t maxMissedBeacons = 5;
    LatencyConstants latency;
    medium::InterferenceScenario interference;
    std::optional<medium::JammerConfig> jammer;
    std::optional<medium::EavesdropperConfig> eavesdropper;
    std::optional<medium::ReplayerConfig> replayer;
    crypto::AesKey payloadKey;
    crypto::AesKey hopSeed;
    crypto::AesKey masterKey;
    std::vector<node::NodeConfig> nodes;
    std::uint64_t rngSeed = 0;

    // Throws ValidationError naming the first offending field.
    void validate() const;

    node::Strategy strategy() const;
    const node::NodeConfig& master() const;
    node::NetworkParams networkParams() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Field names follow the JSON document (snake_case). Missing optional fields
// take the defaults above; the result is validated.
ScenarioConfig parseConfig(const nlohmann::json& doc);
ScenarioConfig loadConfig(const std::filesystem::path& path);

// Full document including key material. Only used in memory, for example to
// diff two scenarios; never written to logs or CSV.
nlohmann::ordered_json toJson(const ScenarioConfig& config);

// Presets live in MCSC_PRESET_DIR if set, else in the directory baked in at build time.
std::filesystem::path presetDirectory();
std::vector<std::string> listPresets();

// A path to an existing file, or the name of a preset (with or without .json).
std::filesystem::path resolveConfigPath(const std::string& fileOrPreset);

} // namespace mcsc::harness
